"""Per-trial SINRs and outage indicators for the transmission schemes.

Covered: the three-BS cooperative NOMA scheme (superposed cell-edge plus
near-user messages with distributed analog beamforming), the cooperative
OMA benchmark (all power briefly dedicated to the cell-edge user via
distributed digital beamforming), and the two single-BS NOMA benchmarks
(a fixed serving BS, or the BS with the strongest link to the cell-edge
user).

All interference arguments are aggregate co-channel powers normalized by
the serving power P_s, so they enter the SINR denominators alongside
1/rho.  Outage uses strict inequality, SINR < eta; a tie counts as
success.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization

_MODES = ("random-bs", "best-bs")


@dataclass(frozen=True)
class SchemeConfig:
    """Power split, target rates, and transmit SNR shared by all schemes.

    beta0_sq and beta1_sq are the power fractions of the cell-edge and
    near-user messages inside the superposition (they must sum to one);
    rates_r holds the four target rates (r0, r1, r2, r3) in bits per
    channel use; transmit_snr_rho is P_s over the noise power.
    """

    beta0_sq: float
    beta1_sq: float
    rates_r: tuple[float, float, float, float]
    transmit_snr_rho: float

    def __post_init__(self):
        b0, b1 = self.beta0_sq, self.beta1_sq
        if not (0.0 <= b0 <= 1.0 and 0.0 <= b1 <= 1.0):
            raise ValueError(f"power fractions must lie in [0, 1], got ({b0}, {b1})")
        if abs(b0 + b1 - 1.0) > 1e-9:
            raise ValueError(f"power fractions must sum to 1, got {b0} + {b1} = {b0 + b1}")
        if len(self.rates_r) != 4:
            raise ValueError(f"need 4 target rates, got {len(self.rates_r)}")
        if any(r < 0 for r in self.rates_r):
            raise ValueError(f"target rates must be nonnegative, got {self.rates_r}")
        if self.transmit_snr_rho <= 0:
            raise ValueError(f"transmit SNR must be positive, got {self.transmit_snr_rho}")
        eta0 = 2.0 ** self.rates_r[0] - 1.0
        if b0 - b1 * eta0 <= 0.0:
            raise ValueError(
                f"need beta0_sq - beta1_sq * eta0 > 0 for the cell-edge message to be "
                f"decodable at high SNR; got {b0} - {b1} * {eta0} = {b0 - b1 * eta0:.6g}"
            )


@dataclass(frozen=True)
class TrialOutcome:
    """SINRs and outage flags of one channel draw under the NOMA scheme.

    outage_flags[0] is the cell-edge user; outage_flags[j] for j in 1..3
    is the near user of BS j, in outage when either its SIC stage or its
    own-message stage falls below target.
    """

    sinr_cell_edge: float
    sinr_sic: np.ndarray
    sinr_near_own: np.ndarray
    outage_flags: np.ndarray


def thresholds(config: SchemeConfig) -> np.ndarray:
    """SINR targets eta_k = 2^{r_k} - 1 for the four users."""
    return 2.0 ** np.asarray(config.rates_r, dtype=float) - 1.0


def _rotated_gains(ch: ChannelRealization, j: int) -> np.ndarray:
    # Analog beams are conjugate-phased to the cell-edge links, so the
    # gain seen at near user j from BS i is h_ij rotated by -arg(h_i0).
    mags = np.abs(ch.gains_h[:, 0])
    phase = np.where(mags > 0.0, ch.gains_h[:, 0] / np.where(mags > 0.0, mags, 1.0), 1.0)
    return np.conj(phase) * ch.gains_h[:, j]


def sinr_cell_edge(ch: ChannelRealization, config: SchemeConfig, I0: float = 0.0) -> float:
    """Cell-edge SINR: coherent magnitude-sum numerator from the 3 beams."""
    mags = np.abs(ch.gains_h[:, 0])
    num = config.beta0_sq * mags.sum() ** 2
    den = config.beta1_sq * (mags**2).sum() + I0 + 1.0 / config.transmit_snr_rho
    return float(num / den)


def sinr_near_sic(ch: ChannelRealization, j: int, config: SchemeConfig, Ij: float = 0.0) -> float:
    """SINR of the cell-edge message at near user j (the SIC stage).

    The three rotated cross-links add as complex amplitudes; the own
    superposed near message and the other two beams act as interference.
    """
    if j not in (1, 2, 3):
        raise ValueError(f"near-user index must be 1, 2 or 3, got {j}")
    ht = _rotated_gains(ch, j)
    num = config.beta0_sq * np.abs(ht.sum()) ** 2
    den = config.beta1_sq * (np.abs(ht) ** 2).sum() + Ij + 1.0 / config.transmit_snr_rho
    return float(num / den)


def sinr_near_own(ch: ChannelRealization, j: int, config: SchemeConfig, Ij: float = 0.0) -> float:
    """SINR of near user j's own message after SIC removed the shared one."""
    if j not in (1, 2, 3):
        raise ValueError(f"near-user index must be 1, 2 or 3, got {j}")
    ht = np.abs(_rotated_gains(ch, j)) ** 2
    num = config.beta1_sq * ht[j - 1]
    cross = ht.sum() - ht[j - 1]
    den = config.beta1_sq * cross + Ij + 1.0 / config.transmit_snr_rho
    return float(num / den)


def noma_trial(
    ch: ChannelRealization,
    config: SchemeConfig,
    interference: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0),
) -> TrialOutcome:
    """Evaluate one trial of the cooperative NOMA scheme for all 4 users.

    Near user j is in outage when the exact SIC-stage SINR misses eta0 or
    the own-message SINR misses eta_j.
    """
    eta = thresholds(config)
    s0 = sinr_cell_edge(ch, config, interference[0])
    sic = np.array([sinr_near_sic(ch, j, config, interference[j]) for j in (1, 2, 3)])
    own = np.array([sinr_near_own(ch, j, config, interference[j]) for j in (1, 2, 3)])
    flags = np.empty(4, dtype=bool)
    flags[0] = s0 < eta[0]
    flags[1:] = (sic < eta[0]) | (own < eta[1:])
    return TrialOutcome(s0, sic, own, flags)


def oma_trial(ch: ChannelRealization, config: SchemeConfig, I0: float = 0.0) -> bool:
    """Cell-edge outage under the OMA benchmark.

    Digital distributed beamforming over the dedicated slot gives
    SNR = 3 rho sum_i |h_i0|^2 (per-BS power scaled so the total spent on
    user 0 matches the NOMA scheme's across the three slots).
    """
    eta0 = 2.0 ** config.rates_r[0] - 1.0
    q = float((np.abs(ch.gains_h[:, 0]) ** 2).sum())
    snr = 3.0 * q / (I0 + 1.0 / config.transmit_snr_rho)
    return snr < eta0


def single_bs_noma_trial(
    ch: ChannelRealization,
    config: SchemeConfig,
    mode: str = "random-bs",
    I0: float = 0.0,
) -> bool:
    """Cell-edge outage when only one BS serves user 0.

    The serving BS superposes the cell-edge message at 3 beta0^2 P_s with
    its near-user message at beta1^2 P_s; the other two BSs keep serving
    their own near users at P_s and appear as interference.  mode
    "random-bs" pins the serving BS to BS 1; "best-bs" picks the strongest
    |h_i0|^2 (first index on ties).
    """
    m = mode.lower()
    if m not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}, got {mode!r}")
    p = np.abs(ch.gains_h[:, 0]) ** 2
    b = int(np.argmax(p)) if m == "best-bs" else 0
    eta0 = 2.0 ** config.rates_r[0] - 1.0
    num = 3.0 * config.beta0_sq * p[b]
    den = config.beta1_sq * p[b] + (p.sum() - p[b]) + I0 + 1.0 / config.transmit_snr_rho
    return num / den < eta0
