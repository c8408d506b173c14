"""Closed-form outage approximations and their supporting functions.

Everything here evaluates fast deterministic expressions: the high-SNR
cell-edge outage factorization P0 ~ kappa * E{L10 L20 L30}, the OMA
benchmark outage, the near-user outage in the isolated-cell regime, and
its Gauss-Chebyshev extension under a Poisson field of interferers.
Monte Carlo lives elsewhere; the only sampling code in this module is the
brute-force oracle used to validate the cell-edge approximation.

All probability-valued results are clamped to [0, 1] and carry a
regime_note naming the approximation branch taken, with the pre-clamp
value kept for diagnostics: the closed forms are high-SNR asymptotics and
can exceed 1 when evaluated far outside their regime.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._special import beta_function, lower_incomplete_gamma, regularized_gamma_p
from .geometry import SQRT3, NetworkLayout, lambda_of_k, sample_cell_edge_batch
from .interference import InterferenceConfig
from .schemes import SchemeConfig, thresholds

__all__ = [
    "EdgeOutageCoefficients",
    "AnalyticOutage",
    "PathLossMoment",
    "lower_incomplete_gamma",
    "beta_function",
    "edge_outage_coefficients",
    "kappa",
    "expected_pathloss_product",
    "p0_noma_analytic",
    "p0_oma_analytic",
    "pj_noma_analytic",
    "pj_noma_interference_analytic",
    "brute_force_p0_oracle",
]

# Below this beta1_sq the a^{-3/2} prefactor in the antiderivative has lost
# all precision in double arithmetic and the pure-beamforming limit is the
# more accurate value (crossover verified numerically).
_KAPPA_LIMIT_BAND = 3e-5

# The coverage moment approximation assumes the cell-edge user sits near
# the centroid; flag configs where the lens is wide enough that accuracy
# is unestablished.
_WIDE_LENS_K = 1.2 / SQRT3

DEFAULT_QUADRATURE_NODES = 100


@dataclass(frozen=True)
class EdgeOutageCoefficients:
    """Constants of the cell-edge outage antiderivative.

    a, b, c, d collect the power-split and threshold terms; phi is the
    integration endpoint and phi1 the boundary of the inner integration
    region (phi < phi1 whenever beta1 > 0).
    """

    a: float
    b: float
    c: float
    d: float
    phi: float
    phi1: float


@dataclass(frozen=True)
class AnalyticOutage:
    """A closed-form outage value clamped to [0, 1].

    regime_note names the approximation branch used; value_pre_clamp keeps
    the raw expression value so callers can detect regime breakdown.
    """

    value: float
    regime_note: str
    value_pre_clamp: float


@dataclass(frozen=True)
class PathLossMoment:
    """E{L10 L20 L30} over the lens together with the branch that produced it."""

    value: float
    regime_note: str


def _eta0(config: SchemeConfig) -> float:
    return 2.0 ** config.rates_r[0] - 1.0


def edge_outage_coefficients(config: SchemeConfig) -> EdgeOutageCoefficients:
    """Coefficients a, b, c, d and endpoints phi, phi1 for the cell-edge form."""
    b0, b1 = config.beta0_sq, config.beta1_sq
    eta0, rho = _eta0(config), config.transmit_snr_rho
    a = b0 * b1 * eta0 - b1 * b1 * eta0 * eta0
    b = 3.0 * b0 * b1 * eta0 - b1 * b1 * eta0 * eta0
    c = (b0 - b1 * eta0) * eta0 / rho
    d = 2.0 * b0 * b0 + 3.0 * b0 * b1 * eta0 - b1 * b1 * eta0 * eta0
    phi = math.sqrt(eta0 / (rho * (2.0 * b0 - b1 * eta0)))
    phi1 = math.sqrt(eta0 / (rho * (2.0 * b0 - 2.0 * b1 * eta0))) if eta0 > 0 else 0.0
    return EdgeOutageCoefficients(a, b, c, d, phi, phi1)


def _antiderivative_F(v: float, co: EdgeOutageCoefficients, beta0_sq: float) -> float:
    # Antiderivative of the boundary term of the small-argument CDF
    # integral; all log and atanh arguments are positive under the
    # standing assumption, which is asserted rather than continued around.
    a, b, c = co.a, co.b, co.c
    root = math.sqrt((a + b) * v * v + c)
    sa = math.sqrt(a)
    t_atanh = sa * v / root
    assert 0.0 <= t_atanh < 1.0, "atanh argument left [0, 1)"
    s1 = -(c**3) * (2.0 * a - b) * math.atanh(t_atanh) / (b * b)
    s2 = -sa * v * root * (b * (b - 2.0 * a) * v**4 + 2.0 * b * c * v * v + c * c) / b
    t_log = (root + sa * v) / math.sqrt(b * v * v + c)
    assert t_log > 0.0, "log argument not positive"
    s3 = v * v * (b * (4.0 * a + b) * v**4 + 3.0 * (2.0 * a + b) * c * v * v + 3.0 * c * c) * math.log(t_log)
    t_log4 = math.sqrt(a + b) * root + (a + b) * v
    assert t_log4 > 0.0, "log argument not positive"
    s4 = 2.0 * a**1.5 * c**3 * math.log(t_log4) / (b * b * math.sqrt(a + b))
    return (2.0 * math.sqrt(2.0) * beta0_sq / (48.0 * a**1.5)) * (s1 + s2 + s3 + s4)


def _polynomial_G(v: float, co: EdgeOutageCoefficients) -> float:
    return (2.0 / 15.0) * (co.a * v**6 / 6.0 + 5.0 * co.c * v**4 / 4.0 + 5.0 * co.d * v**6 / 6.0)


def kappa(config: SchemeConfig) -> float:
    """Path-loss-independent factor of the high-SNR cell-edge outage.

    Scales as rho^-3 (the three cooperating links give diversity order 3).
    For beta1 -> 0 the general antiderivative degenerates and the
    pure-beamforming limit (eta0 / (rho beta0^2))^3 / 90 is returned.
    """
    b0, b1 = config.beta0_sq, config.beta1_sq
    eta0, rho = _eta0(config), config.transmit_snr_rho
    if eta0 == 0.0:
        return 0.0
    if b1 < _KAPPA_LIMIT_BAND:
        return (eta0 / (rho * b0)) ** 3 / 90.0
    co = edge_outage_coefficients(config)
    val = _polynomial_G(co.phi, co) - _antiderivative_F(co.phi, co, b0) + _antiderivative_F(0.0, co, b0)
    return 4.0 * val / (b0 - b1 * eta0) ** 2


def _pathloss_moment_exact_alpha2(l: float, R0: float) -> float:
    # Closed form of the squared-distance triple product averaged over the
    # lens; 0/0 at the lower admissible radius, where the lambda limit
    # l^6 / 27 takes over.
    k = R0 / l
    if k - SQRT3 / 3.0 < 1e-4:
        return l**6 / 27.0
    asin = math.asin(l / (2.0 * R0))
    area = 3.0 * R0 * R0 * (math.pi / 3.0 - asin) - SQRT3 * l * R0 * math.sin(math.pi / 3.0 - asin)
    t = (
        l**8 / (8.0 * SQRT3)
        + (3.0 * SQRT3 + 4.0 * math.pi) * l**4 * R0**4
        + 8.0 * (SQRT3 + math.pi) * l**2 * R0**6
        + 2.0 * math.pi * R0**8
        - 6.0 * R0**4 * (2.0 * l**4 + 4.0 * l**2 * R0**2 + R0**4) * asin
        - 0.125 * l * R0 * math.sqrt(4.0 - l * l / (R0 * R0))
        * (l**6 + 2.0 * l**4 * R0**2 + 102.0 * l**2 * R0**4 + 84.0 * R0**6)
    )
    return t / (8.0 * area)


def expected_pathloss_product(l: float, R0: float, alpha: float) -> PathLossMoment:
    """Mean product of the three cell-edge path losses over the lens.

    alpha = 2 has an exact closed form; alpha > 2 uses the centroid
    approximation 3^{-3 alpha / 2} l^{3 alpha}, accurate when the lens is
    small (R0/l near sqrt(3)/3).
    """
    if alpha < 2.0:
        raise ValueError(f"path-loss exponent must be >= 2, got {alpha}")
    k = R0 / l
    if not (SQRT3 / 3.0 <= k <= SQRT3 / 2.0):
        raise ValueError(f"R0/l = {k} outside admissible range")
    if alpha == 2.0:
        value = _pathloss_moment_exact_alpha2(l, R0)
        note = "exact lens moment at alpha=2"
    else:
        value = 3.0 ** (-1.5 * alpha) * l ** (3.0 * alpha)
        note = "centroid moment approximation for alpha>2"
    if k > _WIDE_LENS_K:
        note += "; wide lens (R0/l > 1.2/sqrt(3)), accuracy unestablished"
    return PathLossMoment(value, note)


def _clamp(value: float, note: str) -> AnalyticOutage:
    clamped = min(1.0, max(0.0, value))
    if clamped != value:
        note += f"; clamped from {value:.6g} (outside approximation regime)"
    return AnalyticOutage(clamped, note, value)


def p0_noma_analytic(layout: NetworkLayout, config: SchemeConfig, alpha: float) -> AnalyticOutage:
    """High-SNR cell-edge outage of the cooperative NOMA scheme.

    The product kappa(config) * E{L10 L20 L30}: fading statistics and
    geometry factorize because the outage event is dominated by all three
    links being simultaneously weak.
    """
    moment = expected_pathloss_product(layout.side_length_l, layout.big_radius_R0, alpha)
    note = "high-SNR factorization; " + moment.regime_note
    if config.beta1_sq < _KAPPA_LIMIT_BAND:
        note += "; pure-beamforming kappa limit"
    return _clamp(kappa(config) * moment.value, note)


def p0_oma_analytic(l: float, alpha: float, eta0: float, rho: float) -> AnalyticOutage:
    """Cell-edge outage of the OMA benchmark, centroid regime.

    The combined SNR is Erlang-3 in the equal-distance limit, so the
    outage is the regularized lower incomplete gamma P(3, x) with
    x = eta0 l^alpha 3^{-alpha/2 - 1} / rho, evaluated in that form to
    stay accurate when x is tiny.
    """
    if rho <= 0:
        raise ValueError(f"transmit SNR must be positive, got {rho}")
    if eta0 < 0:
        raise ValueError(f"threshold must be nonnegative, got {eta0}")
    if eta0 == 0.0:
        return AnalyticOutage(0.0, "zero target rate", 0.0)
    x = 3.0 ** (-alpha / 2.0 - 1.0) * eta0 * l**alpha / rho
    value = regularized_gamma_p(3.0, x)
    return _clamp(value, "centroid regime; Erlang-3 tail in stable form")


def _near_user_margin(config: SchemeConfig, j: int) -> float:
    # Decoding succeeds when |h_jj|^2 clears M_j * (I + 1/rho) with
    # M_j = max(eta0 / (beta0^2 - beta1^2 eta0), eta_j / beta1^2) in the
    # isolated-cell regime: the max merges the SIC and own-message stages.
    eta = thresholds(config)
    b0, b1 = config.beta0_sq, config.beta1_sq
    m_sic = eta[0] / (b0 - b1 * eta[0]) if eta[0] > 0 else 0.0
    if eta[j] == 0.0:
        m_own = 0.0
    elif b1 == 0.0:
        m_own = math.inf
    else:
        m_own = eta[j] / b1
    return max(m_sic, m_own)


def pj_noma_analytic(layout: NetworkLayout, config: SchemeConfig, alpha: float, j: int) -> AnalyticOutage:
    """Near-user outage in the isolated-cell regime (cross-links ~ l^-alpha).

    Valid when the near disc is small against the triangle; a disc radius
    above l/10 draws a warning since the first-order cross-link expansion
    degrades.
    """
    if j not in (1, 2, 3):
        raise ValueError(f"near-user index must be 1, 2 or 3, got {j}")
    l = layout.side_length_l
    R = layout.near_radii_Rj[j - 1]
    rho = config.transmit_snr_rho
    note = "isolated-cell first-order expansion"
    if R > l / 10.0:
        warnings.warn(f"near radius {R} above l/10: cross-link expansion degrades")
        note += "; near disc large against triangle (R > l/10)"
    M = _near_user_margin(config, j)
    if M == 0.0:
        return AnalyticOutage(0.0, "zero target rates", 0.0)
    if math.isinf(M):
        return AnalyticOutage(1.0, "no power on the near message (beta1 = 0)", 1.0)
    x = M * R**alpha / rho
    t = 2.0 / alpha
    g1 = lower_incomplete_gamma(t, x)
    g2 = lower_incomplete_gamma(t + 1.0, x)
    num = 2.0 * rho**t * M * g1 - (4.0 * config.beta1_sq * M * rho ** (t + 1.0) / l**alpha) * g2
    value = 1.0 - num / (alpha * M ** (t + 1.0) * R * R)
    return _clamp(value, note)


def pj_noma_interference_analytic(
    layout: NetworkLayout,
    config: SchemeConfig,
    interference_config: InterferenceConfig,
    alpha: float,
    j: int,
    n_nodes: int = DEFAULT_QUADRATURE_NODES,
) -> AnalyticOutage:
    """Near-user outage with a Poisson interferer field, by quadrature.

    Averages the conditional success probability over the near disc with
    n_nodes Gauss-Chebyshev nodes; the field enters through its Laplace
    transform, which needs alpha > 2.
    """
    if alpha <= 2.0:
        raise ValueError(f"interference average needs alpha > 2, got {alpha}")
    if n_nodes < 1:
        raise ValueError(f"need at least one quadrature node, got {n_nodes}")
    if j not in (1, 2, 3):
        raise ValueError(f"near-user index must be 1, 2 or 3, got {j}")
    l = layout.side_length_l
    R = layout.near_radii_Rj[j - 1]
    rho = config.transmit_snr_rho
    note = f"Gauss-Chebyshev average over the near disc (n={n_nodes})"
    if R > l / 10.0:
        warnings.warn(f"near radius {R} above l/10: cross-link expansion degrades")
        note += "; near disc large against triangle (R > l/10)"
    M = _near_user_margin(config, j)
    if M == 0.0:
        return AnalyticOutage(0.0, "zero target rates", 0.0)
    if math.isinf(M):
        return AnalyticOutage(1.0, "no power on the near message (beta1 = 0)", 1.0)
    lam = interference_config.intensity_lambda_I
    rho_i = interference_config.power_ratio_rho_I
    t = 2.0 / alpha
    ppp_coef = 0.0
    if lam > 0.0 and rho_i > 0.0:
        ppp_coef = 2.0 * math.pi * lam * (M * rho_i) ** t * beta_function(t, 1.0 - t) / alpha
    n = np.arange(1, n_nodes + 1)
    theta = np.cos((2.0 * n - 1.0) * math.pi / (2.0 * n_nodes))
    x = R * theta / 2.0 + R / 2.0
    f = (x - (2.0 * config.beta1_sq * M / l**alpha) * x ** (alpha + 1.0)) * np.exp(
        -(M / rho) * x**alpha - ppp_coef * x * x
    )
    success = (math.pi / (n_nodes * R)) * float((np.sqrt(1.0 - theta * theta) * f).sum())
    return _clamp(1.0 - success, note)


def brute_force_p0_oracle(
    layout: NetworkLayout,
    config: SchemeConfig,
    alpha: float,
    trials: int,
    rng: np.random.Generator,
) -> float:
    """Direct MC of the cell-edge outage, independent of the simulator.

    Samples positions uniformly on the lens and Rayleigh fades per link,
    then counts strict SINR misses.  Kept deliberately plain so it can
    serve as a second implementation against both the closed form and the
    batched simulator.
    """
    if trials < 10**4:
        raise ValueError(f"oracle needs at least 1e4 trials, got {trials}")
    b0, b1 = config.beta0_sq, config.beta1_sq
    eta0, rho = _eta0(config), config.transmit_snr_rho
    pos = layout.bs_array()
    failures = 0
    chunk = 10**6
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        pts = sample_cell_edge_batch(layout, rng, n)
        d = np.sqrt(((pts[:, None, :] - pos[None, :, :]) ** 2).sum(axis=2))
        L = np.maximum(d, 1.0) ** alpha
        g = (rng.standard_normal((n, 3)) + 1j * rng.standard_normal((n, 3))) / np.sqrt(2.0)
        mags = np.abs(g) / np.sqrt(L)
        num = b0 * mags.sum(axis=1) ** 2
        den = b1 * (mags**2).sum(axis=1) + 1.0 / rho
        failures += int((num / den < eta0).sum())
        done += n
    return failures / trials
