"""Co-channel interference from a Poisson field of external transmitters.

Interferers form a homogeneous PPP of intensity lambda_I, each transmitting
at power P_I = rho_I * P_s over the same Rayleigh/bounded-path-loss channel
as the serving links.  All powers are carried normalized by P_s, so the
aggregate at a user is

    I = rho_I * sum_k |g_k|^2 / max(d_k, 1)^alpha,

which is the quantity entering the SINR denominators next to 1/rho.  The
field is truncated to a disc of window_radius around the point of interest;
at the default 2000 m the truncation effect on E[exp(-sI)] is far below
test tolerances for alpha > 2.

Each Monte Carlo trial resamples the field (fast-varying interferer
activity), and by default each user gets an independent realization; the
simulation layer exposes a flag to share interferer positions across the
four users of a trial, with per-link fades kept independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._special import beta_function
from .channel import D_MIN, sample_complex_gaussian
from .geometry import Point2D

DEFAULT_WINDOW_RADIUS = 2000.0


@dataclass(frozen=True)
class InterferenceConfig:
    """Interferer field parameters.

    intensity_lambda_I is the PPP density per square meter and
    power_ratio_rho_I the per-interferer transmit power divided by the
    serving power P_s.
    """

    intensity_lambda_I: float
    power_ratio_rho_I: float
    window_radius: float = DEFAULT_WINDOW_RADIUS

    def __post_init__(self):
        if self.intensity_lambda_I < 0:
            raise ValueError(f"intensity must be nonnegative, got {self.intensity_lambda_I}")
        if self.power_ratio_rho_I < 0:
            raise ValueError(f"power ratio must be nonnegative, got {self.power_ratio_rho_I}")
        if self.window_radius <= 0:
            raise ValueError(f"window radius must be positive, got {self.window_radius}")


@dataclass(frozen=True)
class InterferenceField:
    """One realization: interferer positions (k, 2) and their CN(0,1) fades (k,)."""

    positions: np.ndarray
    fades: np.ndarray

    def __post_init__(self):
        if len(self.positions) != len(self.fades):
            raise ValueError(
                f"positions and fades must have equal length, got "
                f"{len(self.positions)} and {len(self.fades)}"
            )


def sample_ppp(config: InterferenceConfig, center: Point2D, rng: np.random.Generator) -> InterferenceField:
    """Draw one field realization on the window disc around `center`.

    The count is Poisson with mean lambda_I * pi * window_radius^2; radii
    use the sqrt transform so points are uniform in area; each point gets
    one CN(0, 1) fade.
    """
    W = config.window_radius
    k = rng.poisson(config.intensity_lambda_I * math.pi * W * W)
    r = W * np.sqrt(rng.random(k))
    th = 2.0 * np.pi * rng.random(k)
    pos = np.stack([center.x + r * np.cos(th), center.y + r * np.sin(th)], axis=1)
    return InterferenceField(pos, sample_complex_gaussian(rng, k))


def interference_power(field: InterferenceField, user: Point2D, alpha: float, rho_I: float) -> float:
    """Aggregate normalized interference power at `user` for one field draw.

    Interferer links use the same 1 m path-loss floor as serving links.
    """
    if field.positions.shape[0] == 0:
        return 0.0
    d = np.linalg.norm(field.positions - np.array([user.x, user.y])[None, :], axis=1)
    return float(rho_I * (np.abs(field.fades) ** 2 / np.maximum(d, D_MIN) ** alpha).sum())


def interference_power_batch(
    config: InterferenceConfig, n: int, alpha: float, rng: np.random.Generator
) -> np.ndarray:
    """n independent field draws, each evaluated at its own user, shape (n,).

    With the field sampled on a disc around the user, only the radial
    coordinates matter, so no positions are formed; fade powers |g|^2 are
    drawn directly as unit exponentials.  The draw layout (one Poisson
    vector, then one uniform and one exponential vector sized by the total
    count) is kept even at zero intensity so streams line up across
    configurations.
    """
    counts = rng.poisson(config.intensity_lambda_I * math.pi * config.window_radius**2, n)
    total = int(counts.sum())
    if total == 0:
        return np.zeros(n)
    r = config.window_radius * np.sqrt(rng.random(total))
    fade = rng.exponential(1.0, total)
    contrib = fade / np.maximum(r, D_MIN) ** alpha
    owner = np.repeat(np.arange(n), counts)
    return config.power_ratio_rho_I * np.bincount(owner, weights=contrib, minlength=n)


@dataclass(frozen=True)
class SharedFieldBatch:
    """Per-trial interferer positions shared by all users of that trial."""

    counts: np.ndarray
    xy: np.ndarray
    owner: np.ndarray

    @property
    def total(self) -> int:
        return self.xy.shape[0]


def sample_shared_fields(
    config: InterferenceConfig, n: int, rng: np.random.Generator
) -> SharedFieldBatch:
    """One position realization per trial, window centered on the origin.

    Used by the share-positions mode, where the window must cover every
    user of the trial; the network span is small against the default
    window, so a common origin-centered disc serves all four.
    """
    counts = rng.poisson(config.intensity_lambda_I * math.pi * config.window_radius**2, n)
    total = int(counts.sum())
    r = config.window_radius * np.sqrt(rng.random(total))
    th = 2.0 * np.pi * rng.random(total)
    xy = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
    return SharedFieldBatch(counts, xy, np.repeat(np.arange(n), counts))


def shared_interference_power(
    batch: SharedFieldBatch,
    config: InterferenceConfig,
    user_xy: np.ndarray,
    alpha: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Aggregate power at one user per trial over the shared positions.

    user_xy has shape (n, 2); fades are drawn fresh per call, so each user
    sees the same interferer locations but independent small-scale fading.
    """
    n = user_xy.shape[0]
    if batch.total == 0:
        return np.zeros(n)
    fade = rng.exponential(1.0, batch.total)
    dx = batch.xy[:, 0] - user_xy[batch.owner, 0]
    dy = batch.xy[:, 1] - user_xy[batch.owner, 1]
    d = np.sqrt(dx * dx + dy * dy)
    contrib = fade / np.maximum(d, D_MIN) ** alpha
    return config.power_ratio_rho_I * np.bincount(batch.owner, weights=contrib, minlength=n)


def laplace_transform_analytic(s: float, config: InterferenceConfig, alpha: float) -> float:
    """E[exp(-s I)] for the untruncated field over Rayleigh fading.

    Standard PPP result exp(-2 pi lambda_I (s rho_I)^(2/alpha)
    B(2/alpha, 1 - 2/alpha) / alpha); requires alpha > 2 for the fractional
    moment to exist.  The path-loss floor is ignored here, consistent with
    treating this as a far-field expression.
    """
    if alpha <= 2.0:
        raise ValueError(f"analytic Laplace transform needs alpha > 2, got {alpha}")
    if s < 0:
        raise ValueError(f"s must be nonnegative, got {s}")
    lam = config.intensity_lambda_I
    if lam == 0.0 or config.power_ratio_rho_I == 0.0 or s == 0.0:
        return 1.0
    t = 2.0 / alpha
    expo = 2.0 * math.pi * lam * (s * config.power_ratio_rho_I) ** t * beta_function(t, 1.0 - t) / alpha
    return math.exp(-expo)
