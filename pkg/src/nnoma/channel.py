"""Channel model: Rayleigh small-scale fading over bounded path loss.

The link from BS i to user j has coefficient h_ij = g_ij / sqrt(L_ij) with
g_ij ~ CN(0, 1) i.i.d. and L_ij = max(d_ij, 1)^alpha.  The 1 m floor keeps
the path loss bounded below by 1 so that near users arbitrarily close to
their BS do not produce unbounded receive power.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import NetworkLayout, UserPlacement, distances

D_MIN = 1.0


def path_loss(d: np.ndarray | float, alpha: float) -> np.ndarray | float:
    """Bounded path loss L = max(d, 1)^alpha."""
    if alpha < 2.0:
        raise ValueError(f"path-loss exponent must be >= 2, got {alpha}")
    if np.any(np.asarray(d) == 0.0):
        warnings.warn(f"zero distance clamped to the {D_MIN} m floor")
    return np.maximum(d, D_MIN) ** alpha


def sample_complex_gaussian(rng: np.random.Generator, shape=()) -> np.ndarray:
    """CN(0, 1) samples: real and imaginary parts i.i.d. N(0, 1/2)."""
    z = rng.standard_normal(tuple(np.atleast_1d(shape)) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the 3 x 4 downlink channel.

    gains_h[i, j] is the complex coefficient from BS i (0..2) to user j,
    where column 0 is the cell-edge user and columns 1..3 the near users;
    pathloss_L holds the corresponding L_ij.
    """

    gains_h: np.ndarray
    pathloss_L: np.ndarray
    placement: UserPlacement


def realize_channel(
    layout: NetworkLayout,
    placement: UserPlacement,
    alpha: float,
    rng: np.random.Generator,
) -> ChannelRealization:
    """Draw fading for a fixed placement and combine with path loss."""
    d = distances(layout, placement)
    L = path_loss(d, alpha)
    g = sample_complex_gaussian(rng, (3, 4))
    return ChannelRealization(g / np.sqrt(L), L, placement)
