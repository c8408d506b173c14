"""Network geometry: BS placement, the lens region, user sampling, distances.

Three base stations sit on an equilateral triangle of side l with the
centroid at the origin and BS 1 on the positive y axis.  The cell-edge user
is uniform on the lens-shaped intersection A of the three discs of radius
R0 centered at the BSs, which is nonempty and bounded for
sqrt(3)/3 * l <= R0 <= sqrt(3)/2 * l.  Near user j is uniform on the disc of
radius R_j around BS j.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

SQRT3 = math.sqrt(3.0)

# lambda(k) has a removable singularity at k = sqrt(3)/3 where both the
# bracket and the lens area vanish; below this offset the closed form is
# noise-dominated in double precision and the limit value 3**-3 is exact
# to ~4e-12.
_LAMBDA_LIMIT_BAND = 1e-4


@dataclass(frozen=True)
class Point2D:
    x: float
    y: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


def bs_positions(l: float) -> tuple[Point2D, Point2D, Point2D]:
    """Vertices of the equilateral triangle of side l, centroid at origin.

    BS 1 is placed on the positive y axis at the circumradius l/sqrt(3);
    BS 2 and BS 3 follow counterclockwise.
    """
    if l <= 0:
        raise ValueError(f"side length must be positive, got {l}")
    r = l / SQRT3
    return (
        Point2D(0.0, r),
        Point2D(-l / 2.0, -r / 2.0),
        Point2D(l / 2.0, -r / 2.0),
    )


@dataclass(frozen=True)
class NetworkLayout:
    """Fixed geometry of one experiment: side length, radii, BS positions."""

    side_length_l: float
    big_radius_R0: float
    near_radii_Rj: tuple[float, float, float]
    bs_positions: tuple[Point2D, Point2D, Point2D] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        l, R0 = self.side_length_l, self.big_radius_R0
        if l <= 0:
            raise ValueError(f"side_length_l must be positive, got {l}")
        lo, hi = SQRT3 / 3.0 * l, SQRT3 / 2.0 * l
        if not (lo <= R0 <= hi):
            raise ValueError(
                f"big_radius_R0 must lie in [sqrt(3)/3*l, sqrt(3)/2*l] = "
                f"[{lo:.6g}, {hi:.6g}], got {R0}"
            )
        if any(R <= 0 for R in self.near_radii_Rj):
            raise ValueError(f"near radii must be positive, got {self.near_radii_Rj}")
        if self.bs_positions is None:
            object.__setattr__(self, "bs_positions", bs_positions(l))
        pos = self.bs_array()
        side = np.linalg.norm(pos - np.roll(pos, 1, axis=0), axis=1)
        if not (np.allclose(side, l, rtol=1e-9) and np.allclose(pos.mean(0), 0.0, atol=1e-9 * l)):
            raise ValueError("bs_positions must form an equilateral triangle of side l centered at the origin")

    def bs_array(self) -> np.ndarray:
        """BS coordinates as a (3, 2) array."""
        return np.array([[p.x, p.y] for p in self.bs_positions])


def make_layout(l: float, R0: float, Rj) -> NetworkLayout:
    """Build a layout from the side length, lens radius, and near radii.

    Rj may be a scalar (shared by the three near discs) or a length-3
    sequence.
    """
    radii = (float(Rj),) * 3 if np.isscalar(Rj) else tuple(float(r) for r in Rj)
    if len(radii) != 3:
        raise ValueError(f"need 1 or 3 near radii, got {len(radii)}")
    return NetworkLayout(float(l), float(R0), radii)


@dataclass(frozen=True)
class UserPlacement:
    cell_edge: Point2D
    near_users: tuple[Point2D, Point2D, Point2D]


def intersection_area(l: float, R0: float) -> float:
    """Area of the lens A where all three discs of radius R0 overlap.

    S_A = 3 R0^2 (pi/3 - arcsin(l/2R0)) - sqrt(3) l R0 sin(pi/3 - arcsin(l/2R0)).
    Zero at R0 = sqrt(3)/3 * l, where the discs meet only at the centroid.
    """
    if l <= 0:
        raise ValueError(f"side length must be positive, got {l}")
    if not (SQRT3 / 3.0 * l <= R0 <= SQRT3 / 2.0 * l):
        raise ValueError(
            f"R0 = {R0} outside admissible range [{SQRT3 / 3.0 * l:.6g}, {SQRT3 / 2.0 * l:.6g}]"
        )
    asin = math.asin(min(1.0, max(-1.0, l / (2.0 * R0))))
    return 3.0 * R0 * R0 * (math.pi / 3.0 - asin) - SQRT3 * l * R0 * math.sin(math.pi / 3.0 - asin)


def lambda_of_k(k: float) -> float:
    """Normalized mean path-loss product E{L10 L20 L30} / l^6 at alpha = 2.

    k = R0/l in [sqrt(3)/3, sqrt(3)/2].  At the left endpoint the expression
    is 0/0 with limit 3**-3 (the user is pinned to the centroid where every
    squared distance is l^2/3); the limit is returned inside a small band
    where the direct formula loses all significance.
    """
    lo, hi = SQRT3 / 3.0, SQRT3 / 2.0
    if not (lo <= k <= hi):
        raise ValueError(f"k = {k} outside [{lo:.9f}, {hi:.9f}]")
    if k - lo < _LAMBDA_LIMIT_BAND:
        return 27.0 ** -1.0
    asin = math.asin(min(1.0, max(-1.0, 1.0 / (2.0 * k))))
    k2 = k * k
    k4 = k2 * k2
    k6 = k4 * k2
    k8 = k4 * k4
    den = 192.0 * k * (math.pi * k - 3.0 * k * asin - SQRT3 * math.cos(asin + math.pi / 6.0))
    num = (
        48.0 * math.pi * k8
        - 3.0 * math.sqrt(4.0 - 1.0 / k2) * (84.0 * k6 + 102.0 * k4 + 2.0 * k2 + 1.0) * k
        + SQRT3
        + 192.0 * (SQRT3 + math.pi) * k6
        + 24.0 * (3.0 * SQRT3 + 4.0 * math.pi) * k4
        - 144.0 * (k4 + 4.0 * k2 + 2.0) * k4 * asin
    )
    return num / den


def _lens_bounding_box(layout: NetworkLayout) -> tuple[float, float, float, float]:
    """Axis-aligned bounding box (xmin, xmax, ymin, ymax) of the lens A.

    A is contained in the disc of radius R0 - circumradius + eps around the
    centroid only when R0 is near the lower bound, so instead use the exact
    extent: every point of A is within R0 of all three BSs, hence within the
    intersection of the three discs' boxes.
    """
    pos = layout.bs_array()
    R0 = layout.big_radius_R0
    xmin = (pos[:, 0] - R0).max()
    xmax = (pos[:, 0] + R0).min()
    ymin = (pos[:, 1] - R0).max()
    ymax = (pos[:, 1] + R0).min()
    return xmin, xmax, ymin, ymax


def sample_cell_edge_batch(layout: NetworkLayout, rng: np.random.Generator, n: int) -> np.ndarray:
    """n cell-edge positions uniform on A, shape (n, 2).

    Rejection sampling from the bounding box of A; a candidate is accepted
    iff it lies within R0 of all three BSs.  At R0 exactly on the lower
    bound A has zero measure and the centroid is returned for every sample.
    """
    l, R0 = layout.side_length_l, layout.big_radius_R0
    if R0 <= SQRT3 / 3.0 * l * (1.0 + 1e-12):
        warnings.warn("R0 at the lower bound: lens has zero area, returning the centroid")
        return np.zeros((n, 2))
    pos = layout.bs_array()
    xmin, xmax, ymin, ymax = _lens_bounding_box(layout)
    out = np.empty((n, 2))
    need = np.arange(n)
    while need.size:
        u = rng.random((need.size, 2))
        cand = np.empty_like(u)
        cand[:, 0] = xmin + u[:, 0] * (xmax - xmin)
        cand[:, 1] = ymin + u[:, 1] * (ymax - ymin)
        d2 = ((cand[:, None, :] - pos[None, :, :]) ** 2).sum(axis=2)
        ok = (d2 <= R0 * R0).all(axis=1)
        out[need[ok]] = cand[ok]
        need = need[~ok]
    return out


def sample_cell_edge(layout: NetworkLayout, rng: np.random.Generator) -> Point2D:
    """One cell-edge position uniform on the lens A."""
    p = sample_cell_edge_batch(layout, rng, 1)[0]
    return Point2D(p[0], p[1])


def sample_near_user_batch(
    layout: NetworkLayout, bs_index: int, rng: np.random.Generator, n: int
) -> np.ndarray:
    """n positions uniform on the disc of radius R_j around BS bs_index (1..3)."""
    if bs_index not in (1, 2, 3):
        raise ValueError(f"bs_index must be 1, 2 or 3, got {bs_index}")
    center = layout.bs_positions[bs_index - 1]
    R = layout.near_radii_Rj[bs_index - 1]
    u = rng.random((n, 2))
    r = R * np.sqrt(u[:, 0])
    th = 2.0 * np.pi * u[:, 1]
    return np.stack([center.x + r * np.cos(th), center.y + r * np.sin(th)], axis=1)


def sample_near_user(layout: NetworkLayout, bs_index: int, rng: np.random.Generator) -> Point2D:
    """One near-user position uniform on disc bs_index (radial CDF is r^2/R^2)."""
    p = sample_near_user_batch(layout, bs_index, rng, 1)[0]
    return Point2D(p[0], p[1])


def sample_placement(layout: NetworkLayout, rng: np.random.Generator) -> UserPlacement:
    """One joint placement: cell-edge user plus the three near users."""
    edge = sample_cell_edge(layout, rng)
    near = tuple(sample_near_user(layout, j, rng) for j in (1, 2, 3))
    return UserPlacement(edge, near)


def distances(layout: NetworkLayout, placement: UserPlacement) -> np.ndarray:
    """Distance matrix d[i, j] from BS i (rows, 0..2) to user j (cols, 0..3).

    Column 0 is the cell-edge user; columns 1..3 are the near users.
    """
    pos = layout.bs_array()
    users = np.array(
        [[placement.cell_edge.x, placement.cell_edge.y]]
        + [[p.x, p.y] for p in placement.near_users]
    )
    diff = pos[:, None, :] - users[None, :, :]
    return np.sqrt((diff * diff).sum(axis=2))


def distance_matrix_batch(layout: NetworkLayout, users: np.ndarray) -> np.ndarray:
    """Distances from each BS to each user column, vectorized over trials.

    users has shape (n, m, 2); the result has shape (n, 3, m).
    """
    pos = layout.bs_array()
    diff = pos[None, :, None, :] - users[:, None, :, :]
    return np.sqrt((diff * diff).sum(axis=3))
