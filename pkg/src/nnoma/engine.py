"""Batched Monte Carlo outage estimation.

One chunk = up to 65536 trials driven by its own counter-based RNG stream
keyed by (master seed, scheme id, power index, chunk index).  Chunks are
embarrassingly parallel and aggregate by integer counting, so estimates are
bit-identical regardless of thread count, and runs that share a master seed
share placements and fades across parameter values that do not enter the
stream key (power allocation, side length at fixed R0/l): that is what
makes paired monotonicity comparisons low-noise.

Per chunk the draw order is fixed: cell-edge placement, cell-edge fades,
cell-edge interference, then near-user fades, placements, and interference.
Running with edge_only=True consumes exactly the prefix of that stream, so
cell-edge results match the full run bit for bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._backend import get_kernel
from ._kernels_py import WANT_BS_BEST, WANT_BS_FIXED, WANT_EDGE, WANT_NEAR, WANT_OMA
from .channel import path_loss
from .geometry import NetworkLayout, distance_matrix_batch, sample_cell_edge_batch, sample_near_user_batch
from .interference import (
    InterferenceConfig,
    interference_power_batch,
    sample_shared_fields,
    shared_interference_power,
)
from .schemes import SchemeConfig, thresholds

CHUNK_TRIALS = 65536

SCHEME_IDS = {"n-noma": 0, "oma": 1, "noma-no-comp": 2, "noma-best-bs": 3}
SCHEMES = tuple(SCHEME_IDS)

_WANT = {
    "n-noma": WANT_EDGE | WANT_NEAR,
    "oma": WANT_OMA,
    "noma-no-comp": WANT_BS_FIXED,
    "noma-best-bs": WANT_BS_BEST,
}
_COLUMNS = {
    "n-noma": (0, 1, 2, 3),
    "oma": (4,),
    "noma-no-comp": (5,),
    "noma-best-bs": (6,),
}


@dataclass(frozen=True)
class MCResult:
    """Aggregated outage counts of one (scheme, parameter point) run.

    counts[k] is the number of outage trials for user user_indices[k];
    flags, when kept, is the (trials, len(user_indices)) per-trial boolean
    matrix in trial order.
    """

    scheme: str
    counts: np.ndarray
    trials: int
    user_indices: tuple[int, ...]
    flags: np.ndarray | None = None

    @property
    def p_hat(self) -> np.ndarray:
        return self.counts / self.trials

    @property
    def ci_half_width(self) -> np.ndarray:
        """95% normal-approximation half width 1.96 sqrt(p(1-p)/n)."""
        p = self.p_hat
        return 1.96 * np.sqrt(p * (1.0 - p) / self.trials)


def _chunk_rng(seed: int, scheme: str, power_index: int, chunk_index: int) -> np.random.Generator:
    key = np.random.SeedSequence((seed, SCHEME_IDS[scheme], power_index, chunk_index))
    return np.random.Generator(np.random.Philox(key))


def _run_chunk(
    scheme: str,
    layout: NetworkLayout,
    alpha: float,
    scheme_cfg: SchemeConfig,
    inter_cfg: InterferenceConfig | None,
    shared_interference: bool,
    n: int,
    rng: np.random.Generator,
    want: int,
    columns: tuple[int, ...],
    kernel,
    keep_flags: bool,
):
    m = 4 if want & WANT_NEAR else 1

    pts0 = sample_cell_edge_batch(layout, rng, n)
    z0 = rng.standard_normal((n, 3, 2))
    inter = np.zeros((n, 4))
    shared = None
    if inter_cfg is not None:
        if shared_interference:
            shared = sample_shared_fields(inter_cfg, n, rng)
            inter[:, 0] = shared_interference_power(shared, inter_cfg, pts0, alpha, rng)
        else:
            inter[:, 0] = interference_power_batch(inter_cfg, n, alpha, rng)

    if m == 4:
        znear = rng.standard_normal((n, 3, 3, 2))
        near_pts = np.empty((n, 3, 2))
        for j in (1, 2, 3):
            near_pts[:, j - 1] = sample_near_user_batch(layout, j, rng, n)
        if inter_cfg is not None:
            for j in (1, 2, 3):
                if shared_interference:
                    inter[:, j] = shared_interference_power(
                        shared, inter_cfg, near_pts[:, j - 1], alpha, rng
                    )
                else:
                    inter[:, j] = interference_power_batch(inter_cfg, n, alpha, rng)
        users = np.concatenate([pts0[:, None, :], near_pts], axis=1)
    else:
        users = pts0[:, None, :]

    L = path_loss(distance_matrix_batch(layout, users), alpha)
    scale = 1.0 / np.sqrt(2.0 * L)
    hre = np.empty((n, 3, m))
    him = np.empty((n, 3, m))
    hre[:, :, 0] = z0[:, :, 0] * scale[:, :, 0]
    him[:, :, 0] = z0[:, :, 1] * scale[:, :, 0]
    if m == 4:
        hre[:, :, 1:] = znear[:, :, :, 0] * scale[:, :, 1:]
        him[:, :, 1:] = znear[:, :, :, 1] * scale[:, :, 1:]

    eta = thresholds(scheme_cfg)
    inv_rho = 1.0 / scheme_cfg.transmit_snr_rho
    flags = kernel(hre, him, inter, scheme_cfg.beta0_sq, scheme_cfg.beta1_sq, inv_rho, eta, want)
    picked = flags[:, list(columns)]
    counts = picked.sum(axis=0, dtype=np.int64)
    return counts, (picked.astype(bool) if keep_flags else None)


def estimate_outage(
    scheme: str,
    layout: NetworkLayout,
    alpha: float,
    scheme_cfg: SchemeConfig,
    inter_cfg: InterferenceConfig | None = None,
    *,
    trials: int,
    seed: int,
    power_index: int = 0,
    threads: int = 1,
    edge_only: bool = False,
    shared_interference: bool = False,
    return_flags: bool = False,
    backend: str | None = None,
) -> MCResult:
    """Monte Carlo outage probabilities for one scheme at one operating point.

    power_index distinguishes points of a sweep so they draw disjoint
    streams; edge_only skips the near-user workload of the full scheme
    while reproducing the cell-edge column exactly.
    """
    if scheme not in SCHEME_IDS:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    if threads < 1:
        raise ValueError(f"threads must be positive, got {threads}")

    want = _WANT[scheme]
    columns = _COLUMNS[scheme]
    if edge_only and scheme == "n-noma":
        want = WANT_EDGE
        columns = (0,)
    kernel = get_kernel(backend)

    n_chunks = math.ceil(trials / CHUNK_TRIALS)
    sizes = [min(CHUNK_TRIALS, trials - c * CHUNK_TRIALS) for c in range(n_chunks)]

    def job(c: int):
        return _run_chunk(
            scheme,
            layout,
            alpha,
            scheme_cfg,
            inter_cfg,
            shared_interference,
            sizes[c],
            _chunk_rng(seed, scheme, power_index, c),
            want,
            columns,
            kernel,
            return_flags,
        )

    if threads == 1 or n_chunks == 1:
        results = [job(c) for c in range(n_chunks)]
    else:
        with ThreadPoolExecutor(max_workers=min(threads, n_chunks)) as pool:
            results = list(pool.map(job, range(n_chunks)))

    counts = np.zeros(len(columns), dtype=np.int64)
    for c_counts, _ in results:
        counts += c_counts
    flags = np.concatenate([f for _, f in results], axis=0) if return_flags else None

    user_indices = columns if scheme == "n-noma" and not edge_only else (0,)
    return MCResult(scheme, counts, trials, user_indices, flags)
