"""Reference outage kernel in vectorized numpy.

The compiled kernel in _kernels_cy mirrors this file operation for
operation: identical expression trees, identical fixed-order three-term
sums (a + b) + c, magnitudes as sqrt(re*re + im*im) rather than hypot, and
division-form SINR comparisons.  Together with contraction-free compilation
of the extension this makes the two backends bit-identical, which the test
suite asserts.  Any change here must be replicated there.
"""

from __future__ import annotations

import numpy as np

WANT_EDGE = 1
WANT_NEAR = 2
WANT_OMA = 4
WANT_BS_FIXED = 8
WANT_BS_BEST = 16

N_FLAG_COLUMNS = 7

# cross-link column pairs, ascending BS order, excluding the serving BS
_CROSS = {0: (1, 2), 1: (0, 2), 2: (0, 1)}


def outage_flags(
    hre: np.ndarray,
    him: np.ndarray,
    inter: np.ndarray,
    beta0_sq: float,
    beta1_sq: float,
    inv_rho: float,
    eta: np.ndarray,
    want: int,
) -> np.ndarray:
    """Per-trial outage flags for all schemes sharing one channel draw.

    hre and him are (n, 3, m) real and imaginary channel coefficients from
    BS i to user j (column 0 the cell-edge user, columns 1..3 near users;
    m is 1 when only the cell-edge user is simulated).  inter is (n, 4)
    aggregate normalized interference per user.  eta holds the four SINR
    targets.  Output is (n, 7) uint8 with columns: 0 cell-edge, 1..3 near
    users, 4 OMA, 5 single-BS fixed, 6 single-BS best; only columns
    selected by the `want` bitmask are filled.
    """
    n, _, m = hre.shape
    if want & WANT_NEAR and m != 4:
        raise ValueError("near-user flags need all four user columns")
    flags = np.zeros((n, N_FLAG_COLUMNS), dtype=np.uint8)
    eta0 = float(eta[0])

    re0 = hre[:, :, 0]
    im0 = him[:, :, 0]
    p0 = re0 * re0 + im0 * im0
    q0 = (p0[:, 0] + p0[:, 1]) + p0[:, 2]
    I0 = inter[:, 0]

    if want & WANT_EDGE:
        m0 = np.sqrt(p0)
        s = (m0[:, 0] + m0[:, 1]) + m0[:, 2]
        num = beta0_sq * (s * s)
        den = (beta1_sq * q0 + I0) + inv_rho
        flags[:, 0] = num / den < eta0

    if want & WANT_OMA:
        num = 3.0 * q0
        den = I0 + inv_rho
        flags[:, 4] = num / den < eta0

    if want & WANT_BS_FIXED:
        num = (3.0 * beta0_sq) * p0[:, 0]
        cross = p0[:, 1] + p0[:, 2]
        den = ((beta1_sq * p0[:, 0] + cross) + I0) + inv_rho
        flags[:, 5] = num / den < eta0

    if want & WANT_BS_BEST:
        b = np.argmax(p0, axis=1)
        pb = np.where(b == 0, p0[:, 0], np.where(b == 1, p0[:, 1], p0[:, 2]))
        cross = np.where(
            b == 0, p0[:, 1] + p0[:, 2], np.where(b == 1, p0[:, 0] + p0[:, 2], p0[:, 0] + p0[:, 1])
        )
        num = (3.0 * beta0_sq) * pb
        den = ((beta1_sq * pb + cross) + I0) + inv_rho
        flags[:, 6] = num / den < eta0

    if want & WANT_NEAR:
        m0 = np.sqrt(p0)
        cre = re0 / m0
        cim = -im0 / m0
        for j in (1, 2, 3):
            rej = hre[:, :, j]
            imj = him[:, :, j]
            pj = rej * rej + imj * imj
            qj = (pj[:, 0] + pj[:, 1]) + pj[:, 2]
            Ij = inter[:, j]
            tre = cre * rej - cim * imj
            tim = cre * imj + cim * rej
            sre = (tre[:, 0] + tre[:, 1]) + tre[:, 2]
            sim = (tim[:, 0] + tim[:, 1]) + tim[:, 2]
            num_sic = beta0_sq * (sre * sre + sim * sim)
            den_c = (beta1_sq * qj + Ij) + inv_rho
            sic_fail = num_sic / den_c < eta0
            c1, c2 = _CROSS[j - 1]
            cross = pj[:, c1] + pj[:, c2]
            num_own = beta1_sq * pj[:, j - 1]
            den_own = (beta1_sq * cross + Ij) + inv_rho
            own_fail = num_own / den_own < float(eta[j])
            flags[:, j] = sic_fail | own_fail

    return flags
