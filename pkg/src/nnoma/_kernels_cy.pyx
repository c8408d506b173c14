# cython: language_level=3
"""Compiled outage kernel.

Mirrors _kernels_py.outage_flags operation for operation: same expression
trees, same fixed-order three-term sums, magnitudes via sqrt(re*re + im*im),
division-form SINR comparisons.  Compiled with contraction disabled
(-ffp-contract=off) so no fused multiply-adds creep in; the test suite
asserts bit-identical output against the numpy reference.  Any change here
must be replicated there.
"""

import numpy as np

cimport cython
from libc.math cimport sqrt

WANT_EDGE = 1
WANT_NEAR = 2
WANT_OMA = 4
WANT_BS_FIXED = 8
WANT_BS_BEST = 16

N_FLAG_COLUMNS = 7

cdef int _EDGE = 1
cdef int _NEAR = 2
cdef int _OMA = 4
cdef int _BS_FIXED = 8
cdef int _BS_BEST = 16


@cython.boundscheck(False)
@cython.wraparound(False)
@cython.cdivision(True)
def outage_flags(
    double[:, :, ::1] hre,
    double[:, :, ::1] him,
    double[:, ::1] inter,
    double beta0_sq,
    double beta1_sq,
    double inv_rho,
    double[::1] eta,
    int want,
):
    """See _kernels_py.outage_flags; identical contract and semantics."""
    cdef Py_ssize_t n = hre.shape[0]
    cdef Py_ssize_t m = hre.shape[2]
    if (want & _NEAR) and m != 4:
        raise ValueError("near-user flags need all four user columns")
    out = np.zeros((n, N_FLAG_COLUMNS), dtype=np.uint8)
    cdef unsigned char[:, ::1] f = out
    cdef double eta0 = eta[0]
    cdef double three_b0 = 3.0 * beta0_sq

    cdef Py_ssize_t t, i, b
    cdef int j
    cdef double p00, p01, p02, q0, I0, Ij
    cdef double m00, m01, m02, s, num, den, t1, t2, t3
    cdef double pb, cross
    cdef double cre0, cre1, cre2, cim0, cim1, cim2
    cdef double re, im, pj0, pj1, pj2, pjj, qj
    cdef double tre0, tre1, tre2, tim0, tim1, tim2, sre, sim
    cdef bint sic_fail, own_fail
    cdef bint do_edge = want & _EDGE
    cdef bint do_near = want & _NEAR
    cdef bint do_oma = want & _OMA
    cdef bint do_fixed = want & _BS_FIXED
    cdef bint do_best = want & _BS_BEST

    with nogil:
        for t in range(n):
            p00 = hre[t, 0, 0] * hre[t, 0, 0] + him[t, 0, 0] * him[t, 0, 0]
            p01 = hre[t, 1, 0] * hre[t, 1, 0] + him[t, 1, 0] * him[t, 1, 0]
            p02 = hre[t, 2, 0] * hre[t, 2, 0] + him[t, 2, 0] * him[t, 2, 0]
            q0 = (p00 + p01) + p02
            I0 = inter[t, 0]

            if do_edge:
                m00 = sqrt(p00)
                m01 = sqrt(p01)
                m02 = sqrt(p02)
                s = (m00 + m01) + m02
                t1 = s * s
                num = beta0_sq * t1
                t1 = beta1_sq * q0
                t2 = t1 + I0
                den = t2 + inv_rho
                f[t, 0] = num / den < eta0

            if do_oma:
                num = 3.0 * q0
                den = I0 + inv_rho
                f[t, 4] = num / den < eta0

            if do_fixed:
                num = three_b0 * p00
                cross = p01 + p02
                t1 = beta1_sq * p00
                t2 = t1 + cross
                t3 = t2 + I0
                den = t3 + inv_rho
                f[t, 5] = num / den < eta0

            if do_best:
                b = 0
                pb = p00
                if p01 > pb:
                    b = 1
                    pb = p01
                if p02 > pb:
                    b = 2
                    pb = p02
                if b == 0:
                    cross = p01 + p02
                elif b == 1:
                    cross = p00 + p02
                else:
                    cross = p00 + p01
                num = three_b0 * pb
                t1 = beta1_sq * pb
                t2 = t1 + cross
                t3 = t2 + I0
                den = t3 + inv_rho
                f[t, 6] = num / den < eta0

            if do_near:
                m00 = sqrt(p00)
                m01 = sqrt(p01)
                m02 = sqrt(p02)
                cre0 = hre[t, 0, 0] / m00
                cre1 = hre[t, 1, 0] / m01
                cre2 = hre[t, 2, 0] / m02
                cim0 = (-him[t, 0, 0]) / m00
                cim1 = (-him[t, 1, 0]) / m01
                cim2 = (-him[t, 2, 0]) / m02
                for j in range(1, 4):
                    re = hre[t, 0, j]
                    im = him[t, 0, j]
                    pj0 = re * re + im * im
                    t1 = cre0 * re
                    t2 = cim0 * im
                    tre0 = t1 - t2
                    t1 = cre0 * im
                    t2 = cim0 * re
                    tim0 = t1 + t2

                    re = hre[t, 1, j]
                    im = him[t, 1, j]
                    pj1 = re * re + im * im
                    t1 = cre1 * re
                    t2 = cim1 * im
                    tre1 = t1 - t2
                    t1 = cre1 * im
                    t2 = cim1 * re
                    tim1 = t1 + t2

                    re = hre[t, 2, j]
                    im = him[t, 2, j]
                    pj2 = re * re + im * im
                    t1 = cre2 * re
                    t2 = cim2 * im
                    tre2 = t1 - t2
                    t1 = cre2 * im
                    t2 = cim2 * re
                    tim2 = t1 + t2

                    qj = (pj0 + pj1) + pj2
                    Ij = inter[t, j]
                    sre = (tre0 + tre1) + tre2
                    sim = (tim0 + tim1) + tim2
                    t1 = sre * sre
                    t2 = sim * sim
                    t3 = t1 + t2
                    num = beta0_sq * t3
                    t1 = beta1_sq * qj
                    t2 = t1 + Ij
                    den = t2 + inv_rho
                    sic_fail = num / den < eta0

                    if j == 1:
                        pjj = pj0
                        cross = pj1 + pj2
                    elif j == 2:
                        pjj = pj1
                        cross = pj0 + pj2
                    else:
                        pjj = pj2
                        cross = pj0 + pj1
                    num = beta1_sq * pjj
                    t1 = beta1_sq * cross
                    t2 = t1 + Ij
                    den = t2 + inv_rho
                    own_fail = num / den < eta[j]
                    f[t, j] = sic_fail | own_fail

    return out
