"""Closed-form outage expressions: pinned values, oracles, regime guards."""

import math

import numpy as np
import pytest
from scipy import integrate, special

from nnoma import (
    InterferenceConfig,
    SchemeConfig,
    brute_force_p0_oracle,
    edge_outage_coefficients,
    expected_pathloss_product,
    kappa,
    lambda_of_k,
    make_layout,
    p0_noma_analytic,
    p0_oma_analytic,
    pj_noma_analytic,
    pj_noma_interference_analytic,
)
from nnoma.engine import estimate_outage
from nnoma.geometry import SQRT3

RNG = np.random.default_rng
RATES_II = (2.0, 1.0, 1.0, 1.0)


def _rho(dbm):
    return 10.0 ** (dbm / 10.0) / 1e-10


def test_coefficient_invariants():
    cfg = SchemeConfig(0.8, 0.2, RATES_II, 1e8)
    co = edge_outage_coefficients(cfg)
    assert co.a > 0 and co.b > 0 and co.c > 0 and co.d > 0
    assert co.phi < co.phi1


def test_kappa_pinned_scaling_constants():
    cases = [
        (0.8, 3.0, 1.9718151366592471, 1e-9),
        (0.9, 1.0, 0.0176536851, 1e-7),
        (0.7, 1.0, 0.0601972260, 1e-7),
    ]
    for b0, eta0, const, tol in cases:
        r0 = math.log2(1.0 + eta0)
        cfg = SchemeConfig(b0, 1.0 - b0, (r0, 1.0, 1.0, 1.0), 1e8)
        assert kappa(cfg) * 1e8**3 == pytest.approx(const, rel=tol)


def test_kappa_rho_cubed_scaling_is_exact():
    vals = []
    for rho in (1e6, 1e8, 1e10, 1e12):
        cfg = SchemeConfig(0.8, 0.2, RATES_II, rho)
        vals.append(kappa(cfg) * rho**3)
    assert max(vals) / min(vals) - 1.0 < 1e-11


def test_kappa_against_2d_quadrature():
    b0, b1, eta0, rho = 0.8, 0.2, 3.0, 1e6
    a = b0 * b1 * eta0 - b1**2 * eta0**2
    b = 3.0 * b0 * b1 * eta0 - b1**2 * eta0**2
    c = (b0 - b1 * eta0) * eta0 / rho
    phi = math.sqrt(eta0 / (rho * (2.0 * b0 - b1 * eta0)))

    def integrand(u, v):
        x = (math.sqrt(a * u * u + b * v * v + c) - math.sqrt(2.0) * b0 * v) / (b0 - b1 * eta0)
        return x * x * (v * v - u * u)

    val, _ = integrate.dblquad(integrand, 0, phi, lambda v: 0, lambda v: v,
                               epsabs=1e-18, epsrel=1e-11)
    cfg = SchemeConfig(b0, b1, RATES_II, rho)
    assert kappa(cfg) == pytest.approx(4.0 * val, rel=1e-6)


def test_kappa_beamforming_limit_branch():
    eta0, rho = 3.0, 1e8
    below = SchemeConfig(1.0 - 2.9e-5, 2.9e-5, RATES_II, rho)
    above = SchemeConfig(1.0 - 3.1e-5, 3.1e-5, RATES_II, rho)
    assert kappa(below) == pytest.approx(kappa(above), rel=1e-3)
    tiny = SchemeConfig(1.0 - 1e-6, 1e-6, RATES_II, rho)
    assert kappa(tiny) == pytest.approx((eta0 / rho) ** 3 / 90.0, rel=1e-9)


def test_kappa_zero_threshold():
    cfg = SchemeConfig(0.8, 0.2, (0.0, 1.0, 1.0, 1.0), 1e8)
    assert kappa(cfg) == 0.0


def test_pathloss_moment_alpha2():
    assert expected_pathloss_product(400.0, 250.0, 2.0).value == pytest.approx(
        151603579710849.47, rel=1e-10
    )
    moment = expected_pathloss_product(600.0, 400.0, 2.0)
    assert moment.value == pytest.approx(1721897433162051.8, rel=1e-10)
    assert "alpha=2" in moment.regime_note
    # identity with the lambda curve
    assert moment.value == pytest.approx(lambda_of_k(400.0 / 600.0) * 600.0**6, rel=1e-10)
    # MC expectation over the lens
    lay = make_layout(600.0, 400.0, 10.0)
    from nnoma.geometry import sample_cell_edge_batch

    pts = sample_cell_edge_batch(lay, RNG(3), 400_000)
    d = np.sqrt(((pts[:, None, :] - lay.bs_array()[None]) ** 2).sum(axis=2))
    L = (np.maximum(d, 1.0) ** 2).prod(axis=1)
    se = L.std() / math.sqrt(len(L))
    assert abs(moment.value - L.mean()) < 4.0 * se


def test_pathloss_moment_alpha2_degenerate_lens():
    l = 500.0
    moment = expected_pathloss_product(l, SQRT3 / 3.0 * l, 2.0)
    assert moment.value == pytest.approx(l**6 / 27.0, rel=1e-9)


def test_pathloss_moment_alpha_above_2():
    moment = expected_pathloss_product(400.0, 1.1 * 400.0 / SQRT3, 3.0)
    assert moment.value == pytest.approx(3.0**-4.5 * 400.0**9, rel=1e-12)
    assert "centroid" in moment.regime_note
    assert "wide lens" not in moment.regime_note
    wide = expected_pathloss_product(400.0, 288.0, 3.0)
    assert "wide lens" in wide.regime_note


def test_p0_noma_factorization_and_clamp():
    lay = make_layout(400.0, 1.1 * 400.0 / SQRT3, 10.0)
    cfg = SchemeConfig(0.8, 0.2, RATES_II, _rho(-16.0))
    ana = p0_noma_analytic(lay, cfg, 3.0)
    expect = kappa(cfg) * expected_pathloss_product(400.0, 1.1 * 400.0 / SQRT3, 3.0).value
    assert ana.value == pytest.approx(expect, rel=1e-12)
    assert ana.value == pytest.approx(2.3247e-4, rel=1e-4)  # pinned regression point

    low = p0_noma_analytic(lay, SchemeConfig(0.8, 0.2, RATES_II, 1.0), 3.0)
    assert low.value == 1.0
    assert low.value_pre_clamp > 1.0
    assert "clamped" in low.regime_note


def test_p0_oma_against_scipy_and_literal_form():
    for dbm, l, alpha in [(-40.0, 400.0, 3.0), (-35.0, 600.0, 2.0), (0.0, 400.0, 3.0)]:
        rho = _rho(dbm)
        x = 3.0 ** (-alpha / 2.0 - 1.0) * 3.0 * l**alpha / rho
        ref = float(special.gammainc(3.0, x))
        assert p0_oma_analytic(l, alpha, 3.0, rho).value == pytest.approx(ref, rel=1e-10)

    # printed closed form at moderate rho, before it loses precision
    l, alpha, eta0, rho = 400.0, 3.0, 3.0, 1e8
    x = 3.0 ** (-alpha / 2.0 - 1.0) * eta0 * l**alpha / rho
    z = eta0 * l**alpha
    literal = (
        math.exp(-x)
        * (-(z**2) + 2.0 * 3.0 ** (alpha + 2) * rho**2 * math.expm1(x)
           - 2.0 * 3.0 ** (alpha / 2.0 + 1.0) * eta0 * rho * l**alpha)
        / (2.0 * 3.0 ** (alpha + 2.0) * rho**2)
    )
    assert p0_oma_analytic(l, alpha, eta0, rho).value == pytest.approx(literal, rel=1e-9)


def test_pj_isolated_cell_pinned_value():
    lay = make_layout(300.0, 200.0, 20.0)
    cfg = SchemeConfig(0.8, 0.2, (0.5, 0.5, 0.5, 0.5), _rho(-30.0))
    for j in (1, 2, 3):
        assert pj_noma_analytic(lay, cfg, 4.0, j).value == pytest.approx(1.0942e-2, rel=1e-3)


def test_pj_interference_pinned_values():
    lay = make_layout(300.0, 200.0, 20.0)
    lam = 1.0 / (math.pi * 200.0**2)
    pins = [(-10.0, 6.81e-2), (-5.0, 3.91e-2), (0.0, 2.22e-2), (5.0, 1.25e-2)]
    for dbm, value in pins:
        cfg = SchemeConfig(0.8, 0.2, (0.5, 0.5, 0.5, 0.5), _rho(dbm))
        inter = InterferenceConfig(lam, 10.0 ** ((6.0 - dbm) / 10.0), 2000.0)
        ana = pj_noma_interference_analytic(lay, cfg, inter, 4.0, 1)
        assert ana.value == pytest.approx(value, rel=1e-2)


def test_pj_interference_zero_intensity_matches_isolated():
    # The closed form evaluates the zero-field integrand exactly, so the
    # quadrature must land on it.  Compared where the outage is macroscopic;
    # at tiny outage the 1 - success cancellation magnifies quadrature error.
    lay = make_layout(300.0, 200.0, 20.0)
    inter = InterferenceConfig(0.0, 1.0, 2000.0)
    cfg = SchemeConfig(0.8, 0.2, (0.5, 0.5, 0.5, 0.5), _rho(-45.0))
    iso = pj_noma_analytic(lay, cfg, 4.0, 2).value
    for n in (50, 100, 200):
        q = pj_noma_interference_analytic(lay, cfg, inter, 4.0, 2, n_nodes=n)
        assert q.value == pytest.approx(iso, rel=1e-3)
    cfg = SchemeConfig(0.8, 0.2, (0.5, 0.5, 0.5, 0.5), _rho(-40.0))
    q = pj_noma_interference_analytic(lay, cfg, inter, 4.0, 2, n_nodes=100)
    assert q.value == pytest.approx(pj_noma_analytic(lay, cfg, 4.0, 2).value, rel=1e-3)


def test_pj_interference_requires_alpha_above_2():
    lay = make_layout(300.0, 200.0, 20.0)
    cfg = SchemeConfig(0.8, 0.2, (0.5, 0.5, 0.5, 0.5), 1e8)
    inter = InterferenceConfig(1e-6, 1.0, 2000.0)
    with pytest.raises(ValueError):
        pj_noma_interference_analytic(lay, cfg, inter, 2.0, 1)


def test_pj_quadrature_node_stability():
    lay = make_layout(300.0, 200.0, 20.0)
    lam = 1.0 / (math.pi * 200.0**2)

    def value(dbm, n):
        cfg = SchemeConfig(0.8, 0.2, (0.5, 0.5, 0.5, 0.5), _rho(dbm))
        inter = InterferenceConfig(lam, 10.0 ** ((6.0 - dbm) / 10.0), 2000.0)
        return pj_noma_interference_analytic(lay, cfg, inter, 4.0, 1, n_nodes=n).value

    # coarse-vs-fine agreement deep in the converged range
    for dbm in (-45.0, -35.0):
        assert abs(value(dbm, 50) - value(dbm, 200)) / value(dbm, 200) < 1e-4
    # doubling the default node count moves the value by <0.05%
    for dbm in (-45.0, -35.0, -25.0, -15.0, -10.0):
        assert abs(value(dbm, 100) - value(dbm, 200)) / value(dbm, 200) < 5e-4


def test_pj_single_node_rule():
    lay = make_layout(300.0, 200.0, 20.0)
    cfg = SchemeConfig(0.8, 0.2, (0.5, 0.5, 0.5, 0.5), _rho(-20.0))
    lam = 1.0 / (math.pi * 200.0**2)
    rho_i = 10.0 ** (2.6)
    inter = InterferenceConfig(lam, rho_i, 2000.0)
    got = pj_noma_interference_analytic(lay, cfg, inter, 4.0, 1, n_nodes=1)

    # one node sits at R/2 with unit weight
    rho, l, R = _rho(-20.0), 300.0, 20.0
    eta = 2.0**0.5 - 1.0
    M = max(eta / (0.8 - 0.2 * eta), eta / 0.2)
    ppp = 2.0 * math.pi * lam * math.sqrt(M * rho_i) * math.pi / 4.0
    x = R / 2.0
    f = (x - (2.0 * 0.2 * M / l**4) * x**5) * math.exp(-(M / rho) * x**4 - ppp * x * x)
    # the crude one-node estimate exceeds a success of 1 and clamps
    assert got.value_pre_clamp == pytest.approx(1.0 - (math.pi / R) * f, rel=1e-12)
    assert got.value == 0.0
    assert "clamped" in got.regime_note


def test_zero_rates_give_zero_outage():
    lay = make_layout(400.0, 250.0, 10.0)
    cfg = SchemeConfig(0.8, 0.2, (0.0, 0.0, 0.0, 0.0), 1e8)
    assert p0_noma_analytic(lay, cfg, 3.0).value == 0.0
    for j in (1, 2, 3):
        assert abs(pj_noma_analytic(lay, cfg, 3.0, j).value) < 1e-10


def test_wide_near_disc_warns():
    lay = make_layout(400.0, 250.0, 80.0)
    cfg = SchemeConfig(0.8, 0.2, RATES_II, 1e8)
    with pytest.warns(UserWarning):
        pj_noma_analytic(lay, cfg, 3.0, 1)


def test_brute_force_oracle_contract_and_engine_agreement():
    lay = make_layout(400.0, 1.1 * 400.0 / SQRT3, 10.0)
    cfg = SchemeConfig(0.8, 0.2, RATES_II, _rho(-22.0))
    with pytest.raises(ValueError):
        brute_force_p0_oracle(lay, cfg, 3.0, 5000, RNG(0))
    n = 200_000
    bf = brute_force_p0_oracle(lay, cfg, 3.0, n, RNG(1))
    en = estimate_outage("n-noma", lay, 3.0, cfg, trials=n, seed=1, edge_only=True)
    p = en.p_hat[0]
    se = math.sqrt(2.0 * p * (1.0 - p) / n)
    assert abs(bf - p) < 4.0 * se
