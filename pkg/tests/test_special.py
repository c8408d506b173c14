"""Incomplete gamma and Beta evaluators against scipy references."""

import math

import numpy as np
import pytest
from scipy import special

from nnoma import beta_function, lower_incomplete_gamma
from nnoma._special import regularized_gamma_p


def test_regularized_gamma_known_values():
    # s=1 closed form 1 - e^-x
    for x in (0.1, 1.0, 2.0, 10.0):
        assert regularized_gamma_p(1.0, x) == pytest.approx(-math.expm1(-x), rel=1e-13)
    assert regularized_gamma_p(3.0, 0.0) == 0.0
    assert regularized_gamma_p(3.0, 1e4) == pytest.approx(1.0, rel=1e-13)


def test_regularized_gamma_against_scipy_grid():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(2000):
        s = float(rng.uniform(0.05, 50.0))
        x = float(rng.uniform(0.0, 100.0))
        ours = regularized_gamma_p(s, x)
        ref = float(special.gammainc(s, x))
        worst = max(worst, abs(ours - ref) / max(ref, 1e-300))
    assert worst < 1e-11


def test_lower_incomplete_gamma_examples():
    assert lower_incomplete_gamma(1.0, 2.0) == pytest.approx(1.0 - math.exp(-2.0), rel=1e-12)
    assert lower_incomplete_gamma(0.5, 745.0) == pytest.approx(math.sqrt(math.pi), rel=1e-12)
    ref = float(special.gammainc(2.0 / 3.0, 1.7)) * math.gamma(2.0 / 3.0)
    assert lower_incomplete_gamma(2.0 / 3.0, 1.7) == pytest.approx(ref, rel=1e-12)
    with pytest.raises(ValueError):
        lower_incomplete_gamma(0.0, 1.0)
    with pytest.raises(ValueError):
        lower_incomplete_gamma(1.0, -0.5)


def test_beta_function_against_scipy():
    rng = np.random.default_rng(3)
    for _ in range(500):
        p = float(rng.uniform(0.02, 30.0))
        q = float(rng.uniform(0.02, 30.0))
        assert beta_function(p, q) == pytest.approx(float(special.beta(p, q)), rel=1e-12)
    # the Laplace-transform instance B(2/alpha, 1 - 2/alpha) = pi/sin(2 pi/alpha)
    for alpha in (2.5, 3.0, 4.0, 6.0):
        ref = math.pi / math.sin(2.0 * math.pi / alpha)
        assert beta_function(2.0 / alpha, 1.0 - 2.0 / alpha) == pytest.approx(ref, rel=1e-12)
    with pytest.raises(ValueError):
        beta_function(0.0, 1.0)
