import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from primeseries.special import EULER_GAMMA, exp_integral_e1, zeta_one_plus, zeta_series


def test_e1_at_one_matches_quadrature():
    oracle, _ = integrate.quad(lambda t: math.exp(-t) / t, 1, math.inf, epsabs=1e-14)
    assert math.isclose(exp_integral_e1(1.0), oracle, rel_tol=1e-10)
    assert math.isclose(exp_integral_e1(1.0), 0.2193839, abs_tol=1e-7)


def test_e1_large_argument():
    x = 50.0
    asym = math.exp(-x) / x * (1 - 1 / x + 2 / x**2 - 6 / x**3 + 24 / x**4)
    assert exp_integral_e1(x) <= 4e-24
    assert math.isclose(exp_integral_e1(x), asym, rel_tol=1e-6)


@given(st.floats(1e-12, 600))
@settings(max_examples=150, deadline=None)
def test_e1_matches_mpmath(x):
    assert math.isclose(exp_integral_e1(x), float(mpmath.e1(x)), rel_tol=1e-12)


def test_e1_small_argument_expansion():
    x = 1e-10
    assert math.isclose(exp_integral_e1(x), -EULER_GAMMA - math.log(x) + x, rel_tol=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0])
def test_e1_domain(x):
    with pytest.raises(ValueError):
        exp_integral_e1(x)


def test_zeta_values():
    assert math.isclose(zeta_series(2), math.pi**2 / 6, rel_tol=1e-13)
    assert math.isclose(zeta_series(2), 1.6449340668, abs_tol=1e-10)
    assert math.isclose(zeta_series(4), 1.0823232337, abs_tol=1e-10)
    assert zeta_series(10) < zeta_series(4)


@pytest.mark.parametrize("eps", [1e-6, 1e-4, 1e-2, 0.5])
def test_zeta_near_one_matches_mpmath(eps):
    assert math.isclose(zeta_one_plus(eps), float(mpmath.zeta(1 + mpmath.mpf(eps))),
                        rel_tol=1e-10)


@pytest.mark.parametrize("r", [1.0, 0.5])
def test_zeta_domain(r):
    with pytest.raises(ValueError):
        zeta_series(r)
