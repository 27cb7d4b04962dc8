import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import seed_with_signs
from primeseries.multiplicative import (BOUND_CONSTANT, euler_product, f_partial_sum,
                                        log_decomposition, prime_power_sum, remainder_bound,
                                        remainder_R, remainder_R_star, sieve_multiplicative,
                                        smooth_expansion_sum)
from primeseries.noise import SeedSpec, sign_at
from primeseries.primes import (enumerate_smooth_kfree, shared_table, sieve_primes,
                                squarefree_flags)

SEED = SeedSpec(20250918)


def factorize(n):
    out, d = {}, 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


TABLES = {k: sieve_multiplicative(SEED, 10**5, k) for k in (2, 3, 4)}


@pytest.fixture
def table_k2():
    return TABLES[2]


@pytest.fixture
def table_k3():
    return TABLES[3]


def test_worked_values(table_k2, table_k3):
    f = lambda p: sign_at(SEED, p)
    assert table_k2[1] == 1 and table_k3[1] == 1
    assert table_k2[12] == 0
    assert table_k2[30] == f(2) * f(3) * f(5)
    assert table_k2[6] == f(2) * f(3)
    assert table_k3[12] == f(3)
    assert table_k3[24] == 0


@given(st.integers(1, 10**5), st.sampled_from([2, 3, 4]))
@settings(max_examples=300, deadline=None)
def test_values_match_factorization(n, k):
    fac = factorize(n)
    expected = 0 if any(e >= k for e in fac.values()) else math.prod(
        sign_at(SEED, p) ** e for p, e in fac.items())
    assert TABLES[k][n] == expected


def test_support_is_squarefree(table_k2):
    assert np.array_equal(table_k2.values[1:] != 0, squarefree_flags(10**5)[1:])
    assert set(np.unique(table_k2.values[1:]).tolist()) == {-1, 0, 1}


def test_bad_table_arguments():
    with pytest.raises(ValueError):
        sieve_multiplicative(SEED, 0)
    with pytest.raises(ValueError):
        sieve_multiplicative(SEED, 10, 1)


def test_partial_sum_small_cases():
    assert f_partial_sum(sieve_multiplicative(SEED, 1), 0.3) == 1.0
    t = sieve_multiplicative(SEED, 3)
    expected = 1 + sign_at(SEED, 2) / 2 + sign_at(SEED, 3) / 3
    assert f_partial_sum(t, 0.5) == pytest.approx(expected, rel=1e-15)
    with pytest.raises(ValueError):
        f_partial_sum(t, 0.0)


def test_partial_sum_against_naive_loop():
    t = sieve_multiplicative(SEED, 10**6, 2)
    naive = 0.0
    for n, v in enumerate(t.values.tolist()):
        if v:
            naive += v * n ** -0.6
    assert abs(f_partial_sum(t, 0.1) - naive) <= 1e-10


def test_euler_examples():
    seed = seed_with_signs(p2=1, p3=-1)
    assert euler_product(seed, 0.5, 3, 2).value == pytest.approx(1.0, rel=1e-15)
    assert smooth_expansion_sum(seed, 0.5, 3, 2) == pytest.approx(1.0, rel=1e-15)
    for seed in (SEED, SEED.replica(1)):
        f2 = sign_at(seed, 2)
        assert euler_product(seed, 0.5, 2, 3).value == pytest.approx(1 + f2 / 2 + 0.25)
        assert smooth_expansion_sum(seed, 0.3, 2, 2) == pytest.approx(1 + f2 * 2**-0.8)


def test_k2_product_positive():
    t = shared_table(10**4)
    for label in range(100):
        ep = euler_product(SEED.replica(label), 0.01, 10**4, 2, t)
        assert ep.positive and ep.value > 0 and ep.offending_prime is None


@given(st.integers(0, 2**32), st.sampled_from([2, 3, 5, 7, 11, 13]),
       st.sampled_from([2, 3, 4]), st.floats(0.001, 3.0))
@settings(max_examples=60, deadline=None)
def test_euler_identity_property(label, P, k, s):
    seed = SEED.replica(label)
    prod = euler_product(seed, s, P, k).value
    assert smooth_expansion_sum(seed, s, P, k) == pytest.approx(prod, rel=1e-12)


@pytest.mark.parametrize("k", [2, 3])
def test_sieve_product_consistency(k):
    # every n <= 13 is decided by the 13-smooth expansion; filter the sieve to 13-smooth n
    P, N0, s = 13, 5000, 0.2
    table = sieve_multiplicative(SEED, N0, k)
    smooth = enumerate_smooth_kfree(sieve_primes(100), P, k)
    ps = np.array(smooth.primes)
    filtered = sum(table[n] * n ** (-0.5 - s) for n in range(1, N0 + 1)
                   if table[n] and all(p <= P for p in factorize(n)))
    from_expansion = sum(math.prod(sign_at(SEED, int(p)) ** e for p, e in zip(ps, exps))
                         * n ** (-0.5 - s) for n, exps in smooth.entries if n <= N0)
    assert filtered == pytest.approx(from_expansion, rel=1e-13)


def test_remainder_closed_forms():
    plus, minus = seed_with_signs(p2=1), seed_with_signs(p2=-1)
    assert remainder_R(plus, 0.5, 2) == pytest.approx(math.log(1.5) - 0.5 + 0.125, rel=1e-13)
    assert remainder_R(plus, 0.5, 2) == pytest.approx(0.0304652, abs=1e-7)
    assert remainder_R(minus, 0.5, 2) == pytest.approx(-0.0681472, abs=1e-7)


def test_remainder_series_branch_continuous():
    # per-prime closed form and power series must agree near the switch point
    seed = seed_with_signs(p2=1)
    for s in (1.66, 1.67, 1.68):
        x = 2 ** (-0.5 - s)
        assert remainder_R(seed, s, 2) == pytest.approx(math.log1p(x) - x + x * x / 2,
                                                        rel=1e-9)


@given(st.integers(0, 2**32), st.floats(1e-6, 2.0))
@settings(max_examples=40, deadline=None)
def test_remainder_within_constant_bound(label, s):
    t = shared_table(10**4)
    r = remainder_R(SEED.replica(label), s, 10**4, t)
    assert abs(r) <= BOUND_CONSTANT * prime_power_sum(1.5, 10**4, t)


def test_remainder_bound_limit():
    assert remainder_bound(10**7) == pytest.approx(2.899, abs=0.005)


def test_r_star_single_prime():
    seed = seed_with_signs(p2=1)
    # log F - x - x^2/2 with F = 1 + x + x^2, x = 1/2
    assert remainder_R_star(seed, 0.5, 2, 3) == pytest.approx(math.log(1.75) - 0.625,
                                                              rel=1e-13)
    geometric = -math.log(0.5) - 0.5 - 0.125
    assert remainder_R_star(seed, 0.5, 2, 50) == pytest.approx(geometric, abs=1e-14)
    with pytest.raises(ValueError):
        remainder_R_star(seed, 0.5, 2, 2)


def test_r_star_bounded_over_grid():
    t = shared_table(10**4)
    grid = np.geomspace(1e-6, 0.5, 25)
    for label in range(5):
        seed = SEED.replica(label)
        vals = [remainder_R_star(seed, s, 10**4, 3, t) for s in grid]
        assert max(abs(v) for v in vals) <= 2 * abs(vals[0]) + 1


def test_decomposition_small_cases():
    for label in range(10):
        seed = SEED.replica(label)
        r2 = log_decomposition(seed, 0.5, 3, 2)
        r3 = log_decomposition(seed, 0.5, 3, 3)
        assert r2.sign == 1 and r3.sign == -1
        assert r2.residual <= 1e-12 and r3.residual <= 1e-12
        assert r3.remainder_bound is None
        assert abs(r2.remainder) <= r2.remainder_bound


def test_sup_over_time_grid_relative_to_log():
    # max over t in [0, 3] (step 0.05) of |R(s^t)| / log(1/s) <= 0.01 at s = 1e-4
    t = shared_table(10**5)
    s = 1e-4
    for label in range(3):
        seed = SEED.replica(label)
        worst = max(abs(remainder_R(seed, s**u, 10**5, t)) for u in np.arange(0, 3.0001, 0.05))
        assert worst / math.log(1 / s) <= 0.01
