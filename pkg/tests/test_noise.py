import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primeseries.noise import (KINDS, RADEMACHER, NoiseModel, SeedSpec, eta_array, eta_at,
                               sign_array, sign_at)
from primeseries.primes import shared_table

SEED = SeedSpec(20250918)


def models():
    return [NoiseModel("rademacher", 2.0), NoiseModel("gaussian", 1.0),
            NoiseModel("centered_uniform", 0.5), NoiseModel.two_point(-1.0, 3.0, 0.75)]


def test_rademacher_support_and_determinism():
    for p in (2, 3, 5, 7, 1_000_003):
        v = eta_at(SEED, RADEMACHER, p)
        assert v in (-1.0, 1.0)
        assert eta_at(SEED, RADEMACHER, p) == v


def test_sign_aliases_eta(table_1e6):
    ps = table_1e6.primes[:10**4]
    assert np.array_equal(sign_array(SEED, ps), eta_array(SEED, RADEMACHER, ps))
    assert all(sign_at(SEED, int(p)) ** 2 == 1 for p in ps[:100])


def test_sign_frequency(table_1e6):
    ps = shared_table(2 * 10**6).primes[:10**5]
    freq = float(np.mean(sign_array(SEED, ps) == 1))
    assert 0.494 <= freq <= 0.506


def test_gaussian_mean():
    ps = shared_table(2 * 10**6).primes[:10**5]
    assert abs(eta_array(SEED, NoiseModel("gaussian"), ps).mean()) <= 4 / math.sqrt(10**5)


@pytest.mark.parametrize("model", models(), ids=lambda m: m.kind)
def test_sample_variance_within_two_percent(model):
    ps = shared_table(2 * 10**7).primes[:10**6]
    v = eta_array(SEED, model, ps)
    assert abs(v.var() / model.sigma2 - 1) <= 0.02


def test_no_collisions_among_million_keys():
    from primeseries._backend import kernels
    bits = kernels.noise_bits(SEED.key, np.arange(1, 10**6 + 1, dtype=np.int64))
    assert len(np.unique(bits)) == 10**6


@given(st.integers(2, 10**6), st.integers(10**3, 10**6))
@settings(max_examples=30, deadline=None)
def test_cutoff_and_order_invariance(P1, P2):
    t = shared_table(10**6)
    a, b = t.upto(min(P1, P2)), t.upto(max(P1, P2))
    model = NoiseModel("gaussian")
    assert np.array_equal(eta_array(SEED, model, a), eta_array(SEED, model, b)[: len(a)])
    rev = b[::-1]
    assert np.array_equal(eta_array(SEED, model, rev)[::-1], eta_array(SEED, model, b))


def test_streams_differ():
    ps = shared_table(1000).primes
    assert not np.array_equal(sign_array(SeedSpec(1, 0), ps), sign_array(SeedSpec(1, 1), ps))
    assert SEED.replica(3) == SeedSpec(20250918, 3)


def test_two_point_parameters_validated():
    m = NoiseModel.two_point_centered(0.25, 2.0)
    assert math.isclose(m.q * m.a + (1 - m.q) * m.b, 0.0, abs_tol=1e-15)
    assert math.isclose(m.q * m.a**2 + (1 - m.q) * m.b**2, 2.0)
    with pytest.raises(ValueError):
        NoiseModel.two_point(1.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        NoiseModel("cauchy")
    with pytest.raises(ValueError):
        NoiseModel("gaussian", 0.0)


@pytest.mark.parametrize("model", models(), ids=lambda m: m.kind)
def test_config_round_trip(model):
    cfg = {k: str(v) for k, v in model.to_config().items()}
    assert NoiseModel.from_config(cfg) == model


def test_kinds_are_exhaustive():
    assert {m.kind for m in models()} == set(KINDS)


def test_centered_uniform_support():
    m = NoiseModel("centered_uniform", 3.0)
    v = eta_array(SEED, m, shared_table(10**5).primes)
    assert np.all(np.abs(v) <= 3.0)
