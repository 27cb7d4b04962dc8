import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primeseries import _kernels_py
from primeseries._backend import BACKEND, get_kernels
from primeseries.primes import shared_table

try:
    compiled = get_kernels("compiled")
except ImportError:  # extension not built
    compiled = None

needs_ext = pytest.mark.skipif(compiled is None, reason="compiled extension not built")
python = _kernels_py


def test_backend_selected():
    assert BACKEND in ("compiled", "python")


@needs_ext
@pytest.mark.parametrize("limit", [2, 3, 100, 65_537, 10**6 + 3])
def test_sieves_agree(limit):
    assert np.array_equal(compiled.sieve_primes(limit), python.sieve_primes(limit))


@needs_ext
def test_spf_agree():
    assert np.array_equal(compiled.spf_table(10**5), python.spf_table(10**5))


@needs_ext
@given(st.integers(0, 2**64 - 1))
@settings(max_examples=30, deadline=None)
def test_noise_bits_agree(key):
    ps = shared_table(10**4).primes
    assert np.array_equal(compiled.noise_bits(key, ps), python.noise_bits(key, ps))


@needs_ext
@pytest.mark.parametrize("kind,a,b,q,scale", [(0, 0, 0, 0, 1.5), (1, 0, 0, 0, 1.0),
                                               (2, 0, 0, 0, 2.0), (3, -1.0, 3.0, 0.75, 0)])
def test_eta_values_agree(kind, a, b, q, scale):
    ps = shared_table(10**5).primes
    x = compiled.eta_values(12345, kind, a, b, q, scale, ps)
    y = python.eta_values(12345, kind, a, b, q, scale, ps)
    np.testing.assert_allclose(x, y, rtol=1e-13, atol=1e-15)


@needs_ext
def test_weighted_sums_agree():
    ps = shared_table(10**5).primes
    w = np.exp(-np.outer([0.51, 0.6], np.log(ps.astype(float))))
    x = compiled.weighted_noise_sums(99, 1, 0, 0, 0, 1.0, ps, w)
    y = python.weighted_noise_sums(99, 1, 0, 0, 0, 1.0, ps, w)
    np.testing.assert_allclose(x, y, rtol=1e-12)


@needs_ext
def test_mult_tables_agree():
    spf = python.spf_table(10**4)
    rng = np.random.default_rng(0)
    signs = rng.choice(np.array([-1, 1], dtype=np.int8), size=10**4 + 1)
    for k in (2, 3, 4):
        assert np.array_equal(compiled.mult_table(spf, signs, k), python.mult_table(spf, signs, k))


@needs_ext
def test_compensated_sums_agree():
    v = np.random.default_rng(1).standard_normal(10**5) * 1e8
    assert compiled.compensated_sum(v) == pytest.approx(python.compensated_sum(v), abs=1e-6)
    assert compiled.power_sum(shared_table(10**5).primes, 1.5) == pytest.approx(
        python.power_sum(shared_table(10**5).primes, 1.5), rel=1e-14)


def test_normal_quantile_accuracy():
    from scipy.special import ndtri
    u = np.linspace(1e-12, 1 - 1e-12, 10_001)
    np.testing.assert_allclose(python.normal_quantile(u), ndtri(u), rtol=1e-12, atol=1e-12)


def test_pure_python_switch():
    import os
    import subprocess
    import sys
    env = dict(os.environ, PRIMESERIES_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import primeseries; print(primeseries.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
