"""Pure-Python (numpy) implementations of the hot kernels.

Every function here has a twin with the same signature in the compiled
``_kernels`` extension.  Results agree to rounding; summations here use
``math.fsum`` (correctly rounded) where the compiled kernels use Neumaier
compensation.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15

# kind codes shared with the compiled kernels
RADEMACHER, GAUSSIAN, CENTERED_UNIFORM, TWO_POINT = 0, 1, 2, 3

_U64 = np.uint64


def _mix64_array(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
        return z ^ (z >> _U64(31))


def noise_bits(key: int, primes: np.ndarray) -> np.ndarray:
    """64 random bits per prime, keyed by the prime's value."""
    p = np.asarray(primes, dtype=np.int64).astype(np.uint64)
    with np.errstate(over="ignore"):
        z = _U64(key) ^ (p * _U64(GOLDEN))
    return _mix64_array(z)


def _uniform_open(bits: np.ndarray) -> np.ndarray:
    # (k + 1/2) / 2^53, strictly inside (0, 1)
    return ((bits >> _U64(11)).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)


_A = (3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
      1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
      3.3430575583588128105e4, 2.5090809287301226727e3)
_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
      2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
      5.2264952788528545610e3)
_C = (1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
      3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4)
_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
      1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
      1.05075007164441684324e-9)
_E = (6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
      2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7)
_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
      7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
      2.04426310338993978564e-15)


def _horner(coef, r):
    acc = coef[7]
    for c in coef[6::-1]:
        acc = acc * r + c
    return acc


def normal_quantile(u):
    """Standard normal quantile (Wichura's AS241, about 1e-16 relative)."""
    u = np.asarray(u, dtype=np.float64)
    q = u - 0.5
    out = np.empty_like(u)
    central = np.abs(q) <= 0.425
    r = 0.180625 - q[central] ** 2
    out[central] = q[central] * _horner(_A, r) / _horner(_B, r)
    tail = ~central
    if tail.any():
        qt = q[tail]
        r = np.sqrt(-np.log(np.where(qt < 0, u[tail], 1.0 - u[tail])))
        near = r <= 5.0
        val = np.empty_like(r)
        rn = r[near] - 1.6
        val[near] = _horner(_C, rn) / _horner(_D, rn)
        rf = r[~near] - 5.0
        val[~near] = _horner(_E, rf) / _horner(_F, rf)
        out[tail] = np.where(qt < 0, -val, val)
    return out


def eta_values(key: int, kind: int, a: float, b: float, q: float,
               scale: float, primes: np.ndarray) -> np.ndarray:
    bits = noise_bits(key, primes)
    if kind == RADEMACHER:
        return np.where((bits >> _U64(63)) == 1, scale, -scale)
    u = _uniform_open(bits)
    if kind == GAUSSIAN:
        return scale * normal_quantile(u)
    if kind == CENTERED_UNIFORM:
        return scale * (2.0 * u - 1.0)
    if kind == TWO_POINT:
        return np.where(u < q, a, b)
    raise ValueError(f"unknown noise kind code {kind}")


def compensated_sum(values: np.ndarray) -> float:
    return math.fsum(np.asarray(values, dtype=np.float64).tolist())


def power_sum(primes: np.ndarray, exponent: float) -> float:
    """Sum of p**(-exponent) over the given primes."""
    p = np.asarray(primes, dtype=np.float64)
    return compensated_sum(np.power(p, -exponent))


def weighted_noise_sums(key: int, kind: int, a: float, b: float, q: float,
                        scale: float, primes: np.ndarray,
                        weights: np.ndarray) -> np.ndarray:
    """Row-wise sums of eta_p * weights[j, i] over primes p_i."""
    eta = eta_values(key, kind, a, b, q, scale, primes)
    w = np.atleast_2d(weights)
    return np.array([compensated_sum(eta * row) for row in w])


def _small_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p::2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def sieve_primes(limit: int, segment_bits: int = 1 << 20) -> np.ndarray:
    """Odd-only segmented sieve; segment flags are bytes, not bits."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    base = _small_sieve(math.isqrt(limit))[1:]  # odd base primes
    chunks = [np.array([2], dtype=np.int64)]
    last = (limit - 1) // 2  # odd index of the largest odd <= limit
    # odd index j stands for 2j + 1; j = 0 (the number 1) is skipped
    nxt = (base * base - 1) // 2
    lo = 1
    while lo <= last:
        hi = min(lo + segment_bits, last + 1)
        composite = np.zeros(hi - lo, dtype=bool)
        for i, p in enumerate(base):
            j = nxt[i]
            if j >= hi:
                continue
            composite[j - lo::p] = True
            nxt[i] = j + ((hi - j + p - 1) // p) * p
        chunks.append(2 * (np.flatnonzero(~composite) + lo) + 1)
        lo = hi
    return np.concatenate(chunks).astype(np.int64)


def spf_table(n: int) -> np.ndarray:
    """Smallest prime factor for 0..n (entries 0 and 1 are 0)."""
    spf = np.zeros(n + 1, dtype=np.int32)
    if n >= 2:
        spf[2::2] = 2
    for p in range(3, math.isqrt(n) + 1, 2):
        if spf[p] == 0:
            view = spf[p * p::p]
            view[view == 0] = p
    rest = np.flatnonzero(spf == 0)
    rest = rest[rest >= 2]
    spf[rest] = rest
    return spf


def mult_table(spf: np.ndarray, signs: np.ndarray, k: int) -> np.ndarray:
    """f(n) for n <= N given f(p) stored at signs[p]; zero off the k-free support."""
    n_max = len(spf) - 1
    f = np.ones(n_max + 1, dtype=np.int8)
    f[0] = 0
    primes = np.flatnonzero(spf[: n_max + 1] == np.arange(n_max + 1))
    primes = primes[primes >= 2]
    for p in primes.tolist():
        if signs[p] < 0:
            f[p::p] *= -1
        pk = p ** k
        if pk <= n_max:
            f[pk::pk] = 0
        # complete multiplicativity: f(p^e) = f(p)^e below the k-th power
        pe = p * p
        while pe <= n_max and pe < pk:
            if signs[p] < 0:
                f[pe::pe] *= -1
            pe *= p
    return f
