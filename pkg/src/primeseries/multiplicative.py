"""Rademacher and k-free random multiplicative functions.

f(p) is the Rademacher sign attached to p by :func:`noise.sign_at`; f is
extended completely multiplicatively to k-free integers and set to zero on
integers divisible by some p**k (k = 2 is the square-free case).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._backend import kernels
from .noise import SeedSpec, sign_array
from .primes import (DEFAULT_ENUMERATION_CAP, PrimeTable, enumerate_smooth_kfree,
                     shared_table, spf_table)

BOUND_CONSTANT = math.sqrt(2.0) / (math.sqrt(2.0) - 1.0)
# below this |x| the log-expansion remainders are summed as power series
_SERIES_CUTOFF = 0.05
_SERIES_TERMS = 16


class FactorSignError(ArithmeticError):
    """An Euler factor is not positive, so its logarithm is undefined."""

    def __init__(self, p: int, value: float):
        super().__init__(f"Euler factor at p={p} is {value!r} (not positive)")
        self.p = p
        self.value = value


@dataclass(frozen=True)
class MultTable:
    N: int
    k: int
    seed: SeedSpec
    values: np.ndarray = field(repr=False)
    spf: np.ndarray = field(repr=False)

    def __getitem__(self, n: int) -> int:
        return int(self.values[n])

    def to_csv_rows(self, limit: int = 10**4) -> list[tuple[int, int]]:
        top = min(limit, self.N)
        return [(n, int(self.values[n])) for n in range(1, top + 1)]


def sieve_multiplicative(seed: SeedSpec, N: int, k: int = 2) -> MultTable:
    """Tabulate f(1..N) from a smallest-prime-factor sieve."""
    if N < 1:
        raise ValueError(f"table bound N must be >= 1, got {N}")
    if k < 2:
        raise ValueError(f"freeness order k must be >= 2, got {k}")
    spf = spf_table(N)
    idx = np.arange(N + 1)
    primes = np.flatnonzero((spf == idx) & (idx >= 2))
    signs = np.zeros(N + 1, dtype=np.int8)
    signs[primes] = sign_array(seed, primes)
    values = kernels.mult_table(spf, signs, k)
    values.setflags(write=False)
    return MultTable(N=N, k=k, seed=seed, values=values, spf=spf)


def f_partial_sum(table: MultTable, s: float) -> float:
    """sum_{n <= N} f(n) n^{-1/2-s}, ascending n, compensated."""
    if not s > 0:
        raise ValueError(f"shift s must be > 0, got {s}")
    n = np.flatnonzero(table.values)
    terms = table.values[n] * np.exp(-(0.5 + s) * np.log(n.astype(np.float64)))
    return float(kernels.compensated_sum(terms))


def _prime_terms(seed: SeedSpec, s: float, P: int, table: PrimeTable | None):
    if not s > 0:
        raise ValueError(f"shift s must be > 0, got {s}")
    if P < 2:
        raise ValueError(f"cutoff P must be >= 2, got {P}")
    primes = (table if table is not None else shared_table(int(P))).upto(P)
    f = sign_array(seed, primes).astype(np.float64)
    x = f * np.exp(-(0.5 + s) * np.log(primes.astype(np.float64)))
    return primes, x


def _log_factors(x: np.ndarray, k: int) -> np.ndarray:
    """log(1 + x + ... + x^{k-1}), elementwise, for |x| < 1."""
    if k == 2:
        return np.log1p(x)
    return np.log1p(-(x**k)) - np.log1p(-x)


def _factors(x: np.ndarray, k: int) -> np.ndarray:
    if k == 2:
        return 1.0 + x
    return (1.0 - x**k) / (1.0 - x)


def _check_positive(primes: np.ndarray, factors: np.ndarray) -> None:
    bad = np.flatnonzero(~(factors > 0))
    if len(bad):
        i = int(bad[0])
        raise FactorSignError(int(primes[i]), float(factors[i]))


@dataclass(frozen=True)
class EulerProduct:
    value: float
    log_value: float | None
    positive: bool
    offending_prime: int | None = None


def euler_product(seed: SeedSpec, s: float, P: int, k: int = 2,
                  table: PrimeTable | None = None) -> EulerProduct:
    """prod_{p <= P} sum_{l < k} (f(p) p^{-1/2-s})^l.

    A non-positive factor is reported through ``positive``/``offending_prime``
    rather than raised.
    """
    if k < 2:
        raise ValueError(f"freeness order k must be >= 2, got {k}")
    primes, x = _prime_terms(seed, s, P, table)
    factors = _factors(x, k)
    value = math.prod(factors.tolist())
    bad = np.flatnonzero(~(factors > 0))
    if len(bad):
        return EulerProduct(value, None, False, int(primes[bad[0]]))
    return EulerProduct(value, float(kernels.compensated_sum(_log_factors(x, k))), True)


def smooth_expansion_sum(seed: SeedSpec, s: float, P: int, k: int = 2,
                         table: PrimeTable | None = None,
                         cap: int = DEFAULT_ENUMERATION_CAP) -> float:
    """sum over P-smooth k-free n of f(n) n^{-1/2-s}, by exhaustive enumeration."""
    if not s > 0:
        raise ValueError(f"shift s must be > 0, got {s}")
    table = table if table is not None else shared_table(max(int(P), 2))
    smooth = enumerate_smooth_kfree(table, P, k, cap)
    ps = np.array(smooth.primes, dtype=np.int64)
    negative = (sign_array(seed, ps) < 0).astype(np.int64)
    logp = np.log(ps.astype(np.float64))
    exps = np.array([e for _, e in smooth.entries], dtype=np.int64).reshape(len(smooth), len(ps))
    signs = 1 - 2 * ((exps @ negative) & 1)
    terms = signs * np.exp(-(0.5 + s) * (exps @ logp))
    return math.fsum(terms.tolist())


def _series(x: np.ndarray, start: int) -> np.ndarray:
    """sum_{j >= start} (-1)^{j+1} x^j / j for small |x|."""
    out = np.zeros_like(x)
    for j in range(start + _SERIES_TERMS - 1, start - 1, -1):
        out += (-1.0) ** (j + 1) * x**j / j
    return out


def _remainder_R_terms(x: np.ndarray) -> np.ndarray:
    """Per-prime sum_{j >= 3} (-1)^{j+1} x^j / j = log(1+x) - x + x^2/2."""
    small = np.abs(x) < _SERIES_CUTOFF
    out = np.empty_like(x)
    out[~small] = np.log1p(x[~small]) - x[~small] + 0.5 * x[~small] ** 2
    out[small] = _series(x[small], 3)
    return out


def _remainder_R_star_terms(x: np.ndarray, k: int) -> np.ndarray:
    """Per-prime log(1 + x + ... + x^{k-1}) - x - x^2/2 (with x^2 = p^{-1-2s})."""
    small = np.abs(x) < _SERIES_CUTOFF
    out = np.empty_like(x)
    xb = x[~small]
    out[~small] = _log_factors(xb, k) - xb - 0.5 * xb**2
    xs = x[small]
    # log F = sum_j x^j/j - sum_j x^{kj}/j
    acc = np.zeros_like(xs)
    for j in range(3, 3 + _SERIES_TERMS):
        acc += xs**j / j
    for j in range(1, 1 + _SERIES_TERMS // k + 1):
        acc -= xs ** (k * j) / j
    out[small] = acc
    return out


def remainder_R(seed: SeedSpec, s: float, P: int, table: PrimeTable | None = None) -> float:
    """Cubic-and-higher part of sum_p log(1 + f(p) p^{-1/2-s}) over p <= P."""
    _, x = _prime_terms(seed, s, P, table)
    return float(kernels.compensated_sum(_remainder_R_terms(x)))


def remainder_R_star(seed: SeedSpec, s: float, P: int, k: int,
                     table: PrimeTable | None = None) -> float:
    """k-free analogue: sum_{p <= P} [log F_p - f(p) p^{-1/2-s} - p^{-1-2s}/2]."""
    if k < 3:
        raise ValueError(f"R* is defined for k >= 3, got {k}")
    primes, x = _prime_terms(seed, s, P, table)
    _check_positive(primes, _factors(x, k))
    return float(kernels.compensated_sum(_remainder_R_star_terms(x, k)))


def prime_power_sum(exponent: float, P: int, table: PrimeTable | None = None) -> float:
    primes = (table if table is not None else shared_table(int(P))).upto(P)
    return float(kernels.power_sum(primes, exponent))


def remainder_bound(P: int, table: PrimeTable | None = None) -> float:
    """sqrt2/(sqrt2-1) * (sum_{p<=P} p^{-3/2} + 2 P^{-1/2}/log P); bounds |R(s)| for all s > 0."""
    tail = 2.0 / (math.sqrt(P) * math.log(P))
    return BOUND_CONSTANT * (prime_power_sum(1.5, P, table) + tail)


@dataclass(frozen=True)
class DecompositionReport:
    s: float
    P: int
    k: int
    sign: int
    log_product: float
    prime_sum: float
    half_variance_sum: float
    remainder: float
    residual: float
    remainder_bound: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def log_decomposition(seed: SeedSpec, s: float, P: int, k: int = 2,
                      table: PrimeTable | None = None) -> DecompositionReport:
    """Split log of the truncated Euler product into prime sum, half variance and remainder.

    For k = 2:  log prod = prime_sum - half_variance_sum + R
    For k >= 3: log prod = prime_sum + half_variance_sum + R*
    """
    if k < 2:
        raise ValueError(f"freeness order k must be >= 2, got {k}")
    primes, x = _prime_terms(seed, s, P, table)
    _check_positive(primes, _factors(x, k))
    log_product = float(kernels.compensated_sum(_log_factors(x, k)))
    prime_sum = float(kernels.compensated_sum(x))
    half_var = 0.5 * float(kernels.power_sum(primes, 1.0 + 2.0 * s))
    if k == 2:
        sign = 1
        remainder = float(kernels.compensated_sum(_remainder_R_terms(x)))
        bound = remainder_bound(P, table)
    else:
        sign = -1
        remainder = float(kernels.compensated_sum(_remainder_R_star_terms(x, k)))
        bound = None
    residual = abs(log_product + sign * half_var - prime_sum - remainder)
    return DecompositionReport(s=s, P=int(P), k=k, sign=sign, log_product=log_product,
                               prime_sum=prime_sum, half_variance_sum=half_var,
                               remainder=remainder, residual=residual,
                               remainder_bound=bound)
