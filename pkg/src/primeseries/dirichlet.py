"""The random series X(s) = sum_p eta_p p^{-1/2-s}: realizations, variances, covariances,
iterated-logarithm normalizers and the prime random walk."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from ._backend import kernels
from .noise import NoiseModel, SeedSpec
from .primes import PrimeTable, prime_count, shared_table
from .special import exp_integral_e1

MODES = ("power", "exponential")
E_MINUS_E = math.exp(-math.e)


@dataclass(frozen=True)
class SeriesQuery:
    s: float
    cutoff_P: int
    seed: SeedSpec
    model: NoiseModel = field(default_factory=NoiseModel)

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError(f"shift s must be > 0, got {self.s}")
        if self.cutoff_P < 2:
            raise ValueError(f"cutoff must be >= 2, got {self.cutoff_P}")


@dataclass(frozen=True)
class PathQuery:
    """Shifts evaluated along a time grid.

    ``power`` mode uses shift(t) = base**t with base in (0, 1); ``exponential``
    mode uses shift(t) = exp(-t * base) with base = S > 0.
    """

    mode: str
    base: float
    grid: tuple[float, ...]
    cutoff_P: int
    seed: SeedSpec
    model: NoiseModel = field(default_factory=NoiseModel)

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(t) for t in self.grid))
        validate_grid(self.grid)
        shift_map(self.mode, self.base, 1.0)
        if self.cutoff_P < 2:
            raise ValueError(f"cutoff must be >= 2, got {self.cutoff_P}")

    def shifts(self) -> np.ndarray:
        return shifts_for(self.mode, self.base, self.grid)


@dataclass(frozen=True)
class VarianceBreakdown:
    s: float
    P: int
    sigma2: float
    partial: float
    tail_estimate: float
    total: float
    asymptote: float

    @property
    def ratio(self) -> float:
        return self.total / self.asymptote

    def to_dict(self) -> dict:
        return {**asdict(self), "ratio": self.ratio}


def validate_grid(grid: Sequence[float]) -> None:
    if len(grid) == 0:
        raise ValueError("time grid is empty")
    if any(not math.isfinite(t) or t < 0 for t in grid):
        raise ValueError(f"time grid values must be finite and >= 0: {list(grid)}")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError(f"time grid must be ascending: {list(grid)}")


def shift_map(mode: str, base: float, t: float) -> float:
    if mode == "power":
        if not 0 < base < 1:
            raise ValueError(f"power mode needs base s in (0, 1), got {base}")
        return math.exp(t * math.log(base))
    if mode == "exponential":
        if not base > 0:
            raise ValueError(f"exponential mode needs scale S > 0, got {base}")
        return math.exp(-t * base)
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def shifts_for(mode: str, base: float, grid: Sequence[float]) -> np.ndarray:
    return np.array([shift_map(mode, base, t) for t in grid], dtype=np.float64)


def _table_for(P: int, table: PrimeTable | None) -> np.ndarray:
    if table is None:
        table = shared_table(int(P))
    return table.upto(P)


def prime_weights(primes: np.ndarray, shifts: Sequence[float]) -> np.ndarray:
    """Matrix of p^{-1/2-shift}, one row per shift."""
    logp = np.log(primes.astype(np.float64))
    return np.exp(-np.outer(0.5 + np.asarray(shifts, dtype=np.float64), logp))


def _noise_sums(seed: SeedSpec, model: NoiseModel, primes: np.ndarray,
                weights: np.ndarray) -> np.ndarray:
    return kernels.weighted_noise_sums(seed.key, *model.kernel_args(), primes, weights)


def partial_series(q: SeriesQuery, table: PrimeTable | None = None) -> float:
    """X_P(s) = sum over p <= P of eta_p p^{-1/2-s}, compensated, ascending primes."""
    primes = _table_for(q.cutoff_P, table)
    return float(_noise_sums(q.seed, q.model, primes, prime_weights(primes, [q.s]))[0])


def truncated_variance(s: float, P: int, sigma2: float = 1.0,
                       table: PrimeTable | None = None) -> float:
    """sigma2 * sum over p <= P of p^{-1-2s}; s = 0 is allowed."""
    if P < 2:
        raise ValueError(f"cutoff must be >= 2, got {P}")
    if s < 0:
        raise ValueError(f"shift must be >= 0, got {s}")
    if sigma2 == 0:
        return 0.0
    return sigma2 * kernels.power_sum(_table_for(P, table), 1.0 + 2.0 * s)


def g_hybrid(s: float, P: int, sigma2: float = 1.0,
             table: PrimeTable | None = None) -> VarianceBreakdown:
    """Truncated variance plus a prime-number-theorem estimate of the tail.

    The tail sum over p > P of p^{-1-2s} is replaced by the integral of
    x^{-1-2s}/log x from P to infinity, which equals E1(2 s log P).
    """
    if not 0 < s < 1 / math.e:
        raise ValueError(f"g_hybrid needs 0 < s < 1/e, got {s}")
    if P < 100:
        raise ValueError(f"g_hybrid needs P >= 100, got {P}")
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be > 0, got {sigma2}")
    partial = truncated_variance(s, P, sigma2, table)
    tail = sigma2 * exp_integral_e1(2.0 * s * math.log(P))
    return VarianceBreakdown(s=s, P=int(P), sigma2=sigma2, partial=partial,
                             tail_estimate=tail, total=partial + tail,
                             asymptote=sigma2 * math.log(1.0 / s))


def truncated_covariance(base: float, mode: str, t1: float, t2: float, P: int,
                         table: PrimeTable | None = None) -> float:
    """Exact covariance of the truncated processes at times t1, t2 for unit variance."""
    if t1 < 0 or t2 < 0 or not (math.isfinite(t1) and math.isfinite(t2)):
        raise ValueError(f"times must be finite and >= 0, got {t1}, {t2}")
    a1 = shift_map(mode, base, t1)
    a2 = shift_map(mode, base, t2)
    return kernels.power_sum(_table_for(P, table), 1.0 + a1 + a2)


def covariance_matrix(base: float, mode: str, grid: Sequence[float], P: int,
                      table: PrimeTable | None = None) -> np.ndarray:
    m = len(grid)
    out = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            out[i, j] = out[j, i] = truncated_covariance(base, mode, grid[i], grid[j], P, table)
    return out


def path_normalizer(pq: PathQuery, table: PrimeTable | None = None) -> float:
    """Unit-variance truncated variance at t = 1; path values are divided by its root."""
    return truncated_variance(shift_map(pq.mode, pq.base, 1.0), pq.cutoff_P, 1.0, table)


def path_raw(pq: PathQuery, table: PrimeTable | None = None) -> np.ndarray:
    """Unnormalized X_P(shift(t)) for every grid point, sharing one noise realization."""
    primes = _table_for(pq.cutoff_P, table)
    return _noise_sums(pq.seed, pq.model, primes, prime_weights(primes, pq.shifts()))


def path_sample(pq: PathQuery, table: PrimeTable | None = None) -> np.ndarray:
    return path_raw(pq, table) / math.sqrt(path_normalizer(pq, table))


def lil_normalizer(s: float, sigma2: float = 1.0) -> float:
    """(2 sigma2 log(1/s) log log log(1/s))^{-1/2}, defined for 0 < s < e^{-e}."""
    if not 0 < s < E_MINUS_E:
        raise ValueError(f"iterated-log normalizer needs 0 < s < e^-e, got {s}")
    return lil_normalizer_log(-math.log(s), sigma2)


def lil_normalizer_log(log_inv_s: float, sigma2: float = 1.0) -> float:
    """Same normalizer parametrized by L = log(1/s), for s below the double range."""
    if not log_inv_s > math.e:
        raise ValueError(f"iterated-log normalizer needs log(1/s) > e, got {log_inv_s}")
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be > 0, got {sigma2}")
    L3 = math.log(math.log(log_inv_s))
    return 1.0 / math.sqrt(2.0 * sigma2 * log_inv_s * L3)


def log3(s: float) -> float:
    return math.log(math.log(math.log(1.0 / s)))


@dataclass(frozen=True)
class LilSequence:
    gamma: float
    branch: str
    n: np.ndarray
    values: np.ndarray
    underflow: np.ndarray  # True where s_n rounds to 0 in double precision

    @property
    def usable(self) -> np.ndarray:
        return ~self.underflow


def lil_sequence(gamma: float, branch: str, n_max: int) -> LilSequence:
    """s_n = exp(-exp(n^{1-gamma})) (minus) or exp(-exp(n^{1+gamma})) (plus)."""
    if branch == "minus":
        if not 0 < gamma < 1:
            raise ValueError(f"minus branch needs 0 < gamma < 1, got {gamma}")
        power = 1.0 - gamma
    elif branch == "plus":
        if not gamma > 0:
            raise ValueError(f"plus branch needs gamma > 0, got {gamma}")
        power = 1.0 + gamma
    else:
        raise ValueError(f"branch must be 'minus' or 'plus', got {branch!r}")
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    n = np.arange(1, n_max + 1)
    with np.errstate(over="ignore"):
        values = np.exp(-np.exp(n.astype(np.float64) ** power))
    return LilSequence(gamma, branch, n, values, values == 0.0)


def prime_walk(seed: SeedSpec, model: NoiseModel, x: float, table: PrimeTable) -> float:
    """T*(x) = sum of eta_p over primes p <= x."""
    count = prime_count(table, x)
    if count == 0:
        return 0.0
    primes = table.primes[:count]
    return float(_noise_sums(seed, model, primes, np.ones((1, count)))[0])
