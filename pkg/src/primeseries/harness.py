"""Monte Carlo experiments checked against exact truncated oracles."""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import erfc, ndtr

from . import dirichlet
from .dirichlet import (PathQuery, covariance_matrix, lil_sequence, log3,
                        path_normalizer, prime_weights, shifts_for, truncated_variance)
from .multiplicative import DecompositionReport, log_decomposition
from .noise import NoiseModel, SeedSpec
from .primes import PrimeTable, shared_table
from .special import exp_integral_e1, zeta_one_plus

SCHEMA_VERSION = 1
SHIPPED_SEED = 20250918
KS_FACTOR = 1.95


@dataclass(frozen=True)
class ExperimentConfig:
    replicas: int = 2000
    cutoff_P: int = 10**7
    mode: str = "exponential"
    base: float = 10.0
    grid: tuple[float, ...] = (0.25, 0.5, 1.0)
    model: NoiseModel = field(default_factory=NoiseModel)
    master_seed: int = SHIPPED_SEED
    tolerance_se: float = 4.0
    ks_factor: float = KS_FACTOR
    workers: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(t) for t in self.grid))
        if self.replicas < 2:
            raise ValueError(f"replicas must be >= 2, got {self.replicas}")
        if not (self.tolerance_se > 0 and self.ks_factor > 0):
            raise ValueError("tolerances must be positive")
        dirichlet.validate_grid(self.grid)
        dirichlet.shift_map(self.mode, self.base, 1.0)
        if self.cutoff_P < 2:
            raise ValueError(f"cutoff must be >= 2, got {self.cutoff_P}")

    def echo(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k not in ("model", "workers")}
        out["grid"] = list(self.grid)
        out.update(self.model.to_config())
        return out


def content_hash(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _sanitize(obj):
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _sanitize(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def report_document(kind: str, config: dict, body: dict, passed: bool) -> dict:
    """JSON-ready envelope shared by every report."""
    config = _sanitize(config)
    return {
        "schema_version": SCHEMA_VERSION,
        "report": kind,
        "config": config,
        "input_hash": content_hash({"report": kind, "config": config}),
        "passed": bool(passed),
        **_sanitize(body),
    }


def _replica_rows(seed: int, model: NoiseModel, primes: np.ndarray, weights: np.ndarray,
                  labels: Sequence[int], workers: int | None) -> np.ndarray:
    from ._backend import kernels

    code, a, b, q, scale = model.kernel_args()

    def one(label: int) -> np.ndarray:
        return kernels.weighted_noise_sums(SeedSpec(seed, label).key, code, a, b, q,
                                           scale, primes, weights)

    workers = workers or min(8, os.cpu_count() or 1)
    if workers == 1:
        rows = [one(r) for r in labels]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, labels))  # map keeps replica order
    return np.vstack(rows)


def normality_statistic(samples) -> float:
    """Sup distance between the standardized empirical CDF and the standard normal CDF."""
    x = np.sort(np.asarray(samples, dtype=np.float64))
    n = len(x)
    if n < 30:
        raise ValueError(f"normality statistic needs >= 30 samples, got {n}")
    sd = x.std(ddof=1)
    z = (x - x.mean()) / sd if sd > 0 else np.zeros(n)
    cdf = ndtr(z)
    # ties: the empirical CDF jumps to the last index of each run
    upper = np.searchsorted(z, z, side="right") / n
    lower = np.searchsorted(z, z, side="left") / n
    return float(max(np.max(upper - cdf), np.max(cdf - lower)))


def _moments(x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    mean = x.mean(axis=0)
    c = x - mean
    var = (c**2).mean(axis=0)
    skew = (c**3).mean(axis=0) / var**1.5
    kurt = (c**4).mean(axis=0) / var**2 - 3.0
    return mean, x.var(axis=0, ddof=1), skew, kurt


def covariance_with_se(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sample covariance and the standard error of each entry, from the replica products."""
    R, m = x.shape
    c = x - x.mean(axis=0)
    cov = c.T @ c / (R - 1)
    se = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            z = c[:, i] * c[:, j]
            se[i, j] = se[j, i] = z.std(ddof=1) / math.sqrt(R)
    return cov, se


def psd_pivots(matrix: np.ndarray) -> np.ndarray:
    """Pivots of a diagonally pivoted LDL^T factorization; all >= 0 for a PSD matrix."""
    a = np.array(matrix, dtype=np.float64)
    n = len(a)
    pivots = []
    remaining = list(range(n))
    for _ in range(n):
        k = max(remaining, key=lambda i: a[i, i])
        d = a[k, k]
        pivots.append(d)
        remaining.remove(k)
        if d > 0:
            col = a[:, k].copy()
            a -= np.outer(col, col) / d
    return np.array(pivots)


@dataclass
class FcltReport:
    grid: list[float]
    shifts: list[float]
    normalizer: float
    mean: list[float]
    variance: list[float]
    skewness: list[float]
    excess_kurtosis: list[float]
    empirical_cov: list[list[float]]
    oracle_cov: list[list[float]]
    cov_se: list[list[float]]
    cov_z: list[list[float]]
    ks: list[float]
    ks_threshold: float
    cov_pass: bool
    ks_pass: bool
    analytic_ratio: list[list[float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.cov_pass and self.ks_pass

    def to_dict(self) -> dict:
        return {**asdict(self), "passed": self.passed}


def run_fclt_experiment(config: ExperimentConfig, table: PrimeTable | None = None) -> FcltReport:
    """Replica r uses stream label r; covariances compared with the exact truncated oracle."""
    table = table if table is not None else shared_table(config.cutoff_P)
    primes = table.upto(config.cutoff_P)
    shifts = shifts_for(config.mode, config.base, config.grid)
    weights = prime_weights(primes, shifts)
    raw = _replica_rows(config.master_seed, config.model, primes, weights,
                        range(config.replicas), config.workers)
    pq = PathQuery(config.mode, config.base, config.grid, config.cutoff_P,
                   SeedSpec(config.master_seed), config.model)
    norm = path_normalizer(pq, table)
    normalized = raw / math.sqrt(norm)
    mean, var, skew, kurt = _moments(normalized)
    emp, se = covariance_with_se(raw)
    oracle = config.model.sigma2 * covariance_matrix(config.base, config.mode, config.grid,
                                                     config.cutoff_P, table)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, (emp - oracle) / se, np.where(emp == oracle, 0.0, np.inf))
    ks = [normality_statistic(raw[:, i]) for i in range(raw.shape[1])]
    threshold = config.ks_factor / math.sqrt(config.replicas)
    minima = np.minimum.outer(np.asarray(config.grid), np.asarray(config.grid))
    scale = minima * config.base if config.mode == "exponential" else minima * math.log(1 / config.base)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(scale > 0, oracle / (config.model.sigma2 * scale), np.nan)
    return FcltReport(
        grid=list(config.grid), shifts=shifts.tolist(), normalizer=norm,
        mean=mean.tolist(), variance=var.tolist(), skewness=skew.tolist(),
        excess_kurtosis=kurt.tolist(), empirical_cov=emp.tolist(), oracle_cov=oracle.tolist(),
        cov_se=se.tolist(), cov_z=z.tolist(), ks=ks, ks_threshold=threshold,
        cov_pass=bool(np.all(np.abs(z) <= config.tolerance_se)),
        ks_pass=bool(all(k <= threshold for k in ks)),
        analytic_ratio=ratio.tolist(),
    )


def truncated_second_moment(model: NoiseModel, c) -> np.ndarray:
    """E[eta^2 ; |eta| > c] in closed form, elementwise in c >= 0."""
    c = np.asarray(c, dtype=np.float64)
    s2 = model.sigma2
    if model.kind == "rademacher":
        return np.where(model.scale > c, s2, 0.0)
    if model.kind == "gaussian":
        z = c / model.scale
        return s2 * (erfc(z / math.sqrt(2.0)) + math.sqrt(2.0 / math.pi) * z * np.exp(-0.5 * z * z))
    if model.kind == "centered_uniform":
        A = math.sqrt(3.0 * s2)
        return np.where(c < A, (A**3 - np.minimum(c, A) ** 3) / (3.0 * A), 0.0)
    if model.kind == "two_point":
        return (np.where(abs(model.a) > c, model.q * model.a**2, 0.0)
                + np.where(abs(model.b) > c, (1 - model.q) * model.b**2, 0.0))
    raise ValueError(f"no closed-form truncated moment for noise kind {model.kind!r}")


def lindeberg_profile(model: NoiseModel, shifts: Sequence[float], eps: float, P: int,
                      norm: float, table: PrimeTable | None = None) -> np.ndarray:
    """(1/norm) sum_{p<=P} p^{-1-2a} E[eta^2 ; |eta| > eps p^{1/2+a} sqrt(norm)] per shift a."""
    from ._backend import kernels

    if not eps > 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if not norm > 0:
        raise ValueError(f"norm must be > 0, got {norm}")
    primes = (table if table is not None else shared_table(int(P))).upto(P)
    logp = np.log(primes.astype(np.float64))
    out = []
    for a in shifts:
        c = eps * np.exp((0.5 + a) * logp) * math.sqrt(norm)
        terms = np.exp(-(1.0 + 2.0 * a) * logp) * truncated_second_moment(model, c)
        out.append(float(kernels.compensated_sum(terms)) / norm)
    return np.array(out)


@dataclass
class LilReport:
    gamma: float
    branch: str
    cutoff_P: int
    n: list[int]
    s_n: list[float]
    excluded_n: list[int]
    raw: list[float]
    normalized: list[float]
    normalizer: list[float]
    algebra_defect: list[float]
    running_max: list[float]
    running_min: list[float]
    envelope: float = 1.0
    fraction_in_unit_interval: float = 0.0
    notices: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _lil_points(gamma: float, branch: str, n_range: Sequence[int]):
    n_range = list(n_range)
    seq = lil_sequence(gamma, branch, max(n_range))
    kept, s_vals, excluded, notices = [], [], [], []
    for n in n_range:
        s = float(seq.values[n - 1])
        if seq.underflow[n - 1]:
            excluded.append(n)
            notices.append(f"n={n}: s_n underflows to 0 in double precision")
        elif not s < dirichlet.E_MINUS_E or not log3(s) > 0:
            excluded.append(n)
            notices.append(f"n={n}: s_n={s!r} is outside (0, e^-e)")
        else:
            kept.append(n)
            s_vals.append(s)
    return kept, np.array(s_vals), excluded, notices


def _truncated_lil_normalizers(s_vals: np.ndarray, P: int, table: PrimeTable):
    g = np.array([truncated_variance(s, P, 1.0, table) for s in s_vals])
    l3 = np.array([log3(s) for s in s_vals])
    return 1.0 / np.sqrt(2.0 * g * l3), g, l3


def run_lil_trace(gamma: float, branch: str, n_range: Sequence[int], cutoff_P: int = 10**6,
                  master_seed: int = SHIPPED_SEED, model: NoiseModel | None = None,
                  table: PrimeTable | None = None, stream_label: int = 0) -> LilReport:
    """One realization evaluated along s_n, normalized by the truncated iterated-log scale."""
    model = model or NoiseModel()
    table = table if table is not None else shared_table(cutoff_P)
    n_kept, s_vals, excluded, notices = _lil_points(gamma, branch, n_range)
    if not n_kept:
        return LilReport(gamma, branch, cutoff_P, [], [], excluded, [], [], [], [], [], [],
                         notices=notices)
    primes = table.upto(cutoff_P)
    raw = _replica_rows(master_seed, model, primes, prime_weights(primes, s_vals),
                        [stream_label], 1)[0]
    # sigma2 enters through g_P so the normalized value has the unit-variance scale
    lnorm, g, l3 = _truncated_lil_normalizers(s_vals, cutoff_P, table)
    lnorm = lnorm / math.sqrt(model.sigma2)
    normalized = raw * lnorm
    defect = np.abs(lnorm**2 * model.sigma2 * g * 2.0 * l3 - 1.0)
    return LilReport(
        gamma=gamma, branch=branch, cutoff_P=cutoff_P, n=n_kept, s_n=s_vals.tolist(),
        excluded_n=excluded, raw=raw.tolist(), normalized=normalized.tolist(),
        normalizer=lnorm.tolist(), algebra_defect=defect.tolist(),
        running_max=np.maximum.accumulate(normalized).tolist(),
        running_min=np.minimum.accumulate(normalized).tolist(),
        fraction_in_unit_interval=float(np.mean(np.abs(normalized) <= 1.0)),
        notices=notices,
    )


@dataclass
class LilVarianceReport:
    n: list[int]
    s_n: list[float]
    sample_variance: list[float]
    target: list[float]
    se: list[float]
    z: list[float]
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def lil_replica_variance(gamma: float, branch: str, n_range: Sequence[int], replicas: int = 500,
                         cutoff_P: int = 10**6, master_seed: int = SHIPPED_SEED,
                         model: NoiseModel | None = None, table: PrimeTable | None = None,
                         tolerance_se: float = 4.0, workers: int | None = None) -> LilVarianceReport:
    """Across replicas, the variance of L_P(s_n) X_P(s_n) should be 1/(2 log3(1/s_n))."""
    model = model or NoiseModel()
    table = table if table is not None else shared_table(cutoff_P)
    n_kept, s_vals, _, _ = _lil_points(gamma, branch, n_range)
    primes = table.upto(cutoff_P)
    raw = _replica_rows(master_seed, model, primes, prime_weights(primes, s_vals),
                        range(replicas), workers)
    lnorm, _, l3 = _truncated_lil_normalizers(s_vals, cutoff_P, table)
    vals = raw * lnorm / math.sqrt(model.sigma2)
    c = vals - vals.mean(axis=0)
    var = (c**2).sum(axis=0) / (replicas - 1)
    se = (c**2).std(axis=0, ddof=1) / math.sqrt(replicas)
    target = 1.0 / (2.0 * l3)
    z = (var - target) / se
    return LilVarianceReport(n=n_kept, s_n=s_vals.tolist(), sample_variance=var.tolist(),
                             target=target.tolist(), se=se.tolist(), z=z.tolist(),
                             passed=bool(np.all(np.abs(z) <= tolerance_se)))


@dataclass
class CorollaryReport:
    k: int
    P: int
    sign: int
    decompositions: list[DecompositionReport]
    log_zeta: list[float]
    lhs: list[float]
    discrepancy: list[float]
    bookkeeping: list[float]
    closure_error: list[float]
    max_abs_discrepancy: float
    bound: float
    passed: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["decompositions"] = [r.to_dict() for r in self.decompositions]
        return d


def run_corollary_experiment(seed: SeedSpec, s_grid: Sequence[float], P: int, k: int = 2,
                             table: PrimeTable | None = None, bound: float = 1.0,
                             closure_tol: float = 1e-10) -> CorollaryReport:
    """Track log F_P(s) +- (1/2) log zeta(1+2s) - prime sum - remainder along an s grid.

    The deterministic truncation tail (1/2) E1(2 s log P) is removed from the
    track so that what remains is the bounded part of the decomposition.
    """
    table = table if table is not None else shared_table(int(P))
    reports, logz, lhs, disc, book, closure = [], [], [], [], [], []
    sign = 1 if k == 2 else -1
    for s in s_grid:
        rep = log_decomposition(seed, s, P, k, table)
        lz = math.log(zeta_one_plus(2.0 * s))
        tail = exp_integral_e1(2.0 * s * math.log(P))
        left = rep.log_product + sign * 0.5 * lz
        d = left - rep.prime_sum - rep.remainder - sign * 0.5 * tail
        expected = sign * 0.5 * (lz - 2.0 * rep.half_variance_sum - tail)
        reports.append(rep)
        logz.append(lz)
        lhs.append(left)
        disc.append(d)
        book.append(expected)
        closure.append(abs(d - expected))
    worst = max(abs(d) for d in disc)
    return CorollaryReport(k=k, P=int(P), sign=sign, decompositions=reports, log_zeta=logz,
                           lhs=lhs, discrepancy=disc, bookkeeping=book, closure_error=closure,
                           max_abs_discrepancy=worst, bound=bound,
                           passed=worst <= bound and max(closure) <= closure_tol)
