"""Exponential integral E1 and the Riemann zeta function on (1, inf)."""

from __future__ import annotations

import functools
import math

import numpy as np

from ._backend import kernels

EULER_GAMMA = 0.57721566490153286061
ZETA_TERMS = 10**6


def exp_integral_e1(x: float) -> float:
    """E1(x) = int_x^inf e^{-t}/t dt for x > 0.

    Power series below x = 1, Lentz continued fraction above.
    """
    if not x > 0:
        raise ValueError(f"E1 is defined for x > 0, got {x}")
    if x <= 1.0:
        total = 0.0
        term = 1.0
        k = 0
        while True:
            k += 1
            term *= -x / k
            contrib = term / k
            total += contrib
            if abs(contrib) < 1e-18 * max(abs(total), 1e-300):
                break
        return -EULER_GAMMA - math.log(x) - total
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x)


@functools.lru_cache(maxsize=2)
def _log_n(n_terms: int) -> np.ndarray:
    return np.log(np.arange(1, n_terms, dtype=np.float64))


def zeta_one_plus(eps: float, n_terms: int = ZETA_TERMS) -> float:
    """zeta(1 + eps) for eps > 0, taking eps directly to avoid cancellation in r - 1.

    Direct sum over n < N plus Euler-Maclaurin tail through the B4 term.
    """
    if not eps > 0:
        raise ValueError(f"zeta(r) needs r > 1, got r - 1 = {eps}")
    r = 1.0 + eps
    logn = _log_n(n_terms)
    head = kernels.compensated_sum(np.exp(-r * logn))
    N = float(n_terms)
    lnN = math.log(N)
    fN = math.exp(-r * lnN)
    tail = (math.exp(-eps * lnN) / eps
            + 0.5 * fN
            + r * fN / (12.0 * N)
            - r * (r + 1.0) * (r + 2.0) * fN / (720.0 * N**3))
    return head + tail


def zeta_series(r: float, n_terms: int = ZETA_TERMS) -> float:
    """Riemann zeta(r) for real r > 1."""
    if not r > 1:
        raise ValueError(f"zeta series diverges for r <= 1, got {r}")
    return zeta_one_plus(r - 1.0, n_terms)
