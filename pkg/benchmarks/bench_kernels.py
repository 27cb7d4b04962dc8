"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--limit 10000000] [--repeat 3]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from primeseries import _kernels_py
from primeseries._backend import get_kernels


def cases(limit: int):
    primes = _kernels_py.sieve_primes(limit)
    weights = np.exp(-np.outer([0.5025, 0.5067, 0.5454], np.log(primes.astype(float))))
    n = min(limit, 10**6)
    spf = _kernels_py.spf_table(n)
    signs = np.where(np.arange(n + 1) % 3 == 0, -1, 1).astype(np.int8)
    return {
        f"sieve_primes({limit:.0e})": lambda k: k.sieve_primes(limit),
        f"spf_table({n:.0e})": lambda k: k.spf_table(n),
        f"mult_table({n:.0e}, k=2)": lambda k: k.mult_table(spf, signs, 2),
        f"power_sum({len(primes)} primes)": lambda k: k.power_sum(primes, 1.0002),
        f"weighted_noise_sums(3 x {len(primes)}, gaussian)":
            lambda k: k.weighted_noise_sums(7, 1, 0.0, 0.0, 0.0, 1.0, primes, weights),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--limit", type=lambda s: int(float(s)), default=10**7)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    try:
        compiled = get_kernels("compiled")
    except ImportError:
        raise SystemExit("compiled extension not built; run pip install -e . first")
    print(f"{'kernel':48s} {'compiled s':>11s} {'python s':>10s} {'speedup':>8s}")
    for name, fn in cases(args.limit).items():
        tc = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat))
        tp = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat))
        print(f"{name:48s} {tc:11.4f} {tp:10.4f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
