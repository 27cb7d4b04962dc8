"""Prime tables, prime counting and enumeration of P-smooth k-free integers."""

from __future__ import annotations

import functools
import itertools
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._backend import kernels

DEFAULT_SEGMENT_BITS = 1 << 20
DEFAULT_ENUMERATION_CAP = 10**6

CACHE_MAGIC = b"PRMT"
CACHE_VERSION = 1
_HEADER = struct.Struct("<4sIQQ")  # magic, version, limit, count


class ResourceLimitError(RuntimeError):
    """Raised when an exhaustive enumeration would exceed its configured cap."""


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``limit`` in ascending order.

    ``primes`` is a read-only int64 array; counting queries are binary
    searches over it.
    """

    limit: int
    primes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.primes.setflags(write=False)

    def __len__(self) -> int:
        return len(self.primes)

    def upto(self, x: float) -> np.ndarray:
        """View of the primes <= x."""
        return self.primes[: prime_count(self, x)]


@dataclass(frozen=True)
class SmoothSet:
    P: int
    k: int
    primes: tuple[int, ...]
    entries: list[tuple[int, tuple[int, ...]]]

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def values(self) -> list[int]:
        return [n for n, _ in self.entries]


def sieve_primes(limit: int, segment_bits: int = DEFAULT_SEGMENT_BITS) -> PrimeTable:
    """Segmented odd-only sieve of Eratosthenes up to ``limit`` inclusive."""
    limit = int(limit)
    if limit < 2:
        raise ValueError(f"sieve limit must be >= 2, got {limit}")
    return PrimeTable(limit, kernels.sieve_primes(limit, int(segment_bits)))


@functools.lru_cache(maxsize=4)
def shared_table(limit: int) -> PrimeTable:
    """Process-wide memoized sieve; tables are immutable so sharing is safe."""
    return sieve_primes(limit)


def prime_count(table: PrimeTable, x: float) -> int:
    """Number of primes <= x; x may not exceed the table's limit."""
    if x > table.limit:
        raise ValueError(f"x={x} is beyond the sieve limit {table.limit}")
    if x < 2:
        return 0
    return int(np.searchsorted(table.primes, math.floor(x), side="right"))


def enumerate_smooth_kfree(table: PrimeTable, P: int, k: int,
                           cap: int = DEFAULT_ENUMERATION_CAP) -> SmoothSet:
    """Every n whose prime factors are <= P, each with exponent at most k-1."""
    if P > table.limit:
        raise ValueError(f"P={P} is beyond the sieve limit {table.limit}")
    if k < 2:
        raise ValueError(f"freeness order k must be >= 2, got {k}")
    ps = tuple(int(p) for p in table.upto(P))
    size = k ** len(ps)
    if size > cap:
        raise ResourceLimitError(
            f"smooth k-free set for P={P}, k={k} has {size} entries (cap {cap})")
    entries = []
    for exps in itertools.product(range(k), repeat=len(ps)):
        n = 1
        for p, e in zip(ps, exps):
            n *= p**e
        entries.append((n, exps))
    entries.sort()
    return SmoothSet(P=P, k=k, primes=ps, entries=entries)


def squarefree_flags(n: int) -> np.ndarray:
    """Boolean array, True at square-free m in 0..n (index 0 False)."""
    flags = np.ones(n + 1, dtype=bool)
    flags[0] = False
    for d in range(2, math.isqrt(n) + 1):
        flags[d * d::d * d] = False
    return flags


def spf_table(n: int) -> np.ndarray:
    """Smallest-prime-factor table for 0..n."""
    if n < 1:
        raise ValueError(f"table bound must be >= 1, got {n}")
    return kernels.spf_table(int(n))


def save_prime_cache(table: PrimeTable, path: str | Path) -> None:
    """Write the table as header + little-endian uint16 gaps between primes."""
    gaps = np.diff(table.primes, prepend=0)
    if len(gaps) and gaps.max() > 0xFFFF:
        raise ValueError("prime gap does not fit the cache encoding")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, table.limit, len(gaps)))
        fh.write(gaps.astype("<u2").tobytes())


def load_prime_cache(path: str | Path) -> PrimeTable:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValueError(f"{path}: truncated prime cache")
    magic, version, limit, count = _HEADER.unpack_from(data)
    if magic != CACHE_MAGIC:
        raise ValueError(f"{path}: not a prime cache (bad magic)")
    if version != CACHE_VERSION:
        raise ValueError(f"{path}: unsupported cache version {version}")
    gaps = np.frombuffer(data, dtype="<u2", offset=_HEADER.size)
    if len(gaps) != count:
        raise ValueError(f"{path}: expected {count} entries, found {len(gaps)}")
    return PrimeTable(int(limit), np.cumsum(gaps, dtype=np.int64))


def load_or_sieve(limit: int, cache: str | Path | None = None) -> PrimeTable:
    """Reuse a cache file covering ``limit`` if one exists, otherwise sieve (and save)."""
    if cache is not None and Path(cache).exists():
        table = load_prime_cache(cache)
        if table.limit >= limit:
            if table.limit == limit:
                return table
            return PrimeTable(limit, table.primes[: prime_count(table, limit)].copy())
    table = sieve_primes(limit)
    if cache is not None:
        save_prime_cache(table, cache)
    return table


def is_prime_trial(n: int) -> bool:
    """Trial division; used as an independent oracle in checks."""
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


__all__ = [
    "PrimeTable", "SmoothSet", "ResourceLimitError", "sieve_primes", "shared_table", "prime_count",
    "enumerate_smooth_kfree", "squarefree_flags", "spf_table", "save_prime_cache",
    "load_prime_cache", "load_or_sieve", "is_prime_trial",
]
