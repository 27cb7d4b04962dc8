"""Counter-based noise: the value attached to prime p depends only on (seed, model, p).

The 64 random bits for prime ``p`` are ``mix64(stream_key ^ p * GOLDEN)``
where ``stream_key`` is derived from the master seed and the stream label.
Because a prime is keyed by its value rather than its position, realizations
do not change with the truncation cutoff or the order of evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels_py
from ._backend import kernels

MASK64 = _kernels_py.MASK64
GOLDEN = _kernels_py.GOLDEN

KINDS = ("rademacher", "gaussian", "centered_uniform", "two_point")
_KIND_CODE = {name: code for code, name in enumerate(KINDS)}


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_label: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_label"):
            v = getattr(self, name)
            if not 0 <= v <= MASK64:
                raise ValueError(f"{name} must fit in 64 unsigned bits, got {v}")

    @property
    def key(self) -> int:
        inner = mix64(self.master_seed ^ 0x6A09E667F3BCC909)
        label = (self.stream_label * 0xD1B54A32D192ED03 + 0xBB67AE8584CAA73B) & MASK64
        return mix64(inner ^ label)

    def replica(self, label: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, label)


@dataclass(frozen=True)
class NoiseModel:
    """Law of the centred variables attached to primes.

    ``a``, ``b``, ``q`` are only meaningful for ``two_point``: the variable is
    ``a`` with probability ``q`` and ``b`` otherwise.
    """

    kind: str = "rademacher"
    sigma2: float = 1.0
    a: float = 0.0
    b: float = 0.0
    q: float = 0.0

    def __post_init__(self):
        if self.kind not in _KIND_CODE:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {KINDS}")
        if not (self.sigma2 > 0 and math.isfinite(self.sigma2)):
            raise ValueError(f"sigma2 must be positive and finite, got {self.sigma2}")
        if self.kind == "two_point":
            if not 0 < self.q < 1:
                raise ValueError(f"two_point q must lie in (0, 1), got {self.q}")
            mean = self.q * self.a + (1 - self.q) * self.b
            var = self.q * self.a**2 + (1 - self.q) * self.b**2
            scale = max(abs(self.a), abs(self.b))
            if abs(mean) > 1e-12 * scale:
                raise ValueError(f"two_point law must be centred, mean is {mean}")
            if abs(var - self.sigma2) > 1e-12 * var:
                raise ValueError(f"two_point variance {var} does not match sigma2={self.sigma2}")

    @classmethod
    def two_point(cls, a: float, b: float, q: float) -> "NoiseModel":
        return cls("two_point", q * a * a + (1 - q) * b * b, a, b, q)

    @classmethod
    def two_point_centered(cls, q: float, sigma2: float = 1.0) -> "NoiseModel":
        """The centred two-point law with P{eta = a} = q and variance sigma2."""
        sd = math.sqrt(sigma2)
        return cls("two_point", sigma2, sd * math.sqrt((1 - q) / q), -sd * math.sqrt(q / (1 - q)), q)

    @property
    def code(self) -> int:
        return _KIND_CODE[self.kind]

    @property
    def scale(self) -> float:
        """Standard deviation; the rademacher law takes the values +-scale."""
        return math.sqrt(self.sigma2)

    def scaled(self, c: float) -> "NoiseModel":
        """The law of c * eta."""
        if self.kind == "two_point":
            return NoiseModel.two_point(c * self.a, c * self.b, self.q)
        if c <= 0:
            raise ValueError("symmetric laws are rescaled by a positive factor only")
        return NoiseModel(self.kind, self.sigma2 * c * c)

    def kernel_args(self) -> tuple[int, float, float, float, float]:
        # centered_uniform takes its half-width sqrt(3 sigma2) as the scale
        width = math.sqrt(3.0 * self.sigma2) if self.kind == "centered_uniform" else self.scale
        return self.code, self.a, self.b, self.q, width

    def to_config(self) -> dict[str, object]:
        out: dict[str, object] = {"noise.kind": self.kind, "noise.sigma2": self.sigma2}
        if self.kind == "two_point":
            out.update({"noise.two_point.a": self.a, "noise.two_point.b": self.b,
                        "noise.two_point.q": self.q})
        return out

    @classmethod
    def from_config(cls, cfg: dict[str, object]) -> "NoiseModel":
        kind = str(cfg.get("noise.kind", "rademacher"))
        if kind == "two_point":
            a = float(cfg["noise.two_point.a"])
            b = float(cfg["noise.two_point.b"])
            q = float(cfg["noise.two_point.q"])
            model = cls.two_point(a, b, q)
            if "noise.sigma2" in cfg and not math.isclose(
                    float(cfg["noise.sigma2"]), model.sigma2, rel_tol=1e-12):
                raise ValueError("noise.sigma2 disagrees with the two_point parameters")
            return model
        return cls(kind, float(cfg.get("noise.sigma2", 1.0)))


RADEMACHER = NoiseModel("rademacher", 1.0)


def eta_array(seed: SeedSpec, model: NoiseModel, primes) -> np.ndarray:
    """Realizations of eta_p for each prime in ``primes`` (array order preserved)."""
    return kernels.eta_values(seed.key, *model.kernel_args(), np.asarray(primes, dtype=np.int64))


def eta_at(seed: SeedSpec, model: NoiseModel, p: int) -> float:
    return float(eta_array(seed, model, [p])[0])


def sign_at(seed: SeedSpec, p: int) -> int:
    """Rademacher sign f(p) in {-1, +1}."""
    return int(eta_at(seed, RADEMACHER, p))


def sign_array(seed: SeedSpec, primes) -> np.ndarray:
    return eta_array(seed, RADEMACHER, primes).astype(np.int8)
