"""Seeded sampling and exact densities of the utility distributions.

Three families are supported: the symmetric uniform law on [-1, 1], the
standard normal law, and a Pareto-type power law on [1, inf) with density
``(gamma - 1) * x**(-gamma)``.  Correlated buyer/vendor pairs are built from
three independent standard normals sharing a common component.

Every random stream is a pure function of a :class:`SeedSpec`, so sweeps can
be replayed and split across workers without changing their output.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInputError, InvalidParameterError

__all__ = [
    "DistributionKind",
    "DistributionSpec",
    "CorrelationParams",
    "SeedSpec",
    "make_rng",
    "draw",
    "draw_correlated_pair",
    "combine_correlated",
    "sample",
    "sample_correlated_pair",
    "pearson",
    "pdf",
    "cdf_complement",
    "support",
]

_UINT64_LIMIT = 2**64


class DistributionKind(str, enum.Enum):
    UNIFORM_SYM = "uniform"
    STD_NORMAL = "normal"
    POWER_LAW = "powerlaw"


@dataclass(frozen=True)
class DistributionSpec:
    """One of the three utility distributions.

    ``gamma`` is only meaningful for the power law and must exceed 2 there,
    otherwise the mean of the sample maximum diverges.
    """

    kind: DistributionKind
    gamma: float | None = None

    def __post_init__(self):
        kind = DistributionKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is DistributionKind.POWER_LAW:
            if self.gamma is None or not math.isfinite(self.gamma) or self.gamma <= 2:
                raise InvalidParameterError(
                    f"power law needs a finite exponent gamma > 2, got {self.gamma!r}"
                )
            object.__setattr__(self, "gamma", float(self.gamma))
        elif self.gamma is not None:
            raise InvalidParameterError(f"gamma is only used by the power law, not {kind.value}")

    @classmethod
    def uniform(cls) -> DistributionSpec:
        return cls(DistributionKind.UNIFORM_SYM)

    @classmethod
    def normal(cls) -> DistributionSpec:
        return cls(DistributionKind.STD_NORMAL)

    @classmethod
    def power_law(cls, gamma: float) -> DistributionSpec:
        return cls(DistributionKind.POWER_LAW, gamma)

    @property
    def name(self) -> str:
        return self.kind.value

    def mean(self) -> float:
        if self.kind is DistributionKind.POWER_LAW:
            return (self.gamma - 1.0) / (self.gamma - 2.0)
        return 0.0


@dataclass(frozen=True)
class CorrelationParams:
    """Strength ``t`` in [0, 1] and sign ``s`` in {+1, -1} of the shared component.

    The Pearson correlation of the generated pair is ``s * t``.
    """

    t: float
    s: int = 1

    def __post_init__(self):
        if not (0.0 <= self.t <= 1.0):
            raise InvalidParameterError(f"correlation strength t must lie in [0, 1], got {self.t!r}")
        if self.s not in (1, -1):
            raise InvalidParameterError(f"correlation sign s must be +1 or -1, got {self.s!r}")

    @classmethod
    def from_st(cls, st: float) -> CorrelationParams:
        """Build the parameters realizing a target correlation ``st`` in [-1, 1]."""
        if not (-1.0 <= st <= 1.0):
            raise InvalidParameterError(f"correlation st must lie in [-1, 1], got {st!r}")
        return cls(t=abs(float(st)), s=-1 if st < 0 else 1)

    @property
    def st(self) -> float:
        return self.s * self.t


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    realization_index: int = 0

    def __post_init__(self):
        if not (0 <= self.master_seed < _UINT64_LIMIT):
            raise InvalidParameterError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed!r}")
        if self.realization_index < 0:
            raise InvalidParameterError(f"realization_index must be non-negative, got {self.realization_index!r}")


def make_rng(seed: SeedSpec) -> np.random.Generator:
    """Counter-based generator keyed by (master_seed, realization_index)."""
    seq = np.random.SeedSequence(seed.master_seed, spawn_key=(seed.realization_index,))
    return np.random.Generator(np.random.Philox(seq))


def draw(spec: DistributionSpec, size, rng: np.random.Generator) -> np.ndarray:
    """Draw an array of the given shape from ``spec`` using ``rng``."""
    if spec.kind is DistributionKind.UNIFORM_SYM:
        return rng.uniform(-1.0, 1.0, size)
    if spec.kind is DistributionKind.STD_NORMAL:
        return rng.standard_normal(size)
    # 1 - random() lies in (0, 1], so the transform never produces inf
    u = 1.0 - rng.random(size)
    return u ** (-1.0 / (spec.gamma - 1.0))


def draw_correlated_pair(params: CorrelationParams, size, rng: np.random.Generator):
    """Return ``(x, y)`` arrays built from independent normals X, Y, C.

    ``x = sqrt(1-t) X + sqrt(t) C`` and ``y = sqrt(1-t) Y + s sqrt(t) C``.
    """
    big_x = rng.standard_normal(size)
    big_y = rng.standard_normal(size)
    big_c = rng.standard_normal(size)
    return combine_correlated(params, big_x, big_y, big_c)


def combine_correlated(params: CorrelationParams, big_x, big_y, big_c):
    """Mix independent normals X, Y and a shared C into a correlated pair."""
    indep = math.sqrt(1.0 - params.t)
    common = math.sqrt(params.t)
    x = indep * big_x + common * big_c
    y = indep * big_y + params.s * common * big_c
    return x, y


def sample(spec: DistributionSpec, n: int, seed: SeedSpec) -> np.ndarray:
    if n < 1:
        raise InvalidParameterError(f"sample size must be positive, got {n}")
    return draw(spec, n, make_rng(seed))


def sample_correlated_pair(params: CorrelationParams, n: int, seed: SeedSpec) -> np.ndarray:
    """``n`` correlated pairs as an ``(n, 2)`` array with columns x and y."""
    if n < 1:
        raise InvalidParameterError(f"sample size must be positive, got {n}")
    x, y = draw_correlated_pair(params, n, make_rng(seed))
    return np.column_stack([x, y])


def pearson(xs, ys) -> float:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise InvalidInputError(f"pearson needs two 1-d sequences of equal length, got {xs.shape} and {ys.shape}")
    if xs.size < 2:
        raise InvalidInputError("pearson needs at least two observations")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise InvalidInputError("pearson is undefined for a constant sequence")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def support(spec: DistributionSpec) -> tuple[float, float]:
    if spec.kind is DistributionKind.UNIFORM_SYM:
        return -1.0, 1.0
    if spec.kind is DistributionKind.STD_NORMAL:
        return -math.inf, math.inf
    return 1.0, math.inf


def _check_support(spec: DistributionSpec, x: float):
    lo, hi = support(spec)
    if math.isnan(x) or x < lo or x > hi:
        raise DomainError(f"x={x!r} lies outside the support [{lo}, {hi}] of the {spec.name} distribution")


def pdf(spec: DistributionSpec, x: float) -> float:
    x = float(x)
    _check_support(spec, x)
    if spec.kind is DistributionKind.UNIFORM_SYM:
        return 0.5
    if spec.kind is DistributionKind.STD_NORMAL:
        return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    return (spec.gamma - 1.0) * x ** (-spec.gamma)


def cdf_complement(spec: DistributionSpec, x: float) -> float:
    """Upper tail probability P(X > x)."""
    x = float(x)
    _check_support(spec, x)
    if spec.kind is DistributionKind.UNIFORM_SYM:
        return (1.0 - x) / 2.0
    if spec.kind is DistributionKind.STD_NORMAL:
        return 0.5 * math.erfc(x / math.sqrt(2.0))
    return x ** (1.0 - spec.gamma)
