"""Variant selection without a matchmaker.

``vendor_proposes``: the vendor offers variants from its most to its least
preferred; the buyer accepts the first one that gives them at least as much
as the vendor (``x >= y``).

``buyer_search``: the buyer examines ``n`` variants, keeps the best, and pays
``beta`` per examined variant.  ``n_opt_scan`` estimates the expected net
utility for every ``n`` up to ``n_max`` with common random numbers (prefix
maxima of one stream per realization) and returns its maximizer.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial

import numpy as np

from .distributions import DistributionSpec, SeedSpec, draw, make_rng
from .errors import InvalidInputError, InvalidParameterError
from .market import BatchOutcome, MatchOutcome, MatchStatus, VariantTable
from .montecarlo import DEFAULT_BLOCK_SIZE, block_moments, merge_moments, run_blocks

__all__ = [
    "vendor_proposes",
    "vendor_proposes_batch",
    "SearchParams",
    "SearchOutcome",
    "search_cost",
    "buyer_search",
    "NOptScan",
    "prefix_max_curve",
    "n_opt_scan",
    "rises_then_falls",
    "n_opt_from_curve",
]


def vendor_proposes(table: VariantTable) -> MatchOutcome:
    if table.n_buyers != 1:
        raise InvalidInputError(f"vendor-proposes needs exactly one buyer, the table has {table.n_buyers}")
    x, y = table.x, table.y
    for alpha in np.argsort(-y, kind="stable"):
        if x[alpha] >= y[alpha]:
            xa, ya = float(x[alpha]), float(y[alpha])
            return MatchOutcome(MatchStatus.TRADE, int(alpha), xa + ya, xa, ya, xa - ya)
    return MatchOutcome.no_trade()


def vendor_proposes_batch(x: np.ndarray, y: np.ndarray) -> BatchOutcome:
    """Row-wise vendor-proposes outcome for ``(R, N)`` utility arrays."""
    masked = np.where(x >= y, y, -np.inf)
    idx = np.argmax(masked, axis=-1)
    rows = np.arange(x.shape[0])
    traded = np.isfinite(masked[rows, idx])
    buyer = np.where(traded, x[rows, idx], np.nan)
    vendor = np.where(traded, y[rows, idx], np.nan)
    return BatchOutcome(np.where(traded, idx, -1), buyer + vendor, buyer, vendor)


@dataclass(frozen=True)
class SearchParams:
    """Cost per examined variant, number examined, and the buyer's utility law.

    ``cost_exponent`` replaces the linear cost ``beta n`` with ``beta n**p``;
    only ``p = 1`` is covered by the analytic results.
    """

    beta: float
    n: int
    spec: DistributionSpec
    cost_exponent: float = 1.0

    def __post_init__(self):
        if not self.beta > 0:
            raise InvalidParameterError(f"beta must be positive, got {self.beta!r}")
        if self.n < 1:
            raise InvalidParameterError(f"n must be at least 1, got {self.n}")
        if not self.cost_exponent > 0:
            raise InvalidParameterError(f"cost exponent must be positive, got {self.cost_exponent!r}")


@dataclass(frozen=True)
class SearchOutcome:
    best_utility: float
    net_utility: float
    examined: int


def search_cost(beta, n, exponent: float = 1.0):
    n = np.asarray(n, dtype=float)
    return beta * n if exponent == 1.0 else beta * n**exponent


def buyer_search(params: SearchParams, seed: SeedSpec) -> SearchOutcome:
    draws = draw(params.spec, params.n, make_rng(seed))
    best = float(np.max(draws))
    cost = float(search_cost(params.beta, params.n, params.cost_exponent))
    return SearchOutcome(best, best - cost, params.n)


def _prefix_max_kernel(spec: DistributionSpec, n_max: int, keep, rng, count):
    x_m = np.maximum.accumulate(draw(spec, (count, n_max), rng), axis=1)
    out = block_moments(x_m)
    out["kept"] = x_m[:, [n - 1 for n in keep]]
    return out


def prefix_max_curve(
    spec: DistributionSpec,
    n_max: int,
    realizations: int,
    seed: SeedSpec,
    *,
    keep: tuple[int, ...] = (),
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
    progress: bool = False,
):
    """Mean and standard error of the running maximum for ``n = 1..n_max``.

    Realizations share one stream across ``n`` (the maximum of the first
    ``n`` draws).  Per-realization maxima at the sizes listed in ``keep`` are
    returned as a third value, an ``(realizations, len(keep))`` array.
    """
    if any(not 1 <= n <= n_max for n in keep):
        raise InvalidParameterError(f"kept sizes must lie in 1..{n_max}, got {keep}")
    out = run_blocks(
        partial(_prefix_max_kernel, spec, n_max, tuple(keep)),
        realizations,
        seed.master_seed,
        block_size=block_size,
        workers=workers,
        first_index=seed.realization_index,
        progress=progress,
    )
    mean, se, _ = merge_moments(out["count"], out["mean"], out["m2"])
    if keep:
        return mean, se, out["kept"]
    return mean, se


def rises_then_falls(mean, se, z: float = 3.0) -> bool:
    """True if the curve climbs to an interior peak and then declines.

    Wiggles smaller than ``z`` times the largest standard error are treated
    as flat, so only one significant change of direction is allowed.
    """
    mean = np.asarray(mean, dtype=float)
    tol = z * float(np.max(se))
    peak = int(np.argmax(mean))
    if peak == 0 or peak == mean.size - 1:
        return False
    if mean[peak] - mean[0] <= tol or mean[peak] - mean[-1] <= tol:
        return False
    rising = mean[: peak + 1]
    falling = mean[peak:]
    drop_before = np.max(np.maximum.accumulate(rising) - rising)
    rise_after = np.max(falling - np.minimum.accumulate(falling))
    return bool(drop_before <= tol and rise_after <= tol)


@dataclass(frozen=True)
class NOptScan:
    """Monte Carlo estimate of ``u_S(beta, n)`` for ``n = 1..n_max``.

    ``bracketed`` is False when the maximum sits at ``n_max``, i.e. the
    curve may still be rising and ``n_opt`` is only a lower bound.
    """

    n_opt: int
    n: np.ndarray
    mean: np.ndarray
    se: np.ndarray
    bracketed: bool

    @property
    def curve(self) -> list[tuple[int, float, float]]:
        return [(int(n), float(m), float(s)) for n, m, s in zip(self.n, self.mean, self.se)]

    def rises_then_falls(self, z: float = 3.0) -> bool:
        return rises_then_falls(self.mean, self.se, z)


def n_opt_scan(
    beta: float,
    spec: DistributionSpec,
    n_max: int,
    realizations: int,
    seed: SeedSpec,
    *,
    cost_exponent: float = 1.0,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
) -> NOptScan:
    if not beta > 0:
        raise InvalidParameterError(f"beta must be positive, got {beta!r}")
    if n_max < 2:
        raise InvalidParameterError(f"n_max must be at least 2, got {n_max}")
    if realizations < 100:
        raise InvalidParameterError(f"n_opt_scan needs at least 100 realizations, got {realizations}")
    x_mean, se = prefix_max_curve(spec, n_max, realizations, seed, block_size=block_size, workers=workers)
    n = np.arange(1, n_max + 1)
    mean = x_mean - search_cost(beta, n, cost_exponent)
    n_opt = int(np.argmax(mean)) + 1
    return NOptScan(n_opt, n, mean, se, n_opt < n_max)


def n_opt_from_curve(x_mean, beta: float, cost_exponent: float = 1.0) -> tuple[int, bool]:
    """Optimal ``n`` and bracketing flag from a mean running-maximum curve."""
    x_mean = np.asarray(x_mean, dtype=float)
    n = np.arange(1, x_mean.size + 1)
    n_opt = int(np.argmax(x_mean - search_cost(beta, n, cost_exponent))) + 1
    return n_opt, n_opt < x_mean.size
