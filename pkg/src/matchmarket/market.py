"""Market instances, joint-utility rules and matchmaker selection.

A market instance holds the utilities of ``N`` product variants for one
vendor and ``M`` buyers.  The matchmaker picks the variant maximizing a
joint-utility rule:

* ``LINEAR``: ``x + y``
* ``KNORM``: ``(x**k + y**k)**(1/k)``, variants with a non-positive utility
  on either side are excluded
* ``MIN``: ``min(x, y)``, i.e. serve the weaker party
* ``MULTI_BUYER_AVERAGE``: ``y + mean_i x_i`` (per-buyer utility)

Scalar functions operate on a :class:`VariantTable`; the ``*_batch``
functions evaluate many independent realizations at once and are what the
Monte Carlo experiments use.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, InvalidParameterError, InvalidRuleError

__all__ = [
    "VariantTable",
    "RuleKind",
    "UtilityRule",
    "MatchStatus",
    "MatchOutcome",
    "BatchOutcome",
    "total_utility",
    "matchmaker_select",
    "scale_invariance_check",
    "rule_values",
    "select_batch",
]


@dataclass(frozen=True, eq=False)
class VariantTable:
    """Utilities of ``N`` variants: an ``(M, N)`` buyer matrix and an ``(N,)`` vendor vector."""

    buyer_utilities: np.ndarray
    vendor_utilities: np.ndarray

    def __post_init__(self):
        x = np.array(self.buyer_utilities, dtype=float)
        y = np.array(self.vendor_utilities, dtype=float)
        if x.ndim == 1:
            x = x[np.newaxis, :]
        if y.ndim != 1 or x.ndim != 2:
            raise InvalidInputError("buyer utilities must be (M, N) and vendor utilities (N,)")
        if y.size < 1 or x.shape[0] < 1 or x.shape[1] != y.size:
            raise InvalidInputError(f"inconsistent table shapes {x.shape} and {y.shape}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InvalidInputError("utilities must be finite")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "buyer_utilities", x)
        object.__setattr__(self, "vendor_utilities", y)

    @classmethod
    def single(cls, x, y) -> VariantTable:
        """Table with one buyer whose utilities are ``x``."""
        return cls(np.asarray(x, dtype=float)[np.newaxis, :], y)

    @property
    def n_variants(self) -> int:
        return self.vendor_utilities.size

    @property
    def n_buyers(self) -> int:
        return self.buyer_utilities.shape[0]

    @property
    def x(self) -> np.ndarray:
        """Buyer utilities of a single-buyer table."""
        if self.n_buyers != 1:
            raise InvalidInputError(f"table has {self.n_buyers} buyers, not one")
        return self.buyer_utilities[0]

    @property
    def y(self) -> np.ndarray:
        return self.vendor_utilities

    def scaled(self, c: float) -> VariantTable:
        return VariantTable(self.buyer_utilities * c, self.vendor_utilities * c)

    def shifted(self, c: float) -> VariantTable:
        return VariantTable(self.buyer_utilities + c, self.vendor_utilities + c)

    def prefix(self, n: int) -> VariantTable:
        """The first ``n`` variants."""
        return VariantTable(self.buyer_utilities[:, :n], self.vendor_utilities[:n])

    def __eq__(self, other):
        if not isinstance(other, VariantTable):
            return NotImplemented
        return np.array_equal(self.buyer_utilities, other.buyer_utilities) and np.array_equal(
            self.vendor_utilities, other.vendor_utilities
        )

    def to_csv(self, path) -> None:
        """Write ``alpha,y,x_1..x_M`` rows; floats use round-trip ``repr``."""
        header = ["alpha", "y"] + [f"x_{i + 1}" for i in range(self.n_buyers)]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for alpha in range(self.n_variants):
                row = [str(alpha), repr(float(self.vendor_utilities[alpha]))]
                row += [repr(float(v)) for v in self.buyer_utilities[:, alpha]]
                writer.writerow(row)

    @classmethod
    def from_csv(cls, path) -> VariantTable:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise InvalidInputError(f"{Path(path)} is empty")
        header, body = rows[0], rows[1:]
        if header[:2] != ["alpha", "y"] or len(header) < 3:
            raise InvalidInputError(f"{Path(path)}: expected header alpha,y,x_1..x_M, got {header}")
        if [int(r[0]) for r in body] != list(range(len(body))):
            raise InvalidInputError(f"{Path(path)}: variant indices must run 0..N-1 in order")
        y = [float(r[1]) for r in body]
        x = [[float(v) for v in r[2:]] for r in body]
        return cls(np.array(x, dtype=float).T.reshape(len(header) - 2, len(body)), y)


class RuleKind(str, enum.Enum):
    LINEAR = "linear"
    KNORM = "knorm"
    MIN = "min"
    MULTI_BUYER_AVERAGE = "multibuyer"


@dataclass(frozen=True)
class UtilityRule:
    kind: RuleKind
    k: float | None = None

    def __post_init__(self):
        kind = RuleKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is RuleKind.KNORM:
            if self.k is None or not (self.k > 0) or not math.isfinite(self.k):
                raise InvalidParameterError(f"k-norm rule needs a finite k > 0, got {self.k!r}")
            object.__setattr__(self, "k", float(self.k))
        elif self.k is not None:
            raise InvalidParameterError(f"k is only used by the k-norm rule, not {kind.value}")

    @classmethod
    def linear(cls) -> UtilityRule:
        return cls(RuleKind.LINEAR)

    @classmethod
    def knorm(cls, k: float) -> UtilityRule:
        return cls(RuleKind.KNORM, k)

    @classmethod
    def min_rule(cls) -> UtilityRule:
        return cls(RuleKind.MIN)

    @classmethod
    def multi_buyer(cls) -> UtilityRule:
        return cls(RuleKind.MULTI_BUYER_AVERAGE)

    def check_buyers(self, m: int) -> None:
        if self.kind is RuleKind.MULTI_BUYER_AVERAGE:
            return
        if m != 1:
            raise InvalidRuleError(f"the {self.kind.value} rule needs exactly one buyer, the table has {m}")


class MatchStatus(str, enum.Enum):
    TRADE = "trade"
    NO_TRADE = "no_trade"


@dataclass(frozen=True)
class MatchOutcome:
    """Result of selecting one variant.

    ``total_utility`` is the value of the selection rule at the chosen
    variant.  With several buyers ``buyer_utility`` is their mean utility and
    ``inequality`` is ``None``.  A no-trade outcome carries no utilities.
    """

    status: MatchStatus
    chosen_index: int | None = None
    total_utility: float | None = None
    buyer_utility: float | None = None
    vendor_utility: float | None = None
    inequality: float | None = None

    @classmethod
    def no_trade(cls) -> MatchOutcome:
        return cls(MatchStatus.NO_TRADE)

    @property
    def traded(self) -> bool:
        return self.status is MatchStatus.TRADE

    @property
    def sum_utility(self) -> float | None:
        """Buyer plus vendor utility of the chosen variant, whatever the rule."""
        if not self.traded:
            return None
        return self.buyer_utility + self.vendor_utility


def _knorm(x: float, y: float, k: float) -> float:
    hi, lo = (x, y) if x >= y else (y, x)
    # factor out the larger term so large k neither overflows nor underflows
    return hi * (1.0 + (lo / hi) ** k) ** (1.0 / k)


def total_utility(rule: UtilityRule, table: VariantTable, alpha: int) -> float | None:
    """Joint utility of variant ``alpha``; ``None`` when the rule excludes it."""
    rule.check_buyers(table.n_buyers)
    if not (0 <= alpha < table.n_variants):
        raise InvalidInputError(f"variant index {alpha} out of range for N={table.n_variants}")
    y = float(table.vendor_utilities[alpha])
    if rule.kind is RuleKind.MULTI_BUYER_AVERAGE:
        return y + float(np.mean(table.buyer_utilities[:, alpha]))
    x = float(table.buyer_utilities[0, alpha])
    if rule.kind is RuleKind.LINEAR:
        return x + y
    if rule.kind is RuleKind.MIN:
        return min(x, y)
    if x <= 0.0 or y <= 0.0:
        return None
    return _knorm(x, y, rule.k)


def matchmaker_select(rule: UtilityRule, table: VariantTable) -> MatchOutcome:
    """Pick the admissible variant with the largest joint utility (lowest index on ties)."""
    best, best_value = None, -math.inf
    for alpha in range(table.n_variants):
        value = total_utility(rule, table, alpha)
        if value is not None and (best is None or value > best_value):
            best, best_value = alpha, value
    if best is None:
        return MatchOutcome.no_trade()
    y = float(table.vendor_utilities[best])
    column = table.buyer_utilities[:, best]
    if table.n_buyers == 1:
        x = float(column[0])
        return MatchOutcome(MatchStatus.TRADE, best, best_value, x, y, abs(x - y))
    return MatchOutcome(MatchStatus.TRADE, best, best_value, float(np.mean(column)), y, None)


def scale_invariance_check(rule: UtilityRule, table: VariantTable, c: float) -> bool:
    """True iff scaling every utility by ``c > 0`` leaves the chosen variant unchanged."""
    if not c > 0:
        raise InvalidParameterError(f"scale factor must be positive, got {c!r}")
    if rule.kind is RuleKind.MULTI_BUYER_AVERAGE:
        raise InvalidRuleError("scale check is defined for the linear, min and k-norm rules")
    before = matchmaker_select(rule, table)
    after = matchmaker_select(rule, table.scaled(c))
    return before.chosen_index == after.chosen_index


def rule_values(rule: UtilityRule, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vectorized joint utility; excluded variants get ``-inf``.

    For the multi-buyer rule ``x`` has shape ``(..., M, N)``, otherwise it
    has the same shape as ``y``.
    """
    if rule.kind is RuleKind.MULTI_BUYER_AVERAGE:
        return y + np.mean(x, axis=-2)
    if rule.kind is RuleKind.LINEAR:
        return x + y
    if rule.kind is RuleKind.MIN:
        return np.minimum(x, y)
    hi = np.maximum(x, y)
    lo = np.minimum(x, y)
    ok = lo > 0.0
    with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
        ratio = np.where(ok, lo / np.where(ok, hi, 1.0), 0.0)
        value = hi * (1.0 + ratio**rule.k) ** (1.0 / rule.k)
    return np.where(ok, value, -np.inf)


@dataclass(frozen=True)
class BatchOutcome:
    """Per-realization selections; ``index`` is -1 and utilities NaN on no-trade."""

    index: np.ndarray
    total: np.ndarray
    buyer: np.ndarray
    vendor: np.ndarray

    @property
    def traded(self) -> np.ndarray:
        return self.index >= 0

    @property
    def inequality(self) -> np.ndarray:
        return np.abs(self.buyer - self.vendor)

    @property
    def sum_utility(self) -> np.ndarray:
        return self.buyer + self.vendor


def select_batch(rule: UtilityRule, x: np.ndarray, y: np.ndarray) -> BatchOutcome:
    """Matchmaker selection for each row of ``y`` (shape ``(R, N)``)."""
    values = rule_values(rule, x, y)
    if rule.kind is RuleKind.MULTI_BUYER_AVERAGE:
        buyer_all = np.mean(x, axis=-2)
    else:
        buyer_all = x
    idx = np.argmax(values, axis=-1)
    rows = np.arange(values.shape[0])
    total = values[rows, idx]
    traded = np.isfinite(total)
    buyer = np.where(traded, buyer_all[rows, idx], np.nan)
    vendor = np.where(traded, y[rows, idx], np.nan)
    return BatchOutcome(
        index=np.where(traded, idx, -1),
        total=np.where(traded, total, np.nan),
        buyer=buyer,
        vendor=vendor,
    )
