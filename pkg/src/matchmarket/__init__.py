"""Simulation and analytics for a toy buyer-vendor market with a matchmaker."""

__version__ = "0.1.0"

from .distributions import (  # noqa: E402
    CorrelationParams,
    DistributionKind,
    DistributionSpec,
    SeedSpec,
    cdf_complement,
    pdf,
    pearson,
    sample,
    sample_correlated_pair,
)
from .market import (  # noqa: E402
    MatchOutcome,
    MatchStatus,
    RuleKind,
    UtilityRule,
    VariantTable,
    matchmaker_select,
    scale_invariance_check,
    total_utility,
)
from .protocols import (  # noqa: E402
    SearchOutcome,
    SearchParams,
    buyer_search,
    n_opt_scan,
    vendor_proposes,
)
