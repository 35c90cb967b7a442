"""Exception types raised by matchmarket."""


class MatchMarketError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(MatchMarketError, ValueError):
    """A distribution, rule or experiment parameter is out of range."""


class InvalidInputError(MatchMarketError, ValueError):
    """Input data has the wrong shape or is statistically degenerate."""


class InvalidRuleError(MatchMarketError, ValueError):
    """A utility rule was applied to a table it does not support."""


class DomainError(MatchMarketError, ValueError):
    """A function was evaluated outside its domain."""


class ApproximationDomainError(DomainError):
    """An analytic approximation was evaluated where it is not valid."""


class DegenerateVarianceError(DomainError):
    """The total utility has zero variance (perfect anti-correlation)."""


class DivergentMeanError(DomainError):
    """The requested mean does not exist (power-law exponent too small)."""
