class PrimboundsError(Exception):
    pass


class ResourceLimitError(PrimboundsError):
    """A lattice is larger than the configured DP ceiling."""


class InvariantViolation(PrimboundsError):
    """A computed quantity broke a mathematical invariant (a counting bug)."""


class FingerprintError(PrimboundsError):
    """A cached table belongs to a different basis or count kind."""


class CacheFormatError(PrimboundsError):
    pass


class BudgetExceeded(PrimboundsError):
    """A counting run produced more DP states than it was allowed."""
