"""Exception types raised across the package."""


class DimensionMismatch(ValueError):
    """An input vector or table has the wrong number of actions."""


class RangeError(ValueError):
    """A rank, index, or count vector is outside the valid range."""


class NonFinitePayoff(ValueError):
    """A payoff function returned NaN or infinity."""


class ActionNotPlayed(ValueError):
    """A pure payoff was requested for an action with zero count."""


class EmptySupport(ValueError):
    """A restricted game was requested over no actions."""


class NegativeWeight(ValueError):
    """Replicator dynamics produced a negative weight (offset too large)."""


class UnsupportedActions(ValueError):
    """An operation needs a specific number of actions."""
