"""Exception types shared across the package."""


class EnumerationCapError(ValueError):
    """Scenario enumeration would exceed the supported outbreak size."""


class EvaluationError(RuntimeError):
    """An objective function returned a non-finite value."""


class SingularModelError(RuntimeError):
    """The model design or information matrix is singular."""


class IntervalUnavailableError(RuntimeError):
    """A confidence interval cannot be computed (no standard error)."""


class DataError(ValueError):
    """A dataset failed validation; the message names the row and column."""
