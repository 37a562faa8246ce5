"""Exception hierarchy shared across the package."""


class HeatstructError(Exception):
    """Base class for all package errors."""


class ParameterError(HeatstructError, ValueError):
    """A value violates a documented precondition."""


class ConvergenceError(HeatstructError):
    """A series or iteration failed to converge within its budget."""


class DivergenceError(HeatstructError):
    """An iteration left the basin of attraction (residual growth, blow-out)."""


class InsufficientSeriesError(HeatstructError):
    """A diagnostics series does not span the required amplitude growth."""
