"""Exception hierarchy shared by all modules.

The CLI maps each family to a distinct exit code.
"""


class LeakyBoseError(Exception):
    exit_code = 1


class ValidationError(LeakyBoseError, ValueError):
    """Invalid parameters or configuration."""

    exit_code = 2


class RegimeError(LeakyBoseError):
    """Inputs outside the regime where the physics applies."""

    exit_code = 3


class NumericalError(LeakyBoseError, ArithmeticError):
    exit_code = 4


class TruncationError(NumericalError):
    """Probability mass lost beyond a truncated basis exceeds tolerance."""


class CutoffError(NumericalError):
    """Momentum cutoff too small for the integral to be converged."""
