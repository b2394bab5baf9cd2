"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or inconsistent user input: bad shapes, non-finite entries,
    negative penalty weights, thresholds on the wrong side of an orthant."""


class ConvergenceError(RuntimeError):
    """The solver hit its iteration cap before certifying optimality.

    Carries the best iterate seen and its first-order residual so callers can
    still inspect (or reject) the run.
    """

    def __init__(self, message, b=None, kkt_residual=None):
        super().__init__(message)
        self.b = b
        self.kkt_residual = kkt_residual


class DimensionLimitError(RuntimeError):
    """A deterministic (quadrature/enumeration) path was asked to work in too
    many dimensions; the message names the Monte Carlo alternative."""


class CombinatorialLimitError(RuntimeError):
    """Subset/sign-pattern enumeration would exceed the configured limit."""


class NumericalError(RuntimeError):
    """A numerical routine (LP pivot cap, inconsistent certificate, failed
    cross-check) could not certify its own result."""


class ConditioningError(RuntimeError):
    """Conditioning on an event of (numerically) zero probability."""
