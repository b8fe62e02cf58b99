"""Exception hierarchy shared by all modules."""


class NonrecipError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(NonrecipError, ValueError):
    """Invalid or missing configuration value.

    ``key`` names the offending field so callers can report it verbatim.
    """

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class SingularityError(NonrecipError, ZeroDivisionError):
    """A closed-form denominator or linear system vanished."""


class ContractError(NonrecipError, ValueError):
    """A function was called outside the regime its closed form covers."""


class EigenConvergenceError(NonrecipError, ArithmeticError):
    def __init__(self, message, residual):
        self.residual = residual
        super().__init__(f"{message} (residual norm {residual:.3e})")


class StabilityError(NonrecipError, ValueError):
    """Integrator step too large for the drift matrix."""


class DivergenceError(NonrecipError, ArithmeticError):
    def __init__(self, step):
        self.step = step
        super().__init__(f"non-finite state encountered at step {step}")


class InsufficientDataError(NonrecipError, ValueError):
    """Too few valid samples for a fit or feature extraction."""


class DegenerateInputError(NonrecipError, ValueError):
    """A normalisation constant or coupling needed by a formula is zero."""
