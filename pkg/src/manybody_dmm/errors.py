"""Exception hierarchy shared by all modules."""


class DMMError(Exception):
    """Base class for errors raised by this package."""

    step = None  # set by the time loop when the error escapes a step


class DomainError(DMMError, ValueError):
    """An argument lies outside the domain of a formula."""


class CloseEncounterError(DomainError):
    """Two bodies are closer than the collision threshold."""


class SingularityError(DomainError):
    """Two point vortices coincide (or a sphere pair is degenerate)."""


class UnsupportedQueryError(DMMError):
    """The requested quantity is not defined for this system."""


class NonConvergenceError(DMMError, RuntimeError):
    """Fixed-point iteration exhausted its iteration budget."""

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


class DivergenceError(NonConvergenceError):
    """An iterate became NaN or infinite."""


class InfeasiblePackingError(DMMError, RuntimeError):
    """Rejection sampling ran out of draws."""


class ConfigError(DMMError, ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class SchemaError(DMMError, ValueError):
    """A data file does not match its expected layout."""
