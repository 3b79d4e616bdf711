"""Exception types shared across the package."""


class ArgumentError(ValueError):
    """An argument violates an operation's precondition."""


class DomainError(ValueError):
    """A decision vector lies outside the problem's box bounds."""


class NumericalError(ArithmeticError):
    """A numerical routine produced an unusable result."""


class UnsupportedError(NotImplementedError):
    """The requested feature is not available for this object."""


class ProblemDefinitionError(RuntimeError):
    """A benchmark function produced a non-finite value."""


class ConfigError(ValueError):
    """A run configuration failed validation.

    ``field`` names the offending configuration key when known.
    """

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class DegenerateError(ValueError):
    """A metric is undefined for the given (degenerate) input."""
