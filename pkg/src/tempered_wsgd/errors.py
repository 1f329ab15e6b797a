"""Exception and warning types raised across the package."""


class DomainError(ValueError):
    """A parameter lies outside the range an operation is defined on."""


class PoleError(DomainError):
    """Gamma function evaluated at a non-positive integer."""


class ConvergenceError(RuntimeError):
    """An iterative evaluation (series, eigensolver) did not converge."""


class SingularSystemError(RuntimeError):
    """The Crank-Nicolson system matrix could not be factorized."""


class ConfigError(ValueError):
    """Malformed run configuration.

    ``line`` is the 1-based line number in the config file, when known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class StabilityWarning(UserWarning):
    """The generating function of a scheme matrix is not certified negative."""
