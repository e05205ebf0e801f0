"""Exception types shared across modules; the CLI maps them to exit codes."""


class PerturbiaError(Exception):
    exit_code = 1


class DomainError(PerturbiaError, ValueError):
    """Input outside the mathematical domain of an operation."""

    exit_code = 3


class ConfigurationError(DomainError):
    """Unknown field, bad derivative index, inconsistent declarations."""


class NotASymmetry(DomainError):
    """Generator does not leave the Lagrangian invariant up to a divergence."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ResourceError(PerturbiaError):
    """A size or order cap was exceeded."""

    exit_code = 4


class ResolutionError(DomainError):
    """Numerical grid too coarse for a stable estimate."""


class PoleOnRayError(DomainError):
    """Rational approximant has a pole on the Borel integration ray."""

    def __init__(self, message, pole):
        super().__init__(message)
        self.pole = pole


class NotConnectable(DomainError):
    """Two prescriptions differ by something no scalar counterterm can absorb."""


class ParseError(DomainError):
    def __init__(self, message, line=1, col=1):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
