"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class ParseError(ValueError):
    """Malformed potential input. ``line`` is 1-based, or None if not line-specific."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IntegrationError(RuntimeError):
    """The adaptive integrator could not reach the requested endpoint."""


class NegativeSpectrumSuspected(RuntimeError):
    """The requested eigenvalue appears to be <= 0, out of reach of the phase method."""


class OracleError(RuntimeError):
    """The finite-difference oracle could not produce the requested values."""


class IneligiblePotential(ValueError):
    """The potential does not satisfy the hypotheses of the selected check."""
