"""Custom exceptions for banana with contextual error information."""


class BananaException(Exception):
    """Base exception for all banana errors."""

    def __init__(self, message: str, context: dict = None):
        super().__init__(message)
        self.message = message
        self.context = context or {}

    def __str__(self):
        if self.context:
            context_str = ', '.join(f"{k}={v}" for k, v in self.context.items())
            return f"{self.message} (Context: {context_str})"
        return self.message


class PrecisionError(BananaException):
    """Raised when a precision context is invalid."""
    pass


class DomainError(BananaException):
    """Raised when an argument lies outside an operation's domain."""
    pass


class ConvergenceError(BananaException):
    """Raised when a series, iteration or tail fails to converge within its cap."""
    pass


class QuadratureError(BananaException):
    """Raised when a quadrature grid is invalid or the integrand is singular."""
    pass


class CoefficientMismatchError(BananaException):
    """Raised when two constructions of the same q-expansion disagree."""
    pass


class SignUndeterminedError(BananaException):
    """Raised when no functional-equation sign is self-consistent."""
    pass


class OperatorOrderError(BananaException):
    """Raised when a differential operator has the wrong order for an operation."""
    pass


class UnknownCheckError(BananaException):
    """Raised when a check id is not in the registry."""
    pass


class CacheError(BananaException):
    """Raised when the constant cache cannot be used."""
    pass
