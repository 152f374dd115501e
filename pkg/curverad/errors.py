"""Exceptions raised by curverad and their CLI exit codes."""

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3


class CurveRadError(Exception):
    """Base class for all curverad errors."""


class InvalidArgumentError(CurveRadError, ValueError):
    """A parameter is outside its allowed range."""


class CurveSpecError(InvalidArgumentError):
    """A curve or transform spec could not be parsed."""


class DomainError(CurveRadError, ArithmeticError):
    """The requested quantity is not defined for this input."""


class InversionCenterError(DomainError):
    """The curve passes through (or too close to) the inversion center."""


class NotSimpleCurveError(DomainError):
    """The curve self-intersects at the sampled resolution."""


class ResolutionError(DomainError):
    """A quadrature would need more nodes than its budget allows."""


class UnsupportedDimensionError(CurveRadError):
    """The operation is not defined in this dimension."""


class IndeterminateError(CurveRadError):
    """Not enough data to classify or fit."""


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit-code contract."""
    if isinstance(exc, InvalidArgumentError):
        return EXIT_USAGE
    if isinstance(exc, DomainError):
        return EXIT_DOMAIN
    return EXIT_FAILURE
