"""Exception types raised by the library."""


class SubexpBumpError(Exception):
    """Base class for all library errors."""


class DomainError(SubexpBumpError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class ToleranceNotMet(SubexpBumpError):
    """Quadrature exhausted its evaluation budget before reaching tolerance."""

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class CrossValidationFailure(SubexpBumpError):
    """Two independent evaluation routes disagree beyond tolerance."""

    def __init__(self, message, real_axis=None, contour=None):
        super().__init__(message)
        self.real_axis = real_axis
        self.contour = contour


class InsufficientSamples(SubexpBumpError):
    pass


class TailNotNegligible(SubexpBumpError):
    pass


class WindowTooSmall(SubexpBumpError):
    pass
