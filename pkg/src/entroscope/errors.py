"""Exception types shared by all engines.

Validation problems derive from :class:`DomainError` (CLI exit code 2);
numerical breakdowns derive from :class:`NumericalFailureError` (exit code 3).
"""


class EntroscopeError(Exception):
    """Base class for every error raised by this package."""


class DomainError(EntroscopeError, ValueError):
    """An input violates a precondition. The message names the parameter."""


class DimensionError(DomainError):
    pass


class InvalidShapeError(DomainError):
    pass


class ZeroSeparationError(DomainError):
    pass


class ResolutionError(DomainError):
    """Mesh too coarse for the requested cutoff."""

    def __init__(self, message, required_panels=None):
        super().__init__(message)
        self.required_panels = required_panels


class ProximityError(DomainError):
    """Two meshes are closer than their panel size."""


class RegimeError(DomainError):
    pass


class InsufficientDataError(DomainError):
    pass


class NumericalFailureError(EntroscopeError, ArithmeticError):
    pass


class AdiabaticValidityWarning(UserWarning):
    """The slowly-varying strip approximation is being pushed past its slope guard."""


class ScalingWindowWarning(UserWarning):
    """A formula is evaluated outside the window where its scaling form applies."""
