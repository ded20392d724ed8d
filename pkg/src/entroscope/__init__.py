"""Entanglement entropy and mutual information in scale-invariant theories.

Four independent routes that check one another:

* :mod:`entroscope.cft1d` closed forms for the 1+1D free fermion,
* :mod:`entroscope.lattice` exact free-fermion chains,
* :mod:`entroscope.holographic` minimal surfaces for strips in AdS4,
* :mod:`entroscope.twist` boundary double integrals of a Gaussian twist field,

plus :mod:`entroscope.scaling` to classify how mutual information diverges
as two regions collide, and the ``entroscope`` command line.
"""
from ._backend import BACKEND
from .errors import (AdiabaticValidityWarning, DimensionError, DomainError, EntroscopeError,
                     InsufficientDataError, InvalidShapeError, NumericalFailureError,
                     ProximityError, RegimeError, ResolutionError, ScalingWindowWarning,
                     ZeroSeparationError)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "AdiabaticValidityWarning", "DimensionError", "DomainError", "EntroscopeError",
    "InsufficientDataError", "InvalidShapeError", "NumericalFailureError", "ProximityError",
    "RegimeError", "ResolutionError", "ScalingWindowWarning", "ZeroSeparationError",
]
