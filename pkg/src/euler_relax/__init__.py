"""Numerical toolkit for the linear relaxation of the isentropic Euler system in two space dimensions.

Submodules: ``states`` (pointwise state algebra), ``symbols`` (Fourier symbols,
exactness, wave cone), ``torus`` (spectral operators on periodic grids),
``laminates`` (laminates, empirical measures, Jensen witnesses), ``shear``
(the shear-flow pair), ``geometry`` (polytope slices, Hausdorff distance,
constitutive set) and ``cli``.
"""

from .errors import (
    DomainError,
    EmptyConstitutiveSet,
    EmptySlice,
    EulerRelaxError,
    FormatError,
    MeanNotZero,
    PreconditionError,
    WaveConeError,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "EmptyConstitutiveSet",
    "EmptySlice",
    "EulerRelaxError",
    "FormatError",
    "MeanNotZero",
    "PreconditionError",
    "WaveConeError",
]
