"""Exception types shared across the package."""


class EulerRelaxError(Exception):
    """Base class for all package errors."""


class DomainError(EulerRelaxError, ValueError):
    """A state lies outside the physical domain (e.g. non-positive density)."""


class FormatError(EulerRelaxError, ValueError):
    """An input array or matrix has the wrong shape or structure."""


class MeanNotZero(EulerRelaxError, ValueError):
    """A field or profile that must be average-free carries a nonzero mean."""

    def __init__(self, message, mean=None):
        super().__init__(message)
        self.mean = mean


class PreconditionError(EulerRelaxError, ValueError):
    """A documented precondition failed; ``measured`` holds the offending values."""

    def __init__(self, message, **measured):
        super().__init__(message)
        self.measured = measured


class WaveConeError(PreconditionError):
    """Two states are not connected through the wave cone in the requested direction."""


class EmptySlice(PreconditionError):
    """A hyperplane misses the polytope."""


class EmptyConstitutiveSet(PreconditionError):
    """The constitutive set described by a ConstitutiveSpec has no points."""
