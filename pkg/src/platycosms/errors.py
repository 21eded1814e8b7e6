"""Exception types shared across the package."""


class PlatycosmError(Exception):
    """Base class for all package-specific errors."""


class UnknownPresetError(PlatycosmError, ValueError):
    """Requested a built-in space that does not exist."""


class InvalidPresentationError(PlatycosmError, ValueError):
    """A presentation violates a group invariant (closure, freeness, ...)."""


class UnsupportedGeometryError(PlatycosmError, ValueError):
    """Input is valid mathematics but outside this package's exact reach
    (irrational geodesic length, twist not a rational multiple of pi,
    character phase outside the fourth roots of unity, ...)."""


class UnsupportedCircumferenceError(PlatycosmError, ValueError):
    """Circle circumference whose spectrum has non-integral norm keys."""


class CharacterSumError(PlatycosmError, ArithmeticError):
    """Internal: an averaged character sum failed to be a nonnegative
    integer.  Signals a representation-theory bug, not bad user input."""


class CutoffBudgetError(PlatycosmError, RuntimeError):
    """A certified truncation cutoff exceeds the enumeration budget;
    retry with larger t or looser eps."""
