"""Domain errors shared across the package."""


class HeightLabError(Exception):
    """Base class for all package-specific errors."""


class NonSquarefreeError(HeightLabError):
    """Polynomial has a repeated root (gcd with derivative is nonconstant)."""


class PrecisionUnreachableError(HeightLabError):
    """Iteration failed to certify the requested precision."""


class ZeroInputError(HeightLabError):
    """Operation undefined at zero."""


class NoConvergenceError(HeightLabError):
    """Limit iteration exhausted its budget without stabilizing."""


class OverflowAtIterateError(HeightLabError):
    """An iterate left the representable range."""


class DomainEscapeError(HeightLabError):
    """A pullback left the chart of a potential grid."""


class SingularCurveError(HeightLabError):
    """Curve discriminant vanishes."""


class PoleAtLatticePointError(HeightLabError):
    """Evaluation requested at a lattice point where the function has a pole."""


class CoordinateOverflowError(HeightLabError):
    """Exact coordinates exceeded the configured size budget."""


class FiberZeroError(HeightLabError):
    """Fiber coordinate w = 0 describes a boundary point, not a group element."""


class UnsupportedPointClassError(HeightLabError):
    """Point is outside the exactly computable class."""


class ModelMismatchError(HeightLabError):
    """Points belong to different models."""


class OrbitTooLargeError(HeightLabError):
    """Orbit would exceed the configured point cap."""


class EmptyOrbitError(HeightLabError):
    """Empirical average of an empty orbit."""


class NoRationalDivisionError(HeightLabError):
    """No rational point Q' with nQ' = Q was supplied or found."""
