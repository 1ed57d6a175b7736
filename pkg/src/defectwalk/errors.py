"""Exception types shared by the defectwalk package."""

__all__ = [
    "DefectWalkError",
    "NotUnitary",
    "ReducibleCoin",
    "DiagonalCoin",
    "SizeTooSmall",
    "TruncationTooSmall",
    "ZeroA",
    "ParameterOutOfDisk",
    "BranchPoint",
    "BoundaryZeta",
    "CuspParameter",
    "BorderlineA",
    "QuadratureNotConverged",
    "TooLarge",
]


class DefectWalkError(Exception):
    """Base class for all defectwalk errors."""


class NotUnitary(DefectWalkError):
    """A coin matrix deviates from unitarity beyond tolerance."""


class ReducibleCoin(DefectWalkError):
    """A coin has a zero diagonal entry, so the walk decouples."""


class DiagonalCoin(DefectWalkError):
    """The constant coin is diagonal (c21 = 0): the measure is of
    Bernstein-Szego type and no localization analysis applies."""


class SizeTooSmall(DefectWalkError):
    """Requested transition-matrix size is below the structural minimum."""


class TruncationTooSmall(DefectWalkError):
    """The truncated matrix is too small for the requested number of steps."""


class ZeroA(DefectWalkError):
    """An operation that divides by the reduced parameter a received a = 0."""


class ParameterOutOfDisk(DefectWalkError):
    """A reflection coefficient lies outside the open unit disk."""


class BranchPoint(DefectWalkError):
    """Evaluation requested at (or too close to) a branch point on the circle."""


class BoundaryZeta(DefectWalkError):
    """A mass formula was evaluated at the boundary of the support arc."""


class CuspParameter(DefectWalkError):
    """Envelope evaluation at a parameter where the defining system degenerates."""


class BorderlineA(DefectWalkError):
    """The parameter a sits on the classifying epitrochoid within tolerance,
    so the region class is not decided numerically."""


class QuadratureNotConverged(DefectWalkError):
    """The arc quadrature failed its internal convergence estimate."""


class TooLarge(DefectWalkError):
    """A brute-force oracle was asked for more work than its cost guard allows."""
