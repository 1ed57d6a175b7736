"""One-dimensional quantum walks with one defective coin at the origin.

Exact CMV-matrix simulation on the line and the half line, plus the full
analytic localization theory: Schur functions of the walk measure, mass
points and masses, localization classes, asymptotic return probabilities,
and the envelope geometry classifying the half-line parameter plane.
Analytics and simulation are kept mutually verifiable through independent
oracles (Wiener time averages, quadrature moment reconstruction, dense
brute force).
"""

from . import cmv, halfline, line, oracles, schur
from .coins import (
    Coin,
    DefectParams,
    Lattice,
    Qubit,
    WalkSpec,
    defect_params,
    hadamard,
    hat_qubit,
    identity_coin,
    konno_defect,
    random_coin,
    spec_for_halfline_params,
    spec_for_line_params,
    validate_coin,
)
from .errors import DefectWalkError

__version__ = "0.1.0"

__all__ = [
    "Coin",
    "DefectParams",
    "DefectWalkError",
    "Lattice",
    "Qubit",
    "WalkSpec",
    "cmv",
    "defect_params",
    "hadamard",
    "halfline",
    "hat_qubit",
    "identity_coin",
    "konno_defect",
    "line",
    "oracles",
    "random_coin",
    "schur",
    "spec_for_halfline_params",
    "spec_for_line_params",
    "validate_coin",
]
