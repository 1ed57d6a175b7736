"""Localization analytics for one defect on the line.

All functions work with the reduced parameters (a, b, omega) of the walk
and, where a qubit enters, expect it already in the hatted frame (use
``coins.hat_qubit`` to convert; the wrappers in ``reports`` do it for you).

The atoms of the measure sit at the unimodular roots of g(z) = 1 inside the
singular arcs, come in opposite pairs, and are located in closed form: for
each sign s, the candidate arc coordinate is zeta_s(b) = s sqrt(1 - Im^2 b)
+ i Im b, and it yields an atom pair exactly when it lies on the open arc
where Re(conj(a) zeta) < |a|^2, equivalently |a - zeta_s(b)/2| > 1/2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .coins import Qubit
from .errors import BoundaryZeta
from .schur import g_line_boundary

__all__ = [
    "MassPointLine",
    "LineClass",
    "zeta_pm",
    "condition_m",
    "mass_point_at",
    "classify",
    "return_form",
    "return_probability_pm",
    "return_probability_limit",
    "imaginary_a_limit",
    "nonlocalized_qubit",
    "max_return_scan",
    "state_function",
    "atom_weight",
    "residual",
]

_DISK_TOL = 1e-12


@dataclass(frozen=True)
class MassPointLine:
    """An atom of the folded line measure.

    The 2x2 mass matrix is m [[1, eta], [conj(eta), 1]]: positive
    semidefinite and singular, with unimodular eta.  ``zeta0`` is the arc
    coordinate shared by the pair (z0, -z0).
    """

    z0: complex
    zeta0: complex
    m: float
    eta: complex

    def matrix(self) -> np.ndarray:
        return self.m * np.array([[1.0, self.eta], [self.eta.conjugate(), 1.0]])

    def reflected(self) -> "MassPointLine":
        """The partner atom at -z0 (same mass, opposite eta)."""
        return MassPointLine(-self.z0, self.zeta0, self.m, -self.eta)


@dataclass(frozen=True)
class LineClass:
    """Mass-point classification: label M0, M2plus, M2minus or M4, and the
    atoms, listed closed under z -> -z."""

    label: str
    points: tuple[MassPointLine, ...]

    @property
    def n_mass_points(self) -> int:
        return len(self.points)


def zeta_pm(b: complex) -> tuple[complex, complex]:
    """The two unimodular solutions of Im zeta = Im b."""
    r = math.sqrt(1.0 - b.imag**2)
    return complex(r, b.imag), complex(-r, b.imag)


def condition_m(a: complex, b: complex, sign: int) -> bool:
    """Whether zeta_sign(b) lies on the open arc Sigma_a.

    Stated as |a - zeta/2| > 1/2; boundary ties (within 1e-12) resolve to
    False because boundary roots carry no mass.
    """
    zeta = zeta_pm(b)[0 if sign > 0 else 1]
    return abs(a - zeta / 2.0) > 0.5 + _DISK_TOL


def mass_point_at(a: complex, b: complex, omega: complex, zeta0: complex) -> MassPointLine:
    """Atom at z0 = (1 - conj(a) zeta0)/|...| for an arc coordinate zeta0.

    Raises
    ------
    BoundaryZeta
        If zeta0 is not strictly inside the arc Sigma_a.
    """
    aa = abs(a) ** 2
    if (a.conjugate() * zeta0).real >= aa - _DISK_TOL:
        raise BoundaryZeta("zeta0 is not strictly inside Sigma_a")
    w = 1.0 - a.conjugate() * zeta0
    z0 = w / abs(w)
    rho_a2 = 1.0 - aa
    rho_b2 = 1.0 - abs(b) ** 2
    m = 0.5 * (1.0 - rho_a2 / abs(zeta0 - a) ** 2) / (1.0 + rho_b2 / abs(zeta0 - b) ** 2)
    eta = -omega * (zeta0 - a) / abs(zeta0 - a)
    return MassPointLine(z0, zeta0, float(m), eta)


def classify(a: complex, b: complex, omega: complex = 1.0 + 0j) -> LineClass:
    """Full mass-point classification of the line measure.

    ``a = 0`` short-circuits to M0 (diagonal constant coin, Bernstein-Szego
    measure).  The label does not depend on omega, nor on Re b.
    """
    if a == 0:
        return LineClass("M0", ())
    zp, zm = zeta_pm(b)
    plus = condition_m(a, b, +1)
    minus = condition_m(a, b, -1)
    points: list[MassPointLine] = []
    if plus:
        mp = mass_point_at(a, b, omega, zp)
        points += [mp, mp.reflected()]
    if minus:
        mp = mass_point_at(a, b, omega, zm)
        points += [mp, mp.reflected()]
    if plus and minus:
        label = "M4"
    elif plus:
        label = "M2plus"
    elif minus:
        label = "M2minus"
    else:
        label = "M0"
    return LineClass(label, tuple(points))


def _coefficient(a: complex, b: complex, zeta0: complex) -> float:
    return 1.0 - (1.0 - abs(a) ** 2) / abs(zeta0 - a) ** 2


def return_form(a: complex, b: complex, omega: complex = 1.0 + 0j) -> np.ndarray:
    """Hermitian 2x2 form M with p = v^dag M v for hatted qubits v.

    Rank <= 2; one rank-1 term per satisfied atom condition.  The two terms
    are built on mutually orthogonal vectors, so the eigenvalues of M are
    exactly the squared coefficients of the two atom pairs.
    """
    m = np.zeros((2, 2), dtype=complex)
    if a == 0:
        return m
    rho_b = math.sqrt(1.0 - abs(b) ** 2)
    for sign, zeta0 in zip((+1, -1), zeta_pm(b)):
        if not condition_m(a, b, sign):
            continue
        coeff = _coefficient(a, b, zeta0)
        u = np.array([1.0, -omega.conjugate() * (zeta0.conjugate() + b) / rho_b])
        denom = 1.0 + abs(zeta0.conjugate() + b) ** 2 / rho_b**2
        m += (coeff**2 / denom) * np.outer(np.conj(u), u)
    return m


def return_probability_pm(
    a: complex, b: complex, omega: complex, q: Qubit, sign: int
) -> float:
    """Single-pair contribution to the asymptotic return probability,
    in the explicit bracketed form (cross-check for the quadratic form)."""
    zeta0 = zeta_pm(b)[0 if sign > 0 else 1]
    coeff = _coefficient(a, b, zeta0)
    rho_b = math.sqrt(1.0 - abs(b) ** 2)
    s = math.sqrt(1.0 - b.imag**2)
    bracket = 1.0 - sign * (
        ((abs(q.alpha) ** 2 - abs(q.beta) ** 2) * b.real
         + 2.0 * rho_b * (omega.conjugate() * q.alpha.conjugate() * q.beta).real)
        / s
    )
    return 0.5 * coeff**2 * bracket


def return_probability_limit(
    a: complex, b: complex, omega: complex, q: Qubit
) -> float:
    """Limit of the return probability at the origin along even times.

    Zero for M0; the single-pair value for M2; the sum of both pair
    contributions for M4 (their cross terms cancel identically).  ``q`` is
    the hatted qubit.
    """
    v = q.as_array()
    return float((v.conj() @ return_form(a, b, omega) @ v).real)


def imaginary_a_limit(a: complex, b: complex) -> float:
    """State-independent limit for purely imaginary a:
    (2 Im a (Im a - Im b) / (1 + Im^2 a - 2 Im a Im b))^2."""
    num = 2.0 * a.imag * (a.imag - b.imag)
    den = 1.0 + a.imag**2 - 2.0 * a.imag * b.imag
    return (num / den) ** 2


def nonlocalized_qubit(
    a: complex, b: complex, omega: complex, label: str
) -> Qubit | None:
    """The unique localization-free qubit (hatted frame) in the M2 classes.

    Returns None for M4: with four atoms the two defining conditions are
    incompatible, so every state localizes.
    """
    if label == "M4":
        return None
    if label not in ("M2plus", "M2minus"):
        raise ValueError("nonlocalized_qubit requires class M2plus, M2minus or M4")
    sign = 1 if label == "M2plus" else -1
    denom = b.real + sign * math.sqrt(1.0 - b.imag**2)
    beta = omega * math.sqrt(1.0 - abs(b) ** 2) / denom
    return Qubit.normalized(1.0, beta)


def max_return_scan(
    b: complex, omega: complex, a_values
) -> list[tuple[complex, str, int, float, float]]:
    """Scan a-values: (a, label, n_mass_points, p at the balanced qubit, sup over qubits).

    The supremum over qubits is the largest eigenvalue of the return form;
    the reported lower bound is the value at the balanced qubit with
    beta_hat = i omega alpha_hat, which makes the bracketed state terms
    vanish.
    """
    balanced = Qubit(1.0 / math.sqrt(2.0), 1j * omega / math.sqrt(2.0))
    rows = []
    for a in np.asarray(a_values, dtype=complex).ravel():
        cls = classify(a, b, omega)
        if cls.label == "M0":
            rows.append((complex(a), cls.label, 0, 0.0, 0.0))
            continue
        form = return_form(a, b, omega)
        sup = float(np.linalg.eigvalsh(form)[-1])
        lower = return_probability_limit(a, b, omega, balanced)
        rows.append((complex(a), cls.label, cls.n_mass_points, lower, sup))
    return rows


def state_function(
    a: complex, b: complex, omega: complex, q: Qubit, z: complex
) -> np.ndarray:
    """The 2-vector function representing the hatted qubit at the origin,
    evaluated at z: alpha (1, 0) + (beta / rho_b) (-conj(omega) b, 1/z)."""
    rho_b = math.sqrt(1.0 - abs(b) ** 2)
    return np.array(
        [
            q.alpha - q.beta * omega.conjugate() * b / rho_b,
            q.beta / (rho_b * z),
        ],
        dtype=complex,
    )


def atom_weight(
    a: complex, b: complex, omega: complex, q: Qubit, point: MassPointLine
) -> float:
    """Diagonal spectral weight psi mu({z0}) psi^dag of the hatted qubit at
    one atom (psi is a row vector); these are the atoms of the scalar
    measure whose moments are time-averaged by Wiener's theorem."""
    psi = state_function(a, b, omega, q, point.z0)
    mass = point.matrix()
    return float((psi @ mass @ psi.conj()).real)


def residual(a: complex, b: complex, point: MassPointLine) -> float:
    """|g(z0) - 1| at a reported atom (root-condition residual)."""
    return float(abs(g_line_boundary(a, b, cmath.phase(point.z0)) - 1.0))
