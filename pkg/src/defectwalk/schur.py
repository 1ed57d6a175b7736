"""Schur/Caratheodory machinery for one-defect walks.

The walk measure (in its rotated canonical frame) is encoded by two scalar
Schur functions: ``schur_constant`` has reflection coefficients
(a, 0, a, 0, ...) and describes the unperturbed walk, ``schur_defect``
prepends the defect coefficient b.  Everything else here is derived from
them: boundary values on the unit circle, the root functions whose
unimodular solutions locate the atoms of the measure, the absolutely
continuous weight, and the quadrature rule used to integrate it.

Branch convention: the square root of the discriminant is the analytic
branch on the disk with value +1 at z = 0, realized as a product of two
principal square roots so no branch tracking is needed.  Boundary values on
the circle are computed from their own closed form and cross-checked against
radial limits in the tests.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import BranchPoint, ParameterOutOfDisk, ZeroA

__all__ = [
    "discriminant",
    "sqrt_discriminant",
    "branch_points",
    "schur_constant",
    "schur_constant_boundary",
    "schur_defect",
    "schur_defect_boundary",
    "arc_map",
    "arc_map_boundary",
    "g_line",
    "g_line_boundary",
    "g_from_zeta",
    "h_halfline",
    "h_halfline_boundary",
    "schur_step",
    "schur_inverse_step",
    "weight_halfline",
    "weight_line",
    "support_arcs",
    "arc_nodes",
]


def discriminant(a: complex, z) -> complex | np.ndarray:
    """(z^2 - 1)^2 + 4 |a|^2 z^2, a polynomial in z."""
    z = np.asarray(z, dtype=complex)
    val = (z * z - 1.0) ** 2 + 4.0 * abs(a) ** 2 * z * z
    return val if val.ndim else complex(val)


def branch_points(a: complex) -> tuple[complex, complex, complex, complex]:
    """The four unimodular roots of the discriminant: +-z_a, +-conj(z_a)."""
    rho = math.sqrt(1.0 - abs(a) ** 2)
    za = rho + 1j * abs(a)
    return za, -za, za.conjugate(), -za.conjugate()


def sqrt_discriminant(a: complex, z) -> complex | np.ndarray:
    """Analytic square root of the discriminant with value +1 at z = 0.

    Factoring the discriminant as (1 - conj(za)^2 z^2)(1 - za^2 z^2) with
    za = rho_a + i|a| puts each factor in the closed right half plane for
    |z| <= 1, so the principal square roots multiply to the analytic branch.
    """
    z = np.asarray(z, dtype=complex)
    rho = math.sqrt(1.0 - abs(a) ** 2)
    za2 = (rho + 1j * abs(a)) ** 2
    val = np.sqrt(1.0 - np.conj(za2) * z * z) * np.sqrt(1.0 - za2 * z * z)
    return val if val.ndim else complex(val)


def schur_constant(a: complex, z) -> complex | np.ndarray:
    """Schur function with constant reflection coefficients (a, 0, a, 0, ...).

    Evaluated as 2a / (1 - z^2 + sqrt(discriminant)), which is stable for
    all |z| <= 1 and takes the value a at z = 0.

    Raises
    ------
    ZeroA
        If a = 0 (the formula degenerates; the measure is then Lebesgue).
    """
    if a == 0:
        raise ZeroA("schur_constant requires a != 0")
    z = np.asarray(z, dtype=complex)
    val = 2.0 * a / (1.0 - z * z + sqrt_discriminant(a, z))
    return val if val.ndim else complex(val)


def schur_constant_boundary(a: complex, theta) -> complex | np.ndarray:
    """Boundary values of :func:`schur_constant` on the unit circle.

    Modulus 1 exactly on the two arcs |sin theta| <= |a|, modulus < 1
    elsewhere.
    """
    if a == 0:
        raise ZeroA("schur_constant requires a != 0")
    theta = np.asarray(theta, dtype=float)
    s, c = np.sin(theta), np.cos(theta)
    aa = abs(a) ** 2
    inside = s * s <= aa
    r = np.where(
        inside,
        np.sign(c) * np.sqrt(np.maximum(aa - s * s, 0.0)),
        -1j * np.sign(s) * np.sqrt(np.maximum(s * s - aa, 0.0)),
    )
    val = np.exp(-1j * theta) / np.conj(a) * (r + 1j * s)
    return val if val.ndim else complex(val)


def schur_defect(a: complex, b: complex, z) -> complex | np.ndarray:
    """Schur function with reflection coefficients (b, 0, a, 0, a, ...)."""
    w = np.asarray(z, dtype=complex) ** 2 * schur_constant(a, z)
    val = (w + b) / (1.0 + np.conj(b) * w)
    return val if val.ndim else complex(val)


def schur_defect_boundary(a: complex, b: complex, theta) -> complex | np.ndarray:
    theta = np.asarray(theta, dtype=float)
    w = np.exp(2j * theta) * schur_constant_boundary(a, theta)
    val = (w + b) / (1.0 + np.conj(b) * w)
    return val if val.ndim else complex(val)


def arc_map(a: complex, z) -> complex | np.ndarray:
    """The change of variables zeta(z) = -z^2 f_a(z).

    Maps each half of the singular arcs one-to-one onto the arc Sigma_a of
    the circle where Re(conj(a) zeta) < |a|^2.
    """
    z = np.asarray(z, dtype=complex)
    val = -z * z * schur_constant(a, z)
    return val if val.ndim else complex(val)


def arc_map_boundary(a: complex, theta) -> complex | np.ndarray:
    theta = np.asarray(theta, dtype=float)
    val = -np.exp(2j * theta) * schur_constant_boundary(a, theta)
    return val if val.ndim else complex(val)


def g_line(a: complex, b: complex, z) -> complex | np.ndarray:
    """z^2 f_a(z) f_{a,b}(z); its unimodular roots g = 1 carry the atoms of
    the (folded) line measure."""
    z = np.asarray(z, dtype=complex)
    val = z * z * schur_constant(a, z) * schur_defect(a, b, z)
    return val if val.ndim else complex(val)


def g_line_boundary(a: complex, b: complex, theta) -> complex | np.ndarray:
    theta = np.asarray(theta, dtype=float)
    val = (
        np.exp(2j * theta)
        * schur_constant_boundary(a, theta)
        * schur_defect_boundary(a, b, theta)
    )
    return val if val.ndim else complex(val)


def g_from_zeta(b: complex, zeta) -> complex | np.ndarray:
    """g expressed through the arc variable: zeta (zeta - b) / (1 - conj(b) zeta)."""
    zeta = np.asarray(zeta, dtype=complex)
    val = zeta * (zeta - b) / (1.0 - np.conj(b) * zeta)
    return val if val.ndim else complex(val)


def h_halfline(a: complex, b: complex, z) -> complex | np.ndarray:
    """z f_{a,b}(z); its unimodular roots h = 1 carry the atoms of the
    half-line measure."""
    z = np.asarray(z, dtype=complex)
    val = z * schur_defect(a, b, z)
    return val if val.ndim else complex(val)


def h_halfline_boundary(a: complex, b: complex, theta) -> complex | np.ndarray:
    theta = np.asarray(theta, dtype=float)
    val = np.exp(1j * theta) * schur_defect_boundary(a, b, theta)
    return val if val.ndim else complex(val)


def schur_step(f, alpha: complex):
    """One forward step of the Schur algorithm on a callable.

    Returns the callable z -> (f(z) - alpha) / (z (1 - conj(alpha) f(z))).
    """
    if abs(alpha) >= 1.0:
        raise ParameterOutOfDisk(f"|alpha| = {abs(alpha)} >= 1")

    def stepped(z):
        fz = f(z)
        return (fz - alpha) / (np.asarray(z, dtype=complex) * (1.0 - np.conj(alpha) * fz))

    return stepped


def schur_inverse_step(f, alpha: complex):
    """Inverse Schur step: z -> (z f(z) + alpha) / (1 + conj(alpha) z f(z))."""
    if abs(alpha) >= 1.0:
        raise ParameterOutOfDisk(f"|alpha| = {abs(alpha)} >= 1")

    def unstepped(z):
        zf = np.asarray(z, dtype=complex) * f(z)
        return (zf + alpha) / (1.0 + np.conj(alpha) * zf)

    return unstepped


_BRANCH_TOL = 1e-12


def _gamma_mask(a: complex, theta: np.ndarray) -> np.ndarray:
    return np.sin(theta) ** 2 < abs(a) ** 2


def _check_branch(a: complex, theta: np.ndarray):
    gap = np.abs(np.abs(np.sin(theta)) - abs(a))
    if np.any(gap <= _BRANCH_TOL):
        raise BranchPoint("theta too close to a branch point of the weight")


def _one_minus_sq_fa(a: complex, theta: np.ndarray) -> np.ndarray:
    # 1 - |f_a|^2 on the arcs |sin theta| > |a|, in the cancellation-free
    # form 2q / (|sin theta| + q) with q = sqrt(sin^2 theta - |a|^2).
    s = np.abs(np.sin(theta))
    q = np.sqrt(np.maximum(s * s - abs(a) ** 2, 0.0))
    return 2.0 * q / (s + q)


def weight_halfline(
    a: complex, b: complex, theta, check_branch: bool = True
) -> float | np.ndarray:
    """Density of the half-line measure against dtheta / 2 pi.

    Exactly zero on the singular arcs |sin theta| < |a|; elsewhere
    Re (1 + h) / (1 - h) with h the boundary values of z f_{a,b}(z),
    evaluated as (1 - |h|^2) / |1 - h|^2 with the numerator in closed form
    (a Moebius identity on top of 1 - |f_a|^2), which stays accurate beside
    the branch points where 1 - |h|^2 would otherwise cancel to noise.
    ``check_branch=False`` skips the branch-point proximity guard; the
    quadrature uses it because its innermost panels legitimately sample
    arbitrarily close to the (integrable) endpoints.
    """
    theta_arr = np.atleast_1d(np.asarray(theta, dtype=float))
    if check_branch:
        _check_branch(a, theta_arr)
    out = np.zeros(theta_arr.shape)
    ac = ~_gamma_mask(a, theta_arr)
    if np.any(ac):
        th = theta_arr[ac]
        w0 = np.exp(2j * th) * schur_constant_boundary(a, th)
        rho_b2 = 1.0 - abs(b) ** 2
        one_minus_fab2 = (
            rho_b2 * _one_minus_sq_fa(a, th) / np.abs(1.0 + np.conj(b) * w0) ** 2
        )
        h = np.exp(1j * th) * (w0 + b) / (1.0 + np.conj(b) * w0)
        out[ac] = one_minus_fab2 / np.abs(1.0 - h) ** 2
    return out if np.ndim(theta) else float(out[0])


def weight_line(
    a: complex, b: complex, omega: complex, theta, check_branch: bool = True
) -> np.ndarray:
    """2x2 matrix density of the folded line measure against dtheta / 2 pi.

    Zero matrix on the singular arcs; elsewhere Re F with F built from the
    antidiagonal Schur function carrying omega f_a and conj(omega) f_{a,b}.
    Output shape is theta.shape + (2, 2).
    """
    theta_arr = np.atleast_1d(np.asarray(theta, dtype=float))
    if check_branch:
        _check_branch(a, theta_arr)
    out = np.zeros(theta_arr.shape + (2, 2), dtype=complex)
    ac = ~_gamma_mask(a, theta_arr)
    if np.any(ac):
        th = theta_arr[ac]
        z = np.exp(1j * th)
        fa = schur_constant_boundary(a, th)
        fab = schur_defect_boundary(a, b, th)
        g = z * z * fa * fab
        # Sandwich form w = (M^-1)^dag (1 - f^dag f) M^-1 with M = 1 - z f:
        # every factor is computed without cancellation, so w stays PSD in
        # floating point even beside the branch points where |g| -> 1.
        d2 = _one_minus_sq_fa(a, th)  # 1 - |f_a|^2
        w0 = z * z * fa
        d1 = (1.0 - abs(b) ** 2) * d2 / np.abs(1.0 + np.conj(b) * w0) ** 2
        u = z * omega * fa
        v = z * np.conj(omega) * fab
        scale = 1.0 / np.abs(1.0 - g) ** 2
        out_ac = np.zeros(th.shape + (2, 2), dtype=complex)
        out_ac[..., 0, 0] = (d1 + d2 * np.abs(v) ** 2) * scale
        out_ac[..., 1, 1] = (d1 * np.abs(u) ** 2 + d2) * scale
        out_ac[..., 0, 1] = (d1 * u + d2 * np.conj(v)) * scale
        out_ac[..., 1, 0] = np.conj(out_ac[..., 0, 1])
        out[ac] = out_ac
    return out if np.ndim(theta) else out[0]


def support_arcs(a: complex) -> tuple[tuple[float, float], tuple[float, float]]:
    """The two open arcs of the circle carrying the absolutely continuous
    weight, as theta intervals: (theta_a, pi - theta_a) and its reflection,
    with theta_a = arcsin |a|."""
    if a == 0:
        raise ZeroA("support_arcs requires a != 0")
    ta = math.asin(abs(a))
    return ((ta, math.pi - ta), (math.pi + ta, 2.0 * math.pi - ta))


@lru_cache(maxsize=32)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def arc_nodes(
    lo: float, hi: float, total: int = 2000, levels: int = 48
) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights on [lo, hi].

    Panels are refined dyadically toward both endpoints (``levels`` halvings)
    so integrable inverse-square-root endpoint singularities converge below
    1e-6: the unresolved mass under the innermost panel scales like
    2^(-levels/2) while every other panel sees an analytic integrand.  The
    central half of the interval is split into eight uniform panels so that
    moment integrands z^n with n of order 20 never put more than a fraction
    of an oscillation period on one panel.
    """
    fr = [0.0] + [2.0 ** (-k) for k in range(levels, 1, -1)]
    middle = list(np.linspace(0.25, 0.75, 9)[1:-1])
    breaks = np.array(fr + middle + [1.0 - f for f in reversed(fr)])
    n_panels = len(breaks) - 1
    per = max(8, total // n_panels)
    x, w = _leggauss(per)
    span = hi - lo
    mids = lo + span * (breaks[:-1] + breaks[1:]) / 2.0
    halves = span * (breaks[1:] - breaks[:-1]) / 2.0
    nodes = (mids[:, None] + halves[:, None] * x[None, :]).ravel()
    weights = (halves[:, None] * w[None, :]).ravel()
    return nodes, weights
