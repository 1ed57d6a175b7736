"""Localization analytics for one defect on the half line.

Atoms of the half-line measure are the unimodular roots of h(z) = 1 inside
the singular arcs.  In the arc coordinate zeta = -z^2 f_a(z) the root
condition becomes

    (zeta - b)^2 / (zeta - a)  real negative  ->  atom at +z(zeta),
    (zeta - b)^2 / (zeta - a)  real positive  ->  atom at -z(zeta),

with z(zeta) = (1 - conj(a) zeta)/|1 - conj(a) zeta| and zeta restricted to
the open arc Sigma_a.  Roots are located by bracketing sign changes of the
imaginary part of that quotient on a uniform parameter grid and bisecting;
the sign of the real part selects the family.  For fixed a the two families
of straight lines swept by the condition have envelopes outside the unit
disk whose tangency pattern, governed by an epicycloid and an epitrochoid,
partitions the a-plane into the region classes L0, L1, L2 (number of
localization-free bands of b: zero, one, or two).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .coins import Qubit
from .errors import BorderlineA, BoundaryZeta, CuspParameter, ZeroA
from .schur import h_halfline_boundary

__all__ = [
    "MassPointHalfline",
    "Chord",
    "RegionClassHalfline",
    "ReturnAsymptotics",
    "sigma_arc",
    "zeta_point",
    "in_s_region",
    "mass_points",
    "mass_point_count",
    "point_mass",
    "return_asymptotics",
    "return_probability_cesaro",
    "return_probability_limit",
    "nonlocalized_qubit",
    "envelope_point",
    "limit_lines",
    "classify_region",
    "epicycloid",
    "epicycloid_velocity",
    "epitrochoid",
    "epitrochoid_velocity",
    "curve_winding",
    "curve_distance",
    "epicycloid_cusps",
    "epitrochoid_self_intersections",
    "state_function",
    "atom_weight",
    "residual",
]

_T_MARGIN = 1e-9
_GRID = 4096


@dataclass(frozen=True)
class MassPointHalfline:
    """An atom of the half-line measure.

    ``side`` is +1 when z0 lies on the right singular arc (Gamma_a^+) and
    -1 on the left one; ``t`` is the arc parameter of zeta0 (diagnostic).
    """

    z0: complex
    zeta0: complex
    side: int
    mu: float
    t: float


@dataclass(frozen=True)
class Chord:
    """A straight segment with both endpoints on the unit circle."""

    start: complex
    end: complex
    family: int  # +1: direction i sqrt(zeta - a); -1: direction sqrt(zeta - a)
    anchor: str  # "zeta_plus" or "zeta_minus"


@dataclass(frozen=True)
class RegionClassHalfline:
    """Region class of a: L0/L1/L2 plus the geometric evidence."""

    l_label: str
    limit_chords: tuple[Chord, ...]
    tangent_profile: str
    epitrochoid_winding: int
    full_envelope_tangencies: int


def sigma_arc(a: complex) -> tuple[float, float]:
    """Open parameter interval (t_lo, t_hi) of the arc Sigma_a, where
    zeta(t) = (a/|a|) e^{it} and cos t < |a|."""
    if a == 0:
        raise ZeroA("sigma_arc requires a != 0")
    t0 = math.acos(abs(a))
    return t0, 2.0 * math.pi - t0


def zeta_point(a: complex, t) -> complex | np.ndarray:
    u = a / abs(a)
    val = u * np.exp(1j * np.asarray(t, dtype=float))
    return val if val.ndim else complex(val)


def in_s_region(a: complex, b: complex, margin: float = 0.0) -> bool:
    """Whether b lies in the open set S(a) bounded by the arc Sigma_a and
    the chord through its endpoints: |b| < 1 and Re(conj(a) b) < |a|^2.

    For purely imaginary a this set is exactly the localization region of b.
    """
    if abs(b) >= 1.0 - margin:
        return False
    return (a.conjugate() * b).real < abs(a) ** 2 - margin


def _family_quotient(a: complex, b: complex, zeta):
    return (zeta - b) ** 2 / (zeta - a)


def mass_points(
    a: complex,
    b: complex,
    grid: int = _GRID,
    t_margin: float = _T_MARGIN,
) -> list[MassPointHalfline]:
    """All atoms of the half-line measure for parameters (a, b).

    Sign changes of Im[(zeta - b)^2/(zeta - a)] on a uniform grid over the
    open arc (endpoints excluded by ``t_margin``, which enforces the
    boundary exclusion) are bisected to parameter accuracy 1e-14.  Between
    zero and three atoms exist.
    """
    if a == 0:
        raise ZeroA("mass_points requires a != 0")
    t_lo, t_hi = sigma_arc(a)
    ts = np.linspace(t_lo + t_margin, t_hi - t_margin, grid)
    u = a / abs(a)
    quot = _family_quotient(a, b, u * np.exp(1j * ts))
    im = quot.imag
    out: list[MassPointHalfline] = []
    sign = np.sign(im)
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        lo, hi = ts[i], ts[i + 1]
        flo = im[i]
        while hi - lo > 1e-14:
            mid = 0.5 * (lo + hi)
            fmid = _family_quotient(a, b, u * cmath.exp(1j * mid)).imag
            if (flo < 0) == (fmid < 0):
                lo, flo = mid, fmid
            else:
                hi = mid
        t_root = 0.5 * (lo + hi)
        out.append(_atom_from_parameter(a, b, t_root))
    for i in np.nonzero(im == 0.0)[0]:  # exact grid hits
        out.append(_atom_from_parameter(a, b, float(ts[i])))
    out.sort(key=lambda p: p.t)
    return out


def _atom_from_parameter(a: complex, b: complex, t: float) -> MassPointHalfline:
    zeta0 = zeta_point(a, t)
    side = -1 if _family_quotient(a, b, zeta0).real > 0 else 1
    w = 1.0 - a.conjugate() * zeta0
    z0 = side * w / abs(w)
    return MassPointHalfline(z0, zeta0, side, point_mass(a, b, zeta0), t)


def mass_point_count(a: complex, b: complex, grid: int = _GRID) -> int:
    """Number of atoms, by counting sign changes only (fast scan kernel)."""
    if a == 0:
        return 0
    t_lo, t_hi = sigma_arc(a)
    ts = np.linspace(t_lo + _T_MARGIN, t_hi - _T_MARGIN, grid)
    im = _family_quotient(a, b, zeta_point(a, ts)).imag
    sign = np.sign(im)
    return int(np.count_nonzero(sign[:-1] * sign[1:] < 0) + np.count_nonzero(im == 0.0))


def point_mass(a: complex, b: complex, zeta0: complex) -> float:
    """Mass 1 / (1 + 2 (rho_b^2/|zeta0-b|^2) / (1 - rho_a^2/|zeta0-a|^2)).

    Raises
    ------
    BoundaryZeta
        If zeta0 sits on (or outside) the boundary of Sigma_a, where the
        denominator degenerates and no mass exists.
    """
    rho_a2 = 1.0 - abs(a) ** 2
    down = 1.0 - rho_a2 / abs(zeta0 - a) ** 2
    if down <= 1e-12:
        raise BoundaryZeta("zeta0 is not strictly inside Sigma_a")
    rho_b2 = 1.0 - abs(b) ** 2
    return float(1.0 / (1.0 + 2.0 * (rho_b2 / abs(zeta0 - b) ** 2) / down))


@dataclass(frozen=True)
class ReturnAsymptotics:
    """Asymptotic return data at the origin: one (z, c, d) triple per atom.

    p(n) tends to |sum z^n c|^2 + |sum z^n d|^2; with several atoms this
    oscillates, and its Cesaro mean is sum |c|^2 + |d|^2 because the cross
    terms average out for distinct unimodular z.
    """

    zs: tuple[complex, ...]
    cs: tuple[complex, ...]
    ds: tuple[complex, ...]

    def value(self, n: int) -> float:
        zn = np.asarray(self.zs) ** n
        return float(
            abs(np.dot(zn, self.cs)) ** 2 + abs(np.dot(zn, self.ds)) ** 2
        )

    @property
    def cesaro(self) -> float:
        return float(
            sum(abs(c) ** 2 for c in self.cs) + sum(abs(d) ** 2 for d in self.ds)
        )

    @property
    def limit(self) -> float | None:
        """The plain limit: 0 with no atoms, the single-atom value with one,
        None (no limit in general) with several."""
        if len(self.zs) == 0:
            return 0.0
        if len(self.zs) == 1:
            return self.value(0)
        return None


def return_asymptotics(a: complex, b: complex, q: Qubit) -> ReturnAsymptotics:
    """Atomic contributions to the return probability for a hatted qubit."""
    rho_b = math.sqrt(1.0 - abs(b) ** 2)
    zs, cs, ds = [], [], []
    for pt in mass_points(a, b):
        factor = q.alpha - q.beta * rho_b / (pt.zeta0 - b).conjugate()
        zs.append(pt.z0)
        cs.append(pt.mu * factor)
        ds.append(-pt.mu * rho_b / (pt.zeta0 - b) * factor)
    return ReturnAsymptotics(tuple(zs), tuple(cs), tuple(ds))


def return_probability_cesaro(a: complex, b: complex, q: Qubit) -> float:
    """Cesaro-averaged asymptotic return probability (hatted qubit)."""
    return return_asymptotics(a, b, q).cesaro


def return_probability_limit(a: complex, b: complex, q: Qubit) -> float:
    """Plain limit of p(n); raises if several atoms make it oscillatory."""
    lim = return_asymptotics(a, b, q).limit
    if lim is None:
        raise ValueError("several atoms: p(n) oscillates; use the cesaro mode")
    return lim


def nonlocalized_qubit(a: complex, b: complex) -> Qubit | None:
    """The localization-free qubit (hatted frame) when exactly one atom
    exists: beta = alpha (conj(zeta0) - conj(b)) / rho_b.  None otherwise."""
    pts = mass_points(a, b)
    if len(pts) != 1:
        return None
    rho_b = math.sqrt(1.0 - abs(b) ** 2)
    return Qubit.normalized(1.0, (pts[0].zeta0 - b).conjugate() / rho_b)


def state_function(a: complex, b: complex, q: Qubit, z: complex) -> complex:
    """Scalar function of the hatted origin qubit: alpha + (beta/rho_b)(1/z - b)."""
    rho_b = math.sqrt(1.0 - abs(b) ** 2)
    return q.alpha + q.beta * (1.0 / z - b) / rho_b


def atom_weight(a: complex, b: complex, q: Qubit, point: MassPointHalfline) -> float:
    """Diagonal spectral weight |psi(z0)|^2 mu({z0}) of the hatted qubit."""
    return float(abs(state_function(a, b, q, point.z0)) ** 2 * point.mu)


def residual(a: complex, b: complex, point: MassPointHalfline) -> float:
    """|h(z0) - 1| at a reported atom."""
    return float(abs(h_halfline_boundary(a, b, cmath.phase(point.z0)) - 1.0))


# ---------------------------------------------------------------------------
# Envelope geometry and the region classes of the a-plane
# ---------------------------------------------------------------------------


def envelope_point(a: complex, t: float, sign: int) -> complex:
    """Point of the envelope of the family of lines through zeta(t).

    For cos t <= |a| (arc parameters) the point lies on the exterior
    envelope, outside the open unit disk.

    Raises
    ------
    CuspParameter
        Where the defining linear system degenerates (cusp of the envelope).
    """
    if a == 0:
        raise ZeroA("envelope_point requires a != 0")
    zeta = zeta_point(a, t)
    big_a = zeta - a
    x = big_a + sign * abs(big_a)
    y = zeta.conjugate() + sign * 1j * (a.conjugate() * zeta).imag / abs(big_a)
    denom = (x * y).real
    if abs(denom) < 1e-12:
        raise CuspParameter(f"envelope system degenerates at t = {t}")
    return zeta + 1j * ((x * zeta.conjugate()).imag / denom) * x


def limit_lines(a: complex) -> tuple[Chord, Chord, Chord, Chord]:
    """The four limit chords, one per family and arc endpoint.

    Each joins an endpoint of Sigma_a to the matching branch point of the
    z-plane arcs; the two chords at an endpoint are orthogonal, with
    directions parallel to sqrt(+-i a).
    """
    if a == 0:
        raise ZeroA("limit_lines requires a != 0")
    u = a / abs(a)
    rho = math.sqrt(1.0 - abs(a) ** 2)
    zeta_plus = u * (abs(a) + 1j * rho)
    zeta_minus = u * (abs(a) - 1j * rho)
    za = rho + 1j * abs(a)
    return (
        Chord(zeta_plus, za, +1, "zeta_plus"),
        Chord(zeta_plus, -za, -1, "zeta_plus"),
        Chord(zeta_minus, za.conjugate(), +1, "zeta_minus"),
        Chord(zeta_minus, -za.conjugate(), -1, "zeta_minus"),
    )


def epicycloid(t) -> complex | np.ndarray:
    """(3/4) e^{it} - (1/4) e^{3it}: two cusps, at +-1/2."""
    t = np.asarray(t, dtype=float)
    val = 0.75 * np.exp(1j * t) - 0.25 * np.exp(3j * t)
    return val if val.ndim else complex(val)


def epicycloid_velocity(t) -> complex | np.ndarray:
    t = np.asarray(t, dtype=float)
    val = 0.75j * np.exp(1j * t) - 0.75j * np.exp(3j * t)
    return val if val.ndim else complex(val)


def epitrochoid(t) -> complex | np.ndarray:
    """(1/2) e^{it} - (1/2) e^{3it}: two loops, self-intersecting at
    +-1/sqrt(2)."""
    t = np.asarray(t, dtype=float)
    val = 0.5 * np.exp(1j * t) - 0.5 * np.exp(3j * t)
    return val if val.ndim else complex(val)


def epitrochoid_velocity(t) -> complex | np.ndarray:
    t = np.asarray(t, dtype=float)
    val = 0.5j * np.exp(1j * t) - 1.5j * np.exp(3j * t)
    return val if val.ndim else complex(val)


def curve_winding(curve, point: complex, samples: int = 8192) -> int:
    """Winding number of a closed curve (parametrized over [0, 2pi]) around
    a point off the curve."""
    ts = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=True)
    rel = np.asarray(curve(ts)) - point
    turns = np.unwrap(np.angle(rel))
    return int(round((turns[-1] - turns[0]) / (2.0 * math.pi)))


def curve_distance(curve, point: complex, samples: int = 8192) -> float:
    """Distance from ``point`` to a parametric curve, by grid search with
    two zoom refinements (resolution well below 1e-9 for these curves)."""
    lo, hi = 0.0, 2.0 * math.pi
    best_t = 0.0
    for _ in range(3):
        ts = np.linspace(lo, hi, samples)
        d = np.abs(np.asarray(curve(ts)) - point)
        i = int(np.argmin(d))
        best_t = ts[i]
        width = (hi - lo) / samples
        lo, hi = best_t - 2 * width, best_t + 2 * width
    return float(abs(curve(best_t) - point))


_EDGE_TOL = 1e-12
_BORDER_TOL = 1e-9


def classify_region(a: complex) -> RegionClassHalfline:
    """Region class of a: which b give localization, by limit-line count.

    L_k means k limit chords cross the open complementary arc of Sigma_a,
    leaving k localization-free bands of b.  The epitrochoid winding number
    around a (0, 1, or 2: outside, inside, inside a loop) is computed as an
    independent cross-check; purely imaginary a makes two chords coincide in
    a single tangent-degenerate line, counted once.

    Raises
    ------
    BorderlineA
        If a is within 1e-9 of the epitrochoid: the class is discontinuous
        across the curve and is not decided numerically.
    """
    if a == 0:
        raise ZeroA("classify_region requires a != 0")
    if curve_distance(epitrochoid, a) <= _BORDER_TOL:
        raise BorderlineA("a lies on the classifying epitrochoid within 1e-9")
    winding = curve_winding(epitrochoid, a)
    chords = limit_lines(a)
    aa = abs(a) ** 2
    crossings = 0
    degenerate = 0
    for chord in chords:
        gap = (a.conjugate() * chord.end).real - aa
        if gap > _EDGE_TOL:
            crossings += 1
        elif abs(gap) <= _EDGE_TOL:
            degenerate += 1
    crossings += degenerate // 2
    if crossings != winding:
        raise AssertionError(
            f"limit-line count {crossings} disagrees with epitrochoid winding {winding}"
        )
    label = f"L{crossings}"
    profile = {0: "Te1+2", 1: "Te1+1", 2: "Te0+1"}[crossings]
    if curve_distance(epicycloid, a) <= _BORDER_TOL:
        tangents = 3
    else:
        tangents = 2 if curve_winding(epicycloid, a) else 4
    return RegionClassHalfline(label, chords, profile, winding, tangents)


def epicycloid_cusps() -> list[complex]:
    """Cusp points of the epicycloid, found by driving the speed to zero
    (golden-section minimization of |velocity|^2 from bracketed grid minima)."""
    return _speed_minima(epicycloid, epicycloid_velocity)


def _speed_minima(curve, velocity) -> list[complex]:
    ts = np.linspace(0.0, 2.0 * math.pi, 4096, endpoint=False)
    speed = np.abs(velocity(ts)) ** 2
    out = []
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    for i in range(len(ts)):
        before = speed[i - 1]
        after = speed[(i + 1) % len(ts)]
        if speed[i] < before and speed[i] < after:
            lo = ts[i] - (ts[1] - ts[0])
            hi = ts[i] + (ts[1] - ts[0])
            x1 = hi - phi * (hi - lo)
            x2 = lo + phi * (hi - lo)
            f1 = abs(velocity(x1)) ** 2
            f2 = abs(velocity(x2)) ** 2
            for _ in range(120):
                if f1 < f2:
                    hi, x2, f2 = x2, x1, f1
                    x1 = hi - phi * (hi - lo)
                    f1 = abs(velocity(x1)) ** 2
                else:
                    lo, x1, f1 = x1, x2, f2
                    x2 = lo + phi * (hi - lo)
                    f2 = abs(velocity(x2)) ** 2
            out.append(complex(curve(0.5 * (lo + hi))))
    return out


def epitrochoid_self_intersections() -> list[complex]:
    """Self-intersection points of the epitrochoid.

    Candidate parameter pairs come from intersecting the coarse polyline
    with itself; each is polished by a two-variable Newton iteration on
    curve(t1) - curve(t2) = 0.  Tangential double points (singular Jacobian)
    are discarded; transversal crossings are deduplicated.
    """
    n = 512
    ts = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    pts = epitrochoid(ts)
    seg_a = pts
    seg_b = np.roll(pts, -1)
    found: list[complex] = []
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            p, r = seg_a[i], seg_b[i] - seg_a[i]
            q, s = seg_a[j], seg_b[j] - seg_a[j]
            denom = (r.conjugate() * s).imag
            if abs(denom) < 1e-12:
                continue
            d = q - p
            t_par = (d.conjugate() * s).imag / denom
            u_par = (d.conjugate() * r).imag / denom
            if not (0.0 <= t_par <= 1.0 and 0.0 <= u_par <= 1.0):
                continue
            t1, t2 = ts[i] + t_par * (2 * math.pi / n), ts[j] + u_par * (2 * math.pi / n)
            root = _newton_pair(t1, t2)
            if root is None:
                continue
            point = complex(epitrochoid(root[0]))
            if all(abs(point - other) > 1e-6 for other in found):
                found.append(point)
    return found


def _newton_pair(t1: float, t2: float) -> tuple[float, float] | None:
    for _ in range(60):
        f = epitrochoid(t1) - epitrochoid(t2)
        j11, j12 = epitrochoid_velocity(t1), -epitrochoid_velocity(t2)
        det = j11.real * j12.imag - j11.imag * j12.real
        if abs(det) < 1e-9:
            return None
        dt1 = (-f.real * j12.imag + f.imag * j12.real) / det
        dt2 = (-j11.real * f.imag + j11.imag * f.real) / det
        t1 += dt1
        t2 += dt2
        if abs(f) < 1e-13 and abs(dt1) + abs(dt2) < 1e-13:
            gap = (t1 - t2) % (2 * math.pi)
            if min(gap, 2 * math.pi - gap) < 1e-6:
                return None
            return t1, t2
    return None
