"""Banded transition matrices in the CMV ordering and exact evolution.

Basis ordering
--------------
half line::

    |0 up>, |0 dn>, |1 up>, |1 dn>, ...      index(k, up) = 2k, index(k, dn) = 2k+1

line (folded at the origin)::

    |0 up>, |-1 dn>, |-1 up>, |0 dn>, |1 up>, |-2 dn>, |-2 up>, |1 dn>, ...

    index(j, up) = 4j     and  index(j, dn) = 4j+3      for j >= 0
    index(j, up) = -4j-2   and  index(j, dn) = -4j-3     for j <= -1

Matrix convention: ``U[i, j]`` is the amplitude carried from basis state i to
basis state j, so one step of evolution maps a row vector psi to ``psi @ U``.
With this ordering U is pentadiagonal on the half line (scalar half-width 2)
and five-block-diagonal on the line (2x2 blocks; scalar half-width 4).

``build_transition`` assembles U twice, once directly from the coin action
and once as Lambda C Lambda^dagger with the CMV factorization, and verifies
entry-wise agreement before returning.

Truncation: amplitudes are exact for the infinite system as long as the
ballistic cone (one site per step) stays inside the matrix.  The enforced
floor ``dim >= 2 (steps + |site| + 8)`` is the full-cone requirement on the
half line; on the line it is weaker than the full cone but still guarantees
exactness of amplitudes near the folding origin, because truncation errors
born at the edge need as many steps again to travel back.  Default sizes
always cover the full cone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coins import Lattice, Qubit, WalkSpec
from .errors import SizeTooSmall, TruncationTooSmall

__all__ = [
    "BandedUnitary",
    "index_of",
    "site_of_index",
    "min_dimension",
    "default_dimension",
    "build_lambda",
    "verblunsky_halfline",
    "verblunsky_line",
    "build_transition",
    "basis_state",
    "qubit_state",
    "evolve",
    "amplitude",
    "return_probability",
    "return_probability_series",
    "moments_at_origin",
]


def index_of(lattice: Lattice, site: int, up: bool) -> int:
    """Basis index of |site, spin> in the CMV ordering."""
    if lattice is Lattice.HALF_LINE:
        if site < 0:
            raise ValueError("half-line sites are nonnegative")
        return 2 * site + (0 if up else 1)
    if site >= 0:
        return 4 * site + (0 if up else 3)
    return -4 * site - (2 if up else 3)


def site_of_index(lattice: Lattice, i: int) -> tuple[int, bool]:
    """Inverse of :func:`index_of`: returns (site, is_up)."""
    if lattice is Lattice.HALF_LINE:
        return i // 2, i % 2 == 0
    j, r = divmod(i, 4)
    if r == 0:
        return j, True
    if r == 3:
        return j, False
    if r == 2:
        return -j - 1, True
    return -j - 1, False


def min_dimension(steps: int, start_site: int = 0) -> int:
    """Smallest admissible truncation for ``steps`` steps from ``start_site``."""
    return 2 * (steps + abs(start_site) + 8)


def default_dimension(lattice: Lattice, steps: int, start_site: int = 0) -> int:
    """Truncation containing the full ballistic cone with margin."""
    reach = steps + abs(start_site) + 8
    if lattice is Lattice.HALF_LINE:
        return 2 * reach
    return 4 * reach + 4


class _BandBuilder:
    def __init__(self, dim: int, halfwidth: int):
        self.dim = dim
        self.halfwidth = halfwidth
        self.band = np.zeros((dim, 2 * halfwidth + 1), dtype=complex)

    def set(self, i: int, j: int, value: complex):
        if 0 <= i < self.dim and 0 <= j < self.dim:
            off = j - i
            if abs(off) > self.halfwidth:
                raise ValueError(f"entry ({i},{j}) outside band")
            self.band[i, self.halfwidth + off] = value


@dataclass(frozen=True, eq=False)
class BandedUnitary:
    """Banded transition matrix U stored by rows.

    ``band[i, halfwidth + o]`` holds ``U[i, i + o]`` for offsets
    ``o in [-halfwidth, halfwidth]``.
    """

    lattice: Lattice
    band: np.ndarray

    @property
    def dim(self) -> int:
        return self.band.shape[0]

    @property
    def halfwidth(self) -> int:
        return (self.band.shape[1] - 1) // 2

    def entry(self, i: int, j: int) -> complex:
        off = j - i
        if abs(off) > self.halfwidth:
            return 0.0 + 0.0j
        return complex(self.band[i, self.halfwidth + off])

    def to_dense(self) -> np.ndarray:
        w = self.halfwidth
        dense = np.zeros((self.dim, self.dim), dtype=complex)
        for off in range(-w, w + 1):
            col = self.band[:, w + off]
            if off >= 0:
                idx = np.arange(0, self.dim - off)
                dense[idx, idx + off] = col[: self.dim - off]
            else:
                idx = np.arange(-off, self.dim)
                dense[idx, idx + off] = col[-off:]
        return dense

    def step(self, psi: np.ndarray) -> np.ndarray:
        """One evolution step: returns ``psi @ U``."""
        w = self.halfwidth
        out = np.zeros_like(psi)
        for off in range(-w, w + 1):
            src = psi * self.band[:, w + off]
            if off >= 0:
                out[off:] += src[: self.dim - off] if off else src
            else:
                out[: self.dim + off] += src[-off:]
        return out


def _lambda_halfline(spec: WalkSpec, size: int) -> np.ndarray:
    # lambda_{-1} = lambda_0 = 1, then the coin-phase recursion site by site.
    lam = np.ones(size, dtype=complex)
    lam_odd_prev = 1.0 + 0.0j  # lambda_{2k-1}, starting at lambda_{-1}
    lam_even_prev = 1.0 + 0.0j  # lambda_{2k}, starting at lambda_0
    for k in range((size + 1) // 2 + 1):
        coin = spec.defect if k == 0 else spec.coin
        lam_odd = np.exp(1j * coin.sigma2) * lam_odd_prev
        lam_even = np.exp(-1j * coin.sigma1) * lam_even_prev
        if 2 * k + 1 < size:
            lam[2 * k + 1] = lam_odd
        if 2 * k + 2 < size:
            lam[2 * k + 2] = lam_even
        lam_odd_prev, lam_even_prev = lam_odd, lam_even
    return lam


def _lambda_line(spec: WalkSpec, size: int) -> np.ndarray:
    c, d = spec.coin, spec.defect
    s1, s2 = c.sigma1, c.sigma2
    t1, t2 = d.sigma1, d.sigma2
    lam = np.ones(size, dtype=complex)
    for block in range(1, (size + 1) // 2 + 1):
        if block % 2 == 1:  # block 2k-1
            k = (block + 1) // 2
            first = np.exp(1j * k * s1)
            second = np.exp(1j * (t2 + (k - 1) * s2))
        else:  # block 2k
            k = block // 2
            first = np.exp(-1j * (t1 + (k - 1) * s1))
            second = np.exp(-1j * k * s2)
        if 2 * block < size:
            lam[2 * block] = first
        if 2 * block + 1 < size:
            lam[2 * block + 1] = second
    return lam


def build_lambda(spec: WalkSpec, size: int) -> np.ndarray:
    """Diagonal of the unimodular factor Lambda, as a length-``size`` vector.

    On the line Lambda is diagonal in 2x2 blocks, hence still a plain
    diagonal; the vector interleaves the block entries.
    """
    if size < 2:
        raise SizeTooSmall("need size >= 2")
    if spec.lattice is Lattice.HALF_LINE:
        return _lambda_halfline(spec, size)
    return _lambda_line(spec, size)


def verblunsky_halfline(spec: WalkSpec, count: int) -> np.ndarray:
    """First ``count`` Verblunsky coefficients (odd entries vanish)."""
    c, d = spec.coin, spec.defect
    sigma, tau = c.sigma, d.sigma
    alphas = np.zeros(count, dtype=complex)
    for k in range((count + 1) // 2):
        if 2 * k >= count:
            break
        if k == 0:
            alphas[0] = d.c21.conjugate()
        else:
            alphas[2 * k] = c.c21.conjugate() * np.exp(-1j * (tau + (k - 1) * sigma))
    return alphas


def verblunsky_line(spec: WalkSpec, k: int) -> complex:
    """Scalar coefficient alpha_{2k} of the folded walk, k in Z."""
    c, d = spec.coin, spec.defect
    sigma, tau = c.sigma, d.sigma
    if k == 0:
        return d.c21.conjugate()
    if k > 0:
        return c.c21.conjugate() * np.exp(-1j * (tau + (k - 1) * sigma))
    return c.c21.conjugate() * np.exp(-1j * k * sigma)


def _coin_band_halfline(spec: WalkSpec, size: int) -> _BandBuilder:
    bb = _BandBuilder(size, 2)
    d = spec.defect
    bb.set(0, 0, d.c21)
    bb.set(0, 2, d.c11)
    bb.set(1, 0, d.c22)
    bb.set(1, 2, d.c12)
    c = spec.coin
    for k in range(1, (size + 1) // 2):
        bb.set(2 * k, 2 * k - 1, c.c21)
        bb.set(2 * k, 2 * k + 2, c.c11)
        bb.set(2 * k + 1, 2 * k - 1, c.c22)
        bb.set(2 * k + 1, 2 * k + 2, c.c12)
    return bb


def _coin_band_line(spec: WalkSpec, size: int) -> _BandBuilder:
    bb = _BandBuilder(size, 4)
    lat = spec.lattice
    for i in range(size):
        site, up = site_of_index(lat, i)
        coin = spec.defect if site == 0 else spec.coin
        up_target = index_of(lat, site + 1, True)
        dn_target = index_of(lat, site - 1, False)
        if up:
            bb.set(i, up_target, coin.c11)
            bb.set(i, dn_target, coin.c21)
        else:
            bb.set(i, up_target, coin.c12)
            bb.set(i, dn_target, coin.c22)
    return bb


def _rho(alpha: complex) -> float:
    return math.sqrt(1.0 - abs(alpha) ** 2)


def _cmv_band_halfline(spec: WalkSpec, size: int) -> _BandBuilder:
    bb = _BandBuilder(size, 2)
    alphas = verblunsky_halfline(spec, size + 2)
    for k in range((size + 1) // 2):
        a2k = alphas[2 * k]
        rho = _rho(a2k)
        left = 2 * k - 1 if k > 0 else 0
        bb.set(2 * k, left, a2k.conjugate())
        bb.set(2 * k, 2 * k + 2, rho)
        bb.set(2 * k + 1, left, rho)
        bb.set(2 * k + 1, 2 * k + 2, -a2k)
    lam = _lambda_halfline(spec, size)
    return _conjugate_by_lambda(bb, lam)


def _cmv_band_line(spec: WalkSpec, size: int) -> _BandBuilder:
    bb = _BandBuilder(size, 4)
    for m in range((size + 3) // 4 + 1):
        if 4 * m >= size:
            break
        a_plus = verblunsky_line(spec, m)  # alpha_{2m}
        a_minus = verblunsky_line(spec, -m - 1)  # alpha_{-2m-2}
        r_plus, r_minus = _rho(a_plus), _rho(a_minus)
        if m == 0:
            bb.set(0, 1, a_plus.conjugate())
            bb.set(1, 0, -a_minus)
            bb.set(2, 0, r_minus)
            bb.set(3, 1, r_plus)
        else:
            bb.set(4 * m, 4 * m - 1, a_plus.conjugate())
            bb.set(4 * m + 1, 4 * m - 2, -a_minus)
            bb.set(4 * m + 2, 4 * m - 2, r_minus)
            bb.set(4 * m + 3, 4 * m - 1, r_plus)
        bb.set(4 * m, 4 * m + 4, r_plus)
        bb.set(4 * m + 1, 4 * m + 5, r_minus)
        bb.set(4 * m + 2, 4 * m + 5, a_minus.conjugate())
        bb.set(4 * m + 3, 4 * m + 4, -a_plus)
    lam = _lambda_line(spec, size)
    return _conjugate_by_lambda(bb, lam)


def _conjugate_by_lambda(bb: _BandBuilder, lam: np.ndarray) -> _BandBuilder:
    w = bb.halfwidth
    dim = bb.dim
    for off in range(-w, w + 1):
        col = bb.band[:, w + off]
        if off >= 0:
            col[: dim - off] *= lam[: dim - off] * lam[off:].conjugate()
            col[dim - off :] = 0.0
        else:
            col[-off:] *= lam[-off:] * lam[: dim + off].conjugate()
            col[: -off] = 0.0
    return bb


def build_transition(spec: WalkSpec, size: int, check: bool = True) -> BandedUnitary:
    """Truncated transition matrix of the walk.

    Assembled directly from the one-step coin action; when ``check`` is on
    (the default) the Lambda C Lambda^dagger factorization is built as well
    and the two are required to agree entry-wise to 1e-12.

    Raises
    ------
    SizeTooSmall
        If ``size`` is odd or below 4.
    """
    if size < 4 or size % 2:
        raise SizeTooSmall("size must be even and >= 4")
    if spec.lattice is Lattice.HALF_LINE:
        direct = _coin_band_halfline(spec, size)
        factored = _cmv_band_halfline(spec, size) if check else None
    else:
        direct = _coin_band_line(spec, size)
        factored = _cmv_band_line(spec, size) if check else None
    if factored is not None:
        gap = np.abs(direct.band - factored.band).max()
        if gap > 1e-12:
            raise AssertionError(
                f"coin-action and CMV constructions disagree by {gap:.3e}"
            )
    direct.band.flags.writeable = False
    return BandedUnitary(spec.lattice, direct.band)


def basis_state(lattice: Lattice, site: int, up: bool, dim: int) -> np.ndarray:
    psi = np.zeros(dim, dtype=complex)
    psi[index_of(lattice, site, up)] = 1.0
    return psi


def qubit_state(lattice: Lattice, site: int, q: Qubit, dim: int) -> np.ndarray:
    psi = np.zeros(dim, dtype=complex)
    psi[index_of(lattice, site, True)] = q.alpha
    psi[index_of(lattice, site, False)] = q.beta
    return psi


def _support_reach(lattice: Lattice, psi: np.ndarray) -> int:
    nz = np.nonzero(psi)[0]
    if len(nz) == 0:
        return 0
    return max(abs(site_of_index(lattice, int(i))[0]) for i in nz)


def evolve(u: BandedUnitary, psi0: np.ndarray, steps: int) -> np.ndarray:
    """Apply ``steps`` single evolution steps to a row state.

    Raises
    ------
    TruncationTooSmall
        If the matrix dimension is below ``min_dimension`` for the requested
        step count and the support of ``psi0``.
    """
    if len(psi0) != u.dim:
        raise ValueError("state length does not match matrix dimension")
    need = min_dimension(steps, _support_reach(u.lattice, psi0))
    if u.dim < need:
        raise TruncationTooSmall(f"dimension {u.dim} < required {need}")
    psi = psi0.astype(complex, copy=True)
    for _ in range(steps):
        psi = u.step(psi)
    return psi


def amplitude(
    spec: WalkSpec, i: int, j: int, steps: int, dimension: int | None = None
) -> complex:
    """Transition amplitude ``(U^steps)[i, j]`` for basis indices i, j."""
    reach = max(
        abs(site_of_index(spec.lattice, i)[0]), abs(site_of_index(spec.lattice, j)[0])
    )
    dim = dimension or default_dimension(spec.lattice, steps, reach)
    u = build_transition(spec, dim, check=False)
    psi = np.zeros(dim, dtype=complex)
    psi[i] = 1.0
    return complex(evolve(u, psi, steps)[j])


def return_probability(
    spec: WalkSpec,
    site: int,
    q: Qubit,
    steps: int,
    dimension: int | None = None,
) -> float:
    """Probability of finding the walker back at ``site`` after ``steps``."""
    return float(return_probability_series(spec, site, q, steps, dimension)[-1])


def return_probability_series(
    spec: WalkSpec,
    site: int,
    q: Qubit,
    steps: int,
    dimension: int | None = None,
) -> np.ndarray:
    """Array of return probabilities p(0), p(1), ..., p(steps) at ``site``."""
    dim = dimension or default_dimension(spec.lattice, steps, site)
    need = min_dimension(steps, site)
    if dim < need:
        raise TruncationTooSmall(f"dimension {dim} < required {need}")
    u = build_transition(spec, dim, check=False)
    i_up = index_of(spec.lattice, site, True)
    i_dn = index_of(spec.lattice, site, False)
    psi = qubit_state(spec.lattice, site, q, dim)
    out = np.empty(steps + 1)
    out[0] = abs(psi[i_up]) ** 2 + abs(psi[i_dn]) ** 2
    for n in range(1, steps + 1):
        psi = u.step(psi)
        out[n] = abs(psi[i_up]) ** 2 + abs(psi[i_dn]) ** 2
    return out


def moments_at_origin(
    spec: WalkSpec, steps: int, dimension: int | None = None
) -> np.ndarray:
    """The (0,0) entry (half line) or 2x2 block (line) of U^n, n = 0..steps."""
    dim = dimension or default_dimension(spec.lattice, steps, 0)
    need = min_dimension(steps, 0)
    if dim < need:
        raise TruncationTooSmall(f"dimension {dim} < required {need}")
    u = build_transition(spec, dim, check=False)
    if spec.lattice is Lattice.HALF_LINE:
        psi = np.zeros(dim, dtype=complex)
        psi[0] = 1.0
        out = np.empty(steps + 1, dtype=complex)
        out[0] = psi[0]
        for n in range(1, steps + 1):
            psi = u.step(psi)
            out[n] = psi[0]
        return out
    psi0 = np.zeros(dim, dtype=complex)
    psi0[0] = 1.0
    psi1 = np.zeros(dim, dtype=complex)
    psi1[1] = 1.0
    out = np.empty((steps + 1, 2, 2), dtype=complex)
    out[0] = np.eye(2)
    for n in range(1, steps + 1):
        psi0 = u.step(psi0)
        psi1 = u.step(psi1)
        out[n, 0, 0] = psi0[0]
        out[n, 0, 1] = psi0[1]
        out[n, 1, 0] = psi1[0]
        out[n, 1, 1] = psi1[1]
    return out
