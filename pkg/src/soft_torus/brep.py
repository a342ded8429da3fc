"""Finite dimensional representations of the chain algebra B_eps.

A representation is a window of unitaries U_lo, ..., U_hi with consecutive
steps ||U_{j+1} - U_j|| <= eps. This module changes generators between the
unitary chain and the (V_0, H_j) picture, compresses and dilates, closes a
window into a periodic family, and builds the covariant block-shift
representation.
"""

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from soft_torus.config import DEFAULT_TOLERANCES, Tolerances
from soft_torus.errors import FamilyError, InvalidParameter, RankTooLarge, WindowTooSmall
from soft_torus.matcore import (
    adjoint,
    as_square,
    clip_to_contraction,
    defect_operators,
    expi,
    hermitian_error,
    max_phase,
    op_norm,
    random_hermitian,
    random_unitary,
    unitary_error,
    unitary_log,
    unitary_power,
)
from soft_torus.ncpoly import NCPoly, evaluate


def step_angle(eps: float) -> float:
    """Largest eigenphase rotation e^{i theta} with |e^{i theta} - 1| <= eps."""
    return 2.0 * math.asin(min(eps, 2.0) / 2.0)


def h_bound(eps: float) -> float:
    """Norm bound (2/pi) arcsin(eps/2) on the Hermitian generators."""
    return step_angle(eps) / math.pi


def _check_eps(eps: float, allow_two: bool = True) -> None:
    upper_ok = eps <= 2.0 if allow_two else eps < 2.0
    if not (eps > 0.0 and upper_ok):
        bound = "(0, 2]" if allow_two else "(0, 2)"
        raise InvalidParameter(f"eps = {eps} must lie in {bound}")


def _frozen(matrices: Sequence[np.ndarray], name: str) -> tuple[np.ndarray, ...]:
    result = []
    for j, m in enumerate(matrices):
        m = np.array(as_square(m, f"{name}[{j}]"))
        m.setflags(write=False)
        result.append(m)
    return tuple(result)


def _common_dim(matrices: Sequence[np.ndarray]) -> int:
    dims = {m.shape[0] for m in matrices}
    if len(dims) != 1:
        raise FamilyError(f"family members have different sizes {sorted(dims)}")
    return dims.pop()


def _step_norms(units: Sequence[np.ndarray], cyclic: bool = False) -> list[float]:
    pairs = list(zip(units, units[1:]))
    if cyclic:
        pairs.append((units[-1], units[0]))
    return [float(np.linalg.norm(b - a, 2)) for a, b in pairs]


def _check_units(units: Sequence[np.ndarray], tol: Tolerances) -> None:
    for j, U in enumerate(units):
        err = unitary_error(U)
        if err > tol.unitary_tol:
            raise FamilyError(f"member {j} is not unitary (||U*U - I|| = {err:.3e})")


def _check_steps(steps: Sequence[float], eps: float, tol: Tolerances) -> None:
    for j, step in enumerate(steps):
        if step > eps + tol.step_slack:
            raise FamilyError(f"step {j} has norm {step:.12g} > eps = {eps}")


# --- Family types ---


@dataclass(frozen=True, eq=False)
class BFamily:
    """Unitaries U_j for j in [lo, hi] with steps bounded by eps."""

    eps: float
    window: tuple[int, int]
    units: tuple[np.ndarray, ...]
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)

    def __post_init__(self):
        _check_eps(self.eps)
        lo, hi = (int(x) for x in self.window)
        if lo > hi:
            raise FamilyError(f"empty window [{lo}, {hi}]")
        if len(self.units) != hi - lo + 1:
            raise FamilyError(f"window [{lo}, {hi}] needs {hi - lo + 1} members, got {len(self.units)}")
        object.__setattr__(self, "window", (lo, hi))
        object.__setattr__(self, "units", _frozen(self.units, "U"))
        _common_dim(self.units)
        _check_units(self.units, self.tol)
        _check_steps(self.steps(), self.eps, self.tol)

    @property
    def dim(self) -> int:
        return self.units[0].shape[0]

    @property
    def indices(self) -> range:
        return range(self.window[0], self.window[1] + 1)

    def unit(self, j: int) -> np.ndarray:
        lo, hi = self.window
        if not lo <= j <= hi:
            raise WindowTooSmall(f"index {j} outside window [{lo}, {hi}]")
        return self.units[j - lo]

    def steps(self) -> list[float]:
        return _step_norms(self.units)

    def max_step(self) -> float:
        return max(self.steps(), default=0.0)


@dataclass(frozen=True, eq=False)
class HFamily:
    """Unitary V_0 at index ``anchor`` and Hermitian H_j for j in [lo, hi - 1]."""

    eps: float
    window: tuple[int, int]
    anchor: int
    v0: np.ndarray
    hs: tuple[np.ndarray, ...]
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)

    def __post_init__(self):
        _check_eps(self.eps, allow_two=False)
        lo, hi = (int(x) for x in self.window)
        if lo > hi or not lo <= self.anchor <= hi:
            raise FamilyError(f"anchor {self.anchor} outside window [{lo}, {hi}]")
        if len(self.hs) != hi - lo:
            raise FamilyError(f"window [{lo}, {hi}] needs {hi - lo} Hermitian members, got {len(self.hs)}")
        object.__setattr__(self, "window", (lo, hi))
        (v0,) = _frozen([self.v0], "V0")
        object.__setattr__(self, "v0", v0)
        object.__setattr__(self, "hs", _frozen(self.hs, "H"))
        _check_units([v0], self.tol)
        if self.hs and _common_dim([v0, *self.hs]) != v0.shape[0]:
            raise FamilyError("V0 and H members differ in size")
        bound = h_bound(self.eps) + self.tol.step_slack
        for j, H in zip(self.h_indices, self.hs):
            scale = max(op_norm(H), np.finfo(float).tiny)
            if hermitian_error(H) > self.tol.hermitian_tol * scale:
                raise FamilyError(f"H_{j} is not Hermitian")
            if op_norm(H) > bound:
                raise FamilyError(f"||H_{j}|| = {op_norm(H):.12g} exceeds {bound:.12g}")

    @property
    def dim(self) -> int:
        return self.v0.shape[0]

    @property
    def h_indices(self) -> range:
        return range(self.window[0], self.window[1])

    def h(self, j: int) -> np.ndarray:
        return self.hs[j - self.window[0]]


@dataclass(frozen=True, eq=False)
class PeriodicFamily:
    """Unitaries indexed by Z/p; every cyclic step, wraparound included, is <= eps.

    ``source_window`` is the window of the family this one extends, if any.
    """

    eps: float
    units: tuple[np.ndarray, ...]
    source_window: tuple[int, int] | None = None
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)

    def __post_init__(self):
        _check_eps(self.eps)
        if not self.units or len(self.units) % 2:
            raise FamilyError(f"period must be positive and even, got {len(self.units)}")
        object.__setattr__(self, "units", _frozen(self.units, "U"))
        _common_dim(self.units)
        _check_units(self.units, self.tol)
        _check_steps(self.steps(), self.eps, self.tol)

    @property
    def dim(self) -> int:
        return self.units[0].shape[0]

    @property
    def period(self) -> int:
        return len(self.units)

    def unit(self, n: int) -> np.ndarray:
        return self.units[n % self.period]

    def steps(self) -> list[float]:
        return _step_norms(self.units, cyclic=True)

    def max_step(self) -> float:
        return max(self.steps())


@dataclass(frozen=True, eq=False)
class CovariantRep:
    """Block-diagonal representation rho with the block cyclic shift S.

    rho(u_i) = diag(pi'(u_i), ..., pi'(u_{i+p-1})) and S rho(u_i) S* = rho(u_{i+1}).
    """

    base: PeriodicFamily
    rho_u0: np.ndarray
    shift: np.ndarray

    @property
    def n(self) -> int:
        return self.base.period * self.base.dim

    @property
    def period(self) -> int:
        return self.base.period

    def rho(self, i: int) -> np.ndarray:
        if i == 0:
            return self.rho_u0
        return scipy.linalg.block_diag(*(self.base.unit(i + j) for j in range(self.period)))

    def rho_of(self, b: NCPoly) -> np.ndarray:
        """rho(b) for a polynomial in the u_n letters."""
        if not b.uses_only_u():
            raise InvalidParameter("rho is defined on polynomials in the u_n letters only")
        return evaluate(b, {f"u_{i}": self.rho(i) for i in b.u_indices()}, dim=self.n)


# --- Change of generators ---


def hs_from_us(f: BFamily) -> HFamily:
    """H_j = (1/pi) Log(U_{j+1} U_j*), V_0 = U_0 (or U_lo when 0 is outside the window)."""
    _check_eps(f.eps, allow_two=False)
    lo, hi = f.window
    anchor = 0 if lo <= 0 <= hi else lo
    hs = [unitary_log(f.unit(j + 1) @ adjoint(f.unit(j)), f.tol) / math.pi for j in range(lo, hi)]
    return HFamily(f.eps, f.window, anchor, f.unit(anchor), hs, f.tol)


def us_from_hs(h: HFamily) -> BFamily:
    """Inverse of ``hs_from_us``.

    U_n = e^{i pi H_{n-1}} ... e^{i pi H_anchor} V_0 above the anchor and
    U_n = e^{-i pi H_n} ... e^{-i pi H_{anchor-1}} V_0 below it.
    """
    lo, hi = h.window
    units = {h.anchor: np.array(h.v0)}
    for n in range(h.anchor + 1, hi + 1):
        units[n] = expi(h.h(n - 1), math.pi, h.tol) @ units[n - 1]
    for n in range(h.anchor - 1, lo - 1, -1):
        units[n] = expi(h.h(n), -math.pi, h.tol) @ units[n + 1]
    return BFamily(h.eps, h.window, [units[n] for n in range(lo, hi + 1)], h.tol)


def scale_homotopy(h: HFamily, t: float) -> HFamily:
    """chi_t: V_0 fixed, every H_j scaled by t in [0, 1]."""
    if not 0.0 <= t <= 1.0:
        raise InvalidParameter(f"t = {t} must lie in [0, 1]")
    return HFamily(h.eps, h.window, h.anchor, h.v0, [t * H for H in h.hs], h.tol)


def homotopy_families(h: HFamily, steps: int) -> list[BFamily]:
    """Families along chi_t for t = 1, 1 - 1/steps, ..., 0."""
    if steps < 1:
        raise InvalidParameter("steps must be at least 1")
    return [us_from_hs(scale_homotopy(h, 1.0 - k / steps)) for k in range(steps + 1)]


def collapse_to_circle(h: HFamily) -> BFamily:
    """Image under the map through C(T): every H_j sent to 0, so U_j = V_0 throughout."""
    return us_from_hs(scale_homotopy(h, 0.0))


# --- Compression and dilation ---


def halmos_dilate(T, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Unitary [[T, sqrt(I - TT*)], [sqrt(I - T*T), -T*]] with T in the corner.

    Raises:
        NotContraction: If ||T|| > 1 + contraction_slack.
    """
    T = clip_to_contraction(T, tol)
    defect, defect_star = defect_operators(T, tol)
    return np.block([[T, defect_star], [defect, -adjoint(T)]])


def compress_and_dilate(ref: BFamily | HFamily, m: int) -> BFamily:
    """Compress to the first m coordinates and dilate to size 2m.

    V_{0,m} = halmos_dilate(P_m V_0 P_m) and H_{j,m} = diag(K_j, K_j) with
    K_j = P_m H_j P_m; the result is the chain built from them.

    Raises:
        RankTooLarge: If m exceeds the reference dimension.
    """
    h = ref if isinstance(ref, HFamily) else hs_from_us(ref)
    if m < 1:
        raise InvalidParameter(f"rank m = {m} must be positive")
    if m > h.dim:
        raise RankTooLarge(f"rank m = {m} exceeds dimension {h.dim}")
    v0m = halmos_dilate(h.v0[:m, :m], h.tol)
    hsm = [scipy.linalg.block_diag(H[:m, :m], H[:m, :m]) for H in h.hs]
    return us_from_hs(HFamily(h.eps, h.window, h.anchor, v0m, hsm, h.tol))


def eval_on_family(b: NCPoly, family: BFamily | PeriodicFamily) -> np.ndarray:
    """Value of a u_n-letter polynomial at a family.

    Raises:
        WindowTooSmall: If b uses an index outside a BFamily window.
    """
    if not b.uses_only_u():
        raise InvalidParameter("only polynomials in the u_n letters can be evaluated on a family")
    assign = {f"u_{i}": family.unit(i) for i in b.u_indices()}
    return evaluate(b, assign, dim=family.dim)


def dilation_norm_profile(ref: BFamily, b: NCPoly, ms: Sequence[int]) -> list[tuple[int, float]]:
    """Norm of b at the compressed-and-dilated family for each rank m."""
    h = hs_from_us(ref)
    return [(m, op_norm(eval_on_family(b, compress_and_dilate(h, m)))) for m in ms]


# --- Paths and periodization ---


def path_to_identity(W, eps: float, tol: Tolerances = DEFAULT_TOLERANCES) -> list[np.ndarray]:
    """Spectral path W = w_0, ..., w_M = I with steps <= eps.

    w_k = W^{1 - k/M} with M = ceil(theta_max / (2 arcsin(eps/2))), the fewest
    steps along this path; M = 0 when W is the identity up to ``unitary_tol``.
    """
    _check_eps(eps)
    W = as_square(W, "W")
    theta = max_phase(W, tol)
    if theta <= tol.unitary_tol:
        return [np.eye(W.shape[0], dtype=complex)]
    # the 1e-12 keeps ratios like pi / (pi/3) from rounding up a step
    M = max(1, math.ceil(theta / step_angle(eps) - 1e-12))
    return [unitary_power(W, 1.0 - k / M, tol) for k in range(M + 1)]


def periodize(f: BFamily) -> PeriodicFamily:
    """Close a family on [-N, N] into a 2(N + M)-periodic family.

    Above N the family follows the path from U_N to I, below -N the path from
    U_{-N} to I; both paths share one length M >= 1, the shorter padded with I.
    """
    lo, hi = f.window
    if lo != -hi:
        raise FamilyError(f"periodize needs a symmetric window [-N, N], got [{lo}, {hi}]")
    N = hi
    upper = path_to_identity(f.unit(N), f.eps, f.tol)
    lower = path_to_identity(f.unit(-N), f.eps, f.tol)
    M = max(len(upper) - 1, len(lower) - 1, 1)
    identity = np.eye(f.dim, dtype=complex)
    upper += [identity] * (M + 1 - len(upper))
    lower += [identity] * (M + 1 - len(lower))

    def value(n: int) -> np.ndarray:
        if n > N:
            return upper[n - N]
        if n < -N:
            return lower[-N - n]
        return f.unit(n)

    period = 2 * (N + M)
    units = [None] * period
    for n in range(-N - M, N + M):
        units[n % period] = value(n)
    return PeriodicFamily(f.eps, units, source_window=f.window, tol=f.tol)


def covariant_rep(pf: PeriodicFamily) -> CovariantRep:
    """rho(u_0) = diag(pi'(u_0), ..., pi'(u_{p-1})) and the forward block cyclic shift."""
    p = pf.period
    cyclic = np.roll(np.eye(p), 1, axis=1)
    shift = np.kron(cyclic, np.eye(pf.dim)).astype(complex)
    rho_u0 = scipy.linalg.block_diag(*pf.units).astype(complex)
    return CovariantRep(pf, rho_u0, shift)


# --- Random families ---


def chain_family(eps: float, window: tuple[int, int], start, thetas: Sequence[np.ndarray],
                 tol: Tolerances = DEFAULT_TOLERANCES) -> BFamily:
    """Family with U_lo = start and U_{j+1} = exp(i Theta_j) U_j."""
    units = [np.asarray(start, dtype=complex)]
    for theta in thetas:
        units.append(expi(theta, 1.0, tol) @ units[-1])
    return BFamily(eps, window, units, tol)


def random_step(rng: np.random.Generator, dim: int, eps: float) -> np.ndarray:
    """Random Hermitian Theta with ||Theta|| uniform in [0, 2 arcsin(eps/2)]."""
    G = random_hermitian(rng, dim)
    return G * (step_angle(eps) * rng.uniform(0.0, 1.0) / max(op_norm(G), np.finfo(float).tiny))


def random_brep(eps: float, dim: int, window: tuple[int, int], seed) -> BFamily:
    """Seeded random family: Haar U_lo, then random steps within the eps bound.

    ``seed`` is anything ``numpy.random.default_rng`` accepts; equal seeds
    give identical families.
    """
    _check_eps(eps, allow_two=False)
    lo, hi = window
    if lo > hi:
        raise InvalidParameter(f"empty window [{lo}, {hi}]")
    rng = np.random.default_rng(seed)
    start = random_unitary(rng, dim)
    thetas = [random_step(rng, dim, eps) for _ in range(hi - lo)]
    return chain_family(eps, (lo, hi), start, thetas)
