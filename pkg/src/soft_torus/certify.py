"""Certificates that a *-polynomial does not vanish on a finite dimensional pair.

Pipeline: b = E(a*a), a family maximizing ||b||, its periodization, the
covariant representation (rho, S), and the pair U = rho(u_0), V = lam S.
Averaging a*a over the q-th roots of unity lam_j kills every component of
nonzero v-degree below q, so

    mean_j  a(U, lam_j S)* a(U, lam_j S)  =  rho(E(a*a)),

and some lam_j gives ||a(U, lam_j S)||^2 >= ||rho(E(a*a))||.
"""

import dataclasses
import logging
import math

import numpy as np

from soft_torus.brep import BFamily, CovariantRep, covariant_rep, periodize
from soft_torus.config import DEFAULT_TOLERANCES, DEFAULT_VERIFY_TOL, Tolerances
from soft_torus.errors import InvalidParameter, NotUnitModulus, QTooSmall, WindowTooSmall, ZeroPolynomial
from soft_torus.matcore import (
    adjoint,
    commutator_norm,
    hyponormal_defect,
    normalized_trace,
    op_norm,
    unitary_error,
)
from soft_torus.models import Certificate, SearchParams, VerificationReport
from soft_torus.ncpoly import NCPoly, evaluate, normal_order
from soft_torus.poly_parser import parse
from soft_torus.search import search_brep, search_window

logger = logging.getLogger(__name__)

UNIT_MODULUS_TOL = 1e-12


def roots_of_unity(q: int, lam0: complex = 1.0) -> list[complex]:
    """lam0 times the q-th roots of unity, starting at lam0 itself."""
    return [complex(lam0 * np.exp(2j * np.pi * j / q)) if j else complex(lam0) for j in range(q)]


def rep_of_Ae(cr: CovariantRep, lam: complex) -> tuple[np.ndarray, np.ndarray]:
    """U = rho(u_0) and V = lam S; ||UV - VU|| is the largest cyclic step for every lam.

    Raises:
        NotUnitModulus: If |lam| differs from 1.
    """
    if abs(abs(lam) - 1.0) > UNIT_MODULUS_TOL:
        raise NotUnitModulus(f"|lambda| = {abs(lam):.15g} is not 1")
    return cr.rho_u0, lam * cr.shift


def _assignment(cr: CovariantRep, lam: complex, p: NCPoly) -> dict[str, np.ndarray]:
    U, V = rep_of_Ae(cr, lam)
    assign = {"v": V, "u_0": U}
    for i in p.u_indices():
        assign[f"u_{i}"] = cr.rho(i)
    return assign


def evaluate_pair(cr: CovariantRep, lam: complex, a: NCPoly) -> np.ndarray:
    """a(U, lam S), with u_n sent to rho(u_n) = V^n U V^-n."""
    return evaluate(a, _assignment(cr, lam, a), dim=cr.n)


def _check_q(a: NCPoly, q: int) -> int:
    degree = normal_order(a.adjoint() * a).degree
    if q <= degree:
        raise QTooSmall(f"averaging order q = {q} must exceed the v-degree {degree} of a*a")
    return degree


def averaged_image(cr: CovariantRep, a: NCPoly, q: int, lam0: complex = 1.0) -> np.ndarray:
    """Mean of a(U, lam_j S)* a(U, lam_j S) over lam_j = lam0 e^{2 pi i j / q}."""
    _check_q(a, q)
    total = np.zeros((cr.n, cr.n), dtype=complex)
    for lam in roots_of_unity(q, lam0):
        X = evaluate_pair(cr, lam, a)
        total += adjoint(X) @ X
    return total / q


def averaging_lower_bound(cr: CovariantRep, a: NCPoly, q: int) -> float:
    """||rho(E(a*a))||; its square root bounds max_j ||a(U, lam_j S)|| from below.

    Raises:
        QTooSmall: If q <= v_degree(a*a).
        WindowTooSmall: If E(a*a) uses indices outside the window the
            periodic family was built from.
    """
    _check_q(a, q)
    b = normal_order(a.adjoint() * a).component(0)
    source = cr.base.source_window
    indices = b.u_indices()
    if source is not None and indices and not (source[0] <= min(indices) and max(indices) <= source[1]):
        raise WindowTooSmall(f"E(a*a) uses indices {min(indices)}..{max(indices)} outside {source}")
    if b.is_zero():
        return 0.0
    return op_norm(cr.rho_of(b))


def certify(a: NCPoly, eps: float, params: SearchParams, source: str | None = None,
            tol: Tolerances = DEFAULT_TOLERANCES) -> Certificate:
    """Build a certificate for a nonzero polynomial a at 0 < eps < 2.

    A zero search result still yields a certificate; ``witness_found`` is then
    false.

    Raises:
        ZeroPolynomial: If a has no terms.
        InvalidParameter: If eps is outside (0, 2).
    """
    if a.is_zero():
        raise ZeroPolynomial("the polynomial has no nonzero terms")
    if not 0.0 < eps < 2.0:
        raise InvalidParameter(f"eps = {eps} must lie in (0, 2)")

    crossed = normal_order(a.adjoint() * a)
    b = crossed.component(0)
    q = params.q if params.q is not None else crossed.degree + 1
    _check_q(a, q)
    logger.info("E(a*a) has %d terms, v-degree of a*a is %d, q = %d", len(b), crossed.degree, q)

    if b.u_indices():
        family = search_brep(b, eps, params, window=search_window(b))
    else:
        logger.info("E(a*a) is scalar; skipping search")
        family = BFamily(eps, (0, 0), [np.eye(1, dtype=complex)], tol)

    cr = covariant_rep(periodize(family))
    logger.info("Periodic family: period %d, block size %d, n = %d", cr.period, family.dim, cr.n)

    best_lam, best_norm = 1.0 + 0j, -1.0
    for lam in roots_of_unity(q):
        value = op_norm(evaluate_pair(cr, lam, a))
        if value > best_norm:
            best_lam, best_norm = lam, value

    U, V = rep_of_Ae(cr, best_lam)
    bound = math.sqrt(max(averaging_lower_bound(cr, a, q), 0.0))
    certificate = Certificate(
        eps=eps,
        poly=source if source is not None else str(a),
        n=cr.n,
        p=cr.period,
        m=family.dim,
        lam=complex(best_lam),
        U=U,
        V=V,
        achieved_norm=best_norm,
        commutator_norm=commutator_norm(U, V),
        lower_bound=bound,
        seed=params.seed,
        q=q,
        tolerances=tol.to_dict(),
    )
    logger.info("Certificate: achieved %.12g, lower bound %.12g, commutator %.12g",
                certificate.achieved_norm, certificate.lower_bound, certificate.commutator_norm)
    return certificate


# --- Verification ---


def _shifted_generators(U: np.ndarray, V: np.ndarray, indices: set[int]) -> dict[str, np.ndarray]:
    """u_n = V^n U V^-n for every requested n."""
    result = {"u_0": U}
    Vstar = adjoint(V)
    for i in indices:
        if i == 0:
            continue
        W = np.linalg.matrix_power(V if i > 0 else Vstar, abs(i))
        result[f"u_{i}"] = W @ U @ adjoint(W)
    return result


def _stored_tolerances(c: Certificate) -> Tolerances:
    known = {f.name for f in dataclasses.fields(Tolerances)}
    return Tolerances(**{k: float(v) for k, v in (c.tolerances or {}).items() if k in known})


def verify_certificate(c: Certificate, tol: float = DEFAULT_VERIFY_TOL,
                       tolerances: Tolerances | None = None) -> VerificationReport:
    """Re-check a certificate from its polynomial text and matrices only.

    Args:
        c: The certificate to check.
        tol: Absolute slack for every comparison.
        tolerances: Overrides the tolerances block stored in the certificate;
            missing entries fall back to the defaults.

    Returns:
        A report with one entry per check. Never raises.
    """
    report = VerificationReport(tol=tol)
    if tolerances is None:
        try:
            tolerances = _stored_tolerances(c)
        except (AttributeError, TypeError, ValueError) as e:
            report.add("tolerances", False, "MatrixFormatError", str(e))
            return report
    try:
        a = parse(c.poly)
        report.add("parse", True, "PolySyntaxError")
    except Exception as e:
        report.add("parse", False, "PolySyntaxError", str(e))
        return report

    try:
        U = np.asarray(c.U, dtype=complex)
        V = np.asarray(c.V, dtype=complex)
        shapes_ok = U.shape == V.shape == (c.n, c.n)
        report.add("dimensions", shapes_ok, "DimensionViolation", f"U {U.shape}, V {V.shape}, n = {c.n}")
        if not shapes_ok or not (np.all(np.isfinite(U)) and np.all(np.isfinite(V))):
            return report

        for name, M in (("unitarity_U", U), ("unitarity_V", V)):
            err = unitary_error(M)
            report.add(name, err <= tol, "UnitarityViolation", f"||M*M - I|| = {err:.3e}")

        comm = commutator_norm(U, V)
        report.add("commutator", comm <= c.eps + tol, "CommutatorViolation",
                   f"||UV - VU|| = {comm:.12g}, eps = {c.eps}")

        X = evaluate(a, {"v": V, **_shifted_generators(U, V, a.u_indices())}, dim=c.n)
        norm = op_norm(X)
        report.add("achieved_norm", abs(norm - c.achieved_norm) <= tol, "NormMismatch",
                   f"recomputed {norm:.12g}, stored {c.achieved_norm:.12g}")
        report.add("certified_floor", c.lower_bound <= norm + tol, "FloorViolation",
                   f"lower bound {c.lower_bound:.12g}, norm {norm:.12g}")

        D = adjoint(X) @ X - X @ adjoint(X)
        trace = abs(np.trace(D))
        report.add("trace_self_commutator", trace <= c.n * tol, "TraceViolation", f"|tr| = {trace:.3e}")

        delta = max(0.0, -hyponormal_defect(X))
        spread = op_norm(D)
        report.add("hyponormal_normal", spread <= (c.n - 1) * delta + tol, "HyponormalViolation",
                   f"||X*X - XX*|| = {spread:.3e}, delta = {delta:.3e}")

        tau = normalized_trace(adjoint(X) @ X).real
        faithful = tau >= norm**2 / c.n**3 - tol and (norm <= tolerances.witness_floor or tau > 0)
        report.add("faithful_trace", faithful, "TraceFaithfulnessViolation",
                   f"tau(X*X) = {tau:.12g}, ||X||^2/n^3 = {norm**2 / c.n**3:.12g}")

        report.add("witness", norm > tolerances.witness_floor, "NoWitnessFound", f"||a(U, V)|| = {norm:.12g}")
    except Exception as e:
        report.add("evaluation", False, type(e).__name__, str(e))
    return report
