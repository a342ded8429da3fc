"""Randomized search for chain families on which a polynomial is large."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from soft_torus.brep import BFamily, chain_family, random_step, step_angle
from soft_torus.errors import InvalidParameter, ZeroPolynomial
from soft_torus.matcore import expi, op_norm, random_hermitian, random_unitary
from soft_torus.models import SearchParams
from soft_torus.ncpoly import NCPoly, evaluate

logger = logging.getLogger(__name__)

ASCENT_STREAM = 1
INITIAL_STEP_FRACTION = 0.5


@dataclass
class _Candidate:
    """A chain U_lo, Theta_lo, ..., Theta_{hi-1} and the norm of b on it."""

    dim: int
    restart: int
    start: np.ndarray
    thetas: list[np.ndarray]
    value: float


def _units(start: np.ndarray, thetas: list[np.ndarray]) -> list[np.ndarray]:
    units = [start]
    for theta in thetas:
        units.append(expi(theta) @ units[-1])
    return units


def _value(b: NCPoly, lo: int, units: list[np.ndarray]) -> float:
    assign = {f"u_{i}": units[i - lo] for i in b.u_indices()}
    return op_norm(evaluate(b, assign, dim=units[0].shape[0]))


def _random_candidate(b: NCPoly, eps: float, window: tuple[int, int], seed: int,
                      dim: int, restart: int) -> _Candidate:
    lo, hi = window
    rng = np.random.default_rng([seed, dim, restart])
    start = random_unitary(rng, dim)
    thetas = [random_step(rng, dim, eps) for _ in range(hi - lo)]
    value = _value(b, lo, _units(start, thetas))
    logger.debug("dim %d restart %d: %.12g", dim, restart, value)
    return _Candidate(dim, restart, start, thetas, value)


def _ascend(b: NCPoly, eps: float, window: tuple[int, int], best: _Candidate,
            steps: int, seed: int) -> _Candidate:
    """Coordinate-wise random ascent, one Theta_j (or U_lo) per step.

    A perturbed Theta_j that leaves the ball of radius 2 arcsin(eps/2) is
    scaled back onto its boundary, so every accepted chain keeps steps <= eps.
    """
    lo, _ = window
    radius = step_angle(eps)
    rng = np.random.default_rng([seed, best.dim, best.restart, ASCENT_STREAM])
    start, thetas, value = best.start, list(best.thetas), best.value
    coordinates = len(thetas) + 1
    accepted = 0
    for k in range(steps):
        scale = radius * INITIAL_STEP_FRACTION * (1.0 - k / steps)
        G = random_hermitian(rng, best.dim)
        G *= scale / max(op_norm(G), np.finfo(float).tiny)
        j = k % coordinates
        if j == len(thetas):
            new_start, new_thetas = expi(G) @ start, thetas
        else:
            theta = thetas[j] + G
            norm = op_norm(theta)
            if norm > radius:
                theta *= radius / norm
            new_start, new_thetas = start, [*thetas[:j], theta, *thetas[j + 1:]]
        new_value = _value(b, lo, _units(new_start, new_thetas))
        if new_value > value:
            start, thetas, value = new_start, new_thetas, new_value
            accepted += 1
    logger.debug("dim %d restart %d ascent: %d/%d moves accepted, %.12g -> %.12g",
                 best.dim, best.restart, accepted, steps, best.value, value)
    return _Candidate(best.dim, best.restart, start, thetas, value)


def search_window(b: NCPoly) -> tuple[int, int]:
    """Symmetric window [-N, N] covering every u_n index of b."""
    N = max((abs(i) for i in b.u_indices()), default=0)
    return (-N, N)


def search_brep(b: NCPoly, eps: float, params: SearchParams,
                window: tuple[int, int] | None = None) -> BFamily:
    """Family maximizing ||b|| over seeded random starts, each followed by local ascent.

    Starts run over ``params.dims`` x ``params.restarts``; restart r at size d
    draws from ``default_rng([seed, d, r])`` and ascends on its own stream, so a
    start's final value depends neither on ``params.workers`` nor on how many
    other restarts run. Adding restarts never lowers the result. Ties keep the
    earliest start.

    Raises:
        ZeroPolynomial: If b has no terms.
    """
    if b.is_zero():
        raise ZeroPolynomial("cannot search for a family on the zero polynomial")
    if not b.uses_only_u():
        raise InvalidParameter("search needs a polynomial in the u_n letters")
    window = window or search_window(b)
    lo, hi = window
    if b.u_indices() and not (lo <= min(b.u_indices()) and max(b.u_indices()) <= hi):
        raise InvalidParameter(f"window [{lo}, {hi}] does not cover the indices of b")

    if not b.u_indices():
        logger.info("Polynomial is scalar; using the one-dimensional identity family")
        return BFamily(eps, window, [np.eye(1, dtype=complex)] * (hi - lo + 1))

    tasks = [(dim, r) for dim in params.dims for r in range(params.restarts)]
    logger.info("Search: %d starts over dims %s on window [%d, %d]", len(tasks), list(params.dims), lo, hi)

    def run(task):
        candidate = _random_candidate(b, eps, window, params.seed, *task)
        if params.ascent_steps:
            candidate = _ascend(b, eps, window, candidate, params.ascent_steps, params.seed)
        return candidate

    if params.workers > 1:
        with ThreadPoolExecutor(max_workers=params.workers) as pool:
            candidates = list(pool.map(run, tasks))
    else:
        candidates = [run(task) for task in tasks]

    best = candidates[0]
    for candidate in candidates[1:]:
        if candidate.value > best.value:
            best = candidate
    logger.info("Best candidate: dim %d restart %d value %.12g", best.dim, best.restart, best.value)
    return chain_family(eps, window, best.start, best.thetas)
