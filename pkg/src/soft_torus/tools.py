"""Building-block commands exposed on the command line.

Each tool takes already-loaded inputs and returns a JSON-ready payload (or
text for ``order``); the CLI handles files.
"""

import numpy as np

from soft_torus.brep import BFamily, halmos_dilate, path_to_identity, periodize, random_brep
from soft_torus.errors import InvalidParameter
from soft_torus.ncpoly import format_crossed, normal_order
from soft_torus.poly_parser import parse
from soft_torus.storage import family_to_dict, matrix_to_dict, path_to_dict, periodic_to_dict


def interp(W: np.ndarray, eps: float) -> dict:
    """Spectral path from W to the identity with steps <= eps."""
    return path_to_dict(path_to_identity(W, eps), eps)


def dilate(T: np.ndarray) -> dict:
    """Unitary dilation of a contraction, T in the top-left corner."""
    return matrix_to_dict(halmos_dilate(T))


def order(poly_text: str) -> str:
    """Crossed-product normal form sum_k b_k v^k of a polynomial, as text."""
    return format_crossed(normal_order(parse(poly_text)))


def rand(eps: float, dim: int, window: tuple[int, int], seed: int) -> dict:
    """Seeded random chain family."""
    return family_to_dict(random_brep(eps, dim, window, seed))


def close_periodically(family) -> dict:
    """Periodic extension of a family on a symmetric window."""
    if not isinstance(family, BFamily):
        raise InvalidParameter("periodize needs a bfamily document")
    return periodic_to_dict(periodize(family))
