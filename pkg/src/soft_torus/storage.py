"""JSON file formats for matrices, families, paths and certificates."""

import json
import logging
import os
import tempfile
from typing import Any, Sequence

import numpy as np

from soft_torus.brep import BFamily, PeriodicFamily
from soft_torus.errors import MatrixFormatError
from soft_torus.models import Certificate

logger = logging.getLogger(__name__)


# --- File helpers ---


def write_json(path: str, payload: dict) -> None:
    """Write payload atomically: temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    with tempfile.NamedTemporaryFile("w", dir=directory, suffix=".tmp", delete=False) as f:
        json.dump(payload, f, indent=2)
        f.write("\n")
        tmp_path = f.name
    try:
        os.replace(tmp_path, path)
    except OSError:
        os.unlink(tmp_path)
        raise
    logger.info("Wrote %s", path)


def read_json(path: str) -> dict:
    """Load a JSON document whose top level is an object.

    Args:
        path: File to read.

    Returns:
        The decoded object.

    Raises:
        MatrixFormatError: If the top level is not an object.
    """
    with open(path, encoding="utf-8") as f:
        payload = json.load(f)
    if not isinstance(payload, dict):
        raise MatrixFormatError(f"{path}: expected a JSON object at the top level")
    return payload


def dumps(payload: dict) -> str:
    """The same text ``write_json`` would put in a file, without the trailing newline."""
    return json.dumps(payload, indent=2)


# --- Matrices ---


def matrix_to_dict(A: np.ndarray) -> dict:
    """Matrix record {dim, re, im} with rows of plain floats.

    Args:
        A: Square matrix, real or complex.

    Returns:
        A JSON-ready dict.
    """
    A = np.asarray(A, dtype=complex)
    return {
        "dim": int(A.shape[0]),
        "re": [[float(x) for x in row] for row in A.real],
        "im": [[float(x) for x in row] for row in A.imag],
    }


def _real_grid(value: Any, dim: int, name: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != dim:
        raise MatrixFormatError(f"'{name}' must be a list of {dim} rows")
    for row in value:
        if not isinstance(row, list) or len(row) != dim:
            raise MatrixFormatError(f"every row of '{name}' must have {dim} entries")
    try:
        return np.array(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise MatrixFormatError(f"'{name}' has non-numeric entries: {e}")


def matrix_from_dict(d: Any) -> np.ndarray:
    """Read {dim, re, im}; rejects non-square or mismatched shapes.

    Raises:
        MatrixFormatError: On missing fields or bad shapes.
    """
    if not isinstance(d, dict) or not {"dim", "re", "im"} <= d.keys():
        raise MatrixFormatError("a matrix needs the fields 'dim', 're' and 'im'")
    dim = d["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise MatrixFormatError(f"'dim' must be a positive integer, got {dim!r}")
    return _real_grid(d["re"], dim, "re") + 1j * _real_grid(d["im"], dim, "im")


def _indexed_units(units: Sequence[np.ndarray], indices: Sequence[int]) -> list[dict]:
    return [{"index": int(i), "matrix": matrix_to_dict(U)} for i, U in zip(indices, units)]


def _units_from_dict(d: dict, expected: Sequence[int]) -> list[np.ndarray]:
    entries = d.get("units")
    if not isinstance(entries, list):
        raise MatrixFormatError("'units' must be a list")
    by_index = {}
    for entry in entries:
        if not isinstance(entry, dict) or "index" not in entry or "matrix" not in entry:
            raise MatrixFormatError("each unit needs 'index' and 'matrix'")
        by_index[entry["index"]] = matrix_from_dict(entry["matrix"])
    if sorted(by_index) != sorted(expected):
        raise MatrixFormatError(f"unit indices {sorted(by_index)} do not match {list(expected)}")
    return [by_index[i] for i in expected]


# --- Families ---


def family_to_dict(f: BFamily) -> dict:
    """BFamily record with its window and indexed units."""
    return {
        "kind": "bfamily",
        "eps": float(f.eps),
        "dim": f.dim,
        "window": list(f.window),
        "units": _indexed_units(f.units, f.indices),
    }


def periodic_to_dict(pf: PeriodicFamily) -> dict:
    """PeriodicFamily record; units are indexed 0 .. period - 1."""
    return {
        "kind": "periodic",
        "eps": float(pf.eps),
        "dim": pf.dim,
        "period": pf.period,
        "source_window": list(pf.source_window) if pf.source_window else None,
        "units": _indexed_units(pf.units, range(pf.period)),
    }


def path_to_dict(path: Sequence[np.ndarray], eps: float) -> dict:
    """Path record with M = number of steps."""
    return {
        "kind": "path",
        "eps": float(eps),
        "dim": int(path[0].shape[0]),
        "M": len(path) - 1,
        "units": _indexed_units(path, range(len(path))),
    }


def family_from_dict(d: dict) -> BFamily | PeriodicFamily:
    """Rebuild a BFamily or PeriodicFamily; the constructors re-check the relations."""
    kind = d.get("kind")
    try:
        eps = float(d["eps"])
        if kind == "bfamily":
            lo, hi = (int(x) for x in d["window"])
            return BFamily(eps, (lo, hi), _units_from_dict(d, range(lo, hi + 1)))
        if kind == "periodic":
            period = int(d["period"])
            source = d.get("source_window")
            return PeriodicFamily(eps, _units_from_dict(d, range(period)),
                                  source_window=tuple(source) if source else None)
    except (KeyError, TypeError, ValueError) as e:
        raise MatrixFormatError(f"malformed {kind} document: {e}")
    raise MatrixFormatError(f"unknown family kind {kind!r}")


# --- Certificates ---


def certificate_to_dict(c: Certificate) -> dict:
    """Certificate record in a fixed field order, so equal certificates give equal bytes."""
    return {
        "eps": float(c.eps),
        "poly": c.poly,
        "n": int(c.n),
        "p": int(c.p),
        "m": int(c.m),
        "lambda": {"re": float(c.lam.real), "im": float(c.lam.imag)},
        "achieved_norm": float(c.achieved_norm),
        "commutator_norm": float(c.commutator_norm),
        "lower_bound": float(c.lower_bound),
        "seed": int(c.seed),
        "q": int(c.q),
        "tool_version": c.tool_version,
        "tolerances": dict(c.tolerances),
        "U": matrix_to_dict(c.U),
        "V": matrix_to_dict(c.V),
    }


def certificate_from_dict(d: dict) -> Certificate:
    """Rebuild a certificate; optional fields fall back to neutral defaults.

    Raises:
        MatrixFormatError: If a required field is missing or malformed.
    """
    missing = {"eps", "poly", "U", "V", "achieved_norm"} - d.keys()
    if missing:
        raise MatrixFormatError(f"certificate is missing fields {sorted(missing)}")
    try:
        U = matrix_from_dict(d["U"])
        V = matrix_from_dict(d["V"])
        lam = d.get("lambda", {"re": 1.0, "im": 0.0})
        return Certificate(
            eps=float(d["eps"]),
            poly=str(d["poly"]),
            n=int(d.get("n", U.shape[0])),
            p=int(d.get("p", 0)),
            m=int(d.get("m", 0)),
            lam=complex(float(lam["re"]), float(lam["im"])),
            U=U,
            V=V,
            achieved_norm=float(d["achieved_norm"]),
            commutator_norm=float(d.get("commutator_norm", float("nan"))),
            lower_bound=float(d.get("lower_bound", 0.0)),
            seed=int(d.get("seed", 0)),
            q=int(d.get("q", 1)),
            tool_version=str(d.get("tool_version", "unknown")),
            tolerances=dict(d.get("tolerances", {})),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise MatrixFormatError(f"malformed certificate: {e}")


# --- Load/save shortcuts ---


def load_matrix(path: str) -> np.ndarray:
    """Read a matrix file."""
    return matrix_from_dict(read_json(path))


def save_matrix(path: str, A: np.ndarray) -> None:
    """Write a matrix file."""
    write_json(path, matrix_to_dict(A))


def load_family(path: str) -> BFamily | PeriodicFamily:
    """Read a BFamily or PeriodicFamily file."""
    return family_from_dict(read_json(path))


def load_certificate(path: str) -> Certificate:
    """Read a certificate file.

    Raises:
        MatrixFormatError: If the document is not a valid certificate.
        OSError: If the file cannot be read.
    """
    return certificate_from_dict(read_json(path))


def save_certificate(path: str, c: Certificate) -> None:
    """Write a certificate file atomically."""
    write_json(path, certificate_to_dict(c))
