"""Tolerances and default settings shared across the package."""

from dataclasses import asdict, dataclass

from soft_torus import __version__

TOOL_VERSION = __version__

INDEX_CAP = 10**6
MAX_NESTING = 200
MAX_DIM = 1024

DEFAULT_SEED = 0
DEFAULT_DIMS = (1, 2)
DEFAULT_RESTARTS = 8
DEFAULT_ASCENT_STEPS = 200
DEFAULT_VERIFY_TOL = 1e-8


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances used by every module.

    hermitian_tol is relative to the operator norm; the others are absolute.
    """

    hermitian_tol: float = 1e-12
    unitary_tol: float = 1e-10
    branch_margin: float = 1e-8
    phase_snap: float = 1e-12
    psd_clip: float = 1e-10
    contraction_slack: float = 1e-10
    step_slack: float = 1e-9
    coeff_cutoff: float = 1e-14
    witness_floor: float = 1e-12

    def to_dict(self) -> dict:
        """Plain dict for the certificate's tolerances block."""
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()
