"""Data models for the certifier."""

from dataclasses import dataclass, field

import numpy as np

from soft_torus.config import (
    DEFAULT_ASCENT_STEPS,
    DEFAULT_DIMS,
    DEFAULT_RESTARTS,
    DEFAULT_SEED,
    DEFAULT_TOLERANCES,
    DEFAULT_VERIFY_TOL,
    TOOL_VERSION,
    Tolerances,
)
from soft_torus.errors import InvalidParameter


@dataclass(frozen=True)
class SearchParams:
    """Settings for the randomized family search."""

    dims: tuple[int, ...] = DEFAULT_DIMS
    restarts: int = DEFAULT_RESTARTS
    seed: int = DEFAULT_SEED
    ascent_steps: int = DEFAULT_ASCENT_STEPS
    q: int | None = None
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if not self.dims or any(d < 1 for d in self.dims):
            raise InvalidParameter(f"dims must be a nonempty list of positive sizes, got {self.dims}")
        if self.restarts < 1:
            raise InvalidParameter("restarts must be at least 1")
        if self.ascent_steps < 0:
            raise InvalidParameter("ascent_steps must be nonnegative")
        if self.q is not None and self.q < 1:
            raise InvalidParameter("q must be positive")
        if self.workers < 1:
            raise InvalidParameter("workers must be at least 1")


@dataclass(frozen=True, eq=False)
class Certificate:
    """A finite dimensional pair (U, V) on which the polynomial does not vanish.

    V = lam * S for the block cyclic shift S; every field can be re-checked from
    U, V and the polynomial text alone.
    """

    eps: float
    poly: str
    n: int
    p: int
    m: int
    lam: complex
    U: np.ndarray
    V: np.ndarray
    achieved_norm: float
    commutator_norm: float
    lower_bound: float
    seed: int
    q: int
    tool_version: str = TOOL_VERSION
    tolerances: dict = field(default_factory=DEFAULT_TOLERANCES.to_dict)

    def witness_found(self, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
        """Whether the achieved norm clears the witness floor."""
        return self.achieved_norm > tol.witness_floor


@dataclass
class CheckResult:
    """Outcome of one verifier check."""

    name: str
    passed: bool
    violation: str
    detail: str = ""


@dataclass
class VerificationReport:
    """Per-check results of re-verifying a certificate."""

    tol: float
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def add(self, name: str, passed: bool, violation: str, detail: str = "") -> None:
        """Record one check; ``violation`` names the error kind reported on failure."""
        self.checks.append(CheckResult(name, bool(passed), violation, detail))


@dataclass
class RunConfig:
    """Command-line settings for one invocation."""

    command: str
    eps: float | None = None
    poly: str | None = None
    dims: tuple[int, ...] = DEFAULT_DIMS
    restarts: int = DEFAULT_RESTARTS
    seed: int = DEFAULT_SEED
    ascent_steps: int = DEFAULT_ASCENT_STEPS
    q: int | None = None
    workers: int = 1
    tol: float = DEFAULT_VERIFY_TOL
    dim: int = 1
    window: tuple[int, int] = (0, 0)
    input_path: str | None = None
    output_path: str | None = None
    log_level: str = "INFO"

    def search_params(self) -> SearchParams:
        """The search settings carried by this run."""
        return SearchParams(
            dims=self.dims,
            restarts=self.restarts,
            seed=self.seed,
            ascent_steps=self.ascent_steps,
            q=self.q,
            workers=self.workers,
        )
