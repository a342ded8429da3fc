"""Dense complex linear algebra and functional calculus.

Every function takes plain ``numpy`` arrays and returns new arrays; inputs are
never modified. Spectral functions of Hermitian matrices go through
``scipy.linalg.eigh``, spectral functions of unitaries through the complex
Schur form, which for a normal matrix is diagonal with a unitary basis even when
eigenvalues repeat.
"""

import numpy as np
import scipy.linalg

from soft_torus.config import DEFAULT_TOLERANCES, MAX_DIM, Tolerances
from soft_torus.errors import (
    BranchCut,
    InvalidParameter,
    NonFinite,
    NotContraction,
    NotHermitian,
    NotPSD,
    NotSquare,
    NotUnitary,
)


def as_square(A, name: str = "matrix") -> np.ndarray:
    """Return A as a complex square array, validating shape and entries."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise NotSquare(f"{name} must be a nonempty square matrix, got shape {A.shape}")
    if A.shape[0] > MAX_DIM:
        raise InvalidParameter(f"{name} has dimension {A.shape[0]} > {MAX_DIM}")
    if not np.all(np.isfinite(A)):
        raise NonFinite(f"{name} has NaN or infinite entries")
    return A


def adjoint(A: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(A).T


def op_norm(A) -> float:
    """Operator norm (largest singular value)."""
    A = as_square(A)
    return float(np.linalg.norm(A, 2))


def commutator_norm(A, B) -> float:
    """Operator norm of AB - BA."""
    A = as_square(A, "A")
    B = as_square(B, "B")
    return op_norm(A @ B - B @ A)


# --- Predicates ---


def hermitian_error(A: np.ndarray) -> float:
    """Absolute ||A - A*||."""
    return float(np.linalg.norm(A - adjoint(A), 2))


def unitary_error(U: np.ndarray) -> float:
    """Absolute ||U*U - I||."""
    return float(np.linalg.norm(adjoint(U) @ U - np.eye(U.shape[0]), 2))


def is_hermitian(A, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """Whether ||A - A*|| is within hermitian_tol of ||A||."""
    A = as_square(A)
    scale = max(float(np.linalg.norm(A, 2)), np.finfo(float).tiny)
    return hermitian_error(A) <= tol.hermitian_tol * scale


def is_unitary(U, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """Whether ||U*U - I|| <= unitary_tol."""
    U = as_square(U)
    return unitary_error(U) <= tol.unitary_tol


def check_hermitian(A, tol: Tolerances = DEFAULT_TOLERANCES, name: str = "matrix") -> np.ndarray:
    """Validate and return the exactly symmetrized Hermitian part of A."""
    A = as_square(A, name)
    if not is_hermitian(A, tol):
        raise NotHermitian(f"{name} is not Hermitian (||A - A*|| = {hermitian_error(A):.3e})")
    return (A + adjoint(A)) / 2


def check_unitary(U, tol: Tolerances = DEFAULT_TOLERANCES, name: str = "matrix") -> np.ndarray:
    """Validate U and return it as a complex array.

    Raises:
        NotUnitary: If ||U*U - I|| exceeds unitary_tol.
    """
    U = as_square(U, name)
    if not is_unitary(U, tol):
        raise NotUnitary(f"{name} is not unitary (||U*U - I|| = {unitary_error(U):.3e})")
    return U


# --- Hermitian spectral calculus ---


def herm_eig(H, tol: Tolerances = DEFAULT_TOLERANCES) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition H = B diag(eigenvalues) B*.

    Eigenvalues are ascending. Each basis column is scaled by a phase so that
    its first nonzero component is real and positive.

    Raises:
        NotHermitian: If H is not Hermitian within tolerance.
    """
    H = check_hermitian(H, tol)
    eigenvalues, basis = scipy.linalg.eigh(H)
    for k in range(basis.shape[1]):
        column = basis[:, k]
        magnitudes = np.abs(column)
        first = int(np.argmax(magnitudes > 1e-12 * magnitudes.max()))
        basis[:, k] = column * (np.conj(column[first]) / magnitudes[first])
    return eigenvalues, basis


def hermitian_function(H, f, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Apply a scalar function to H through its eigendecomposition."""
    eigenvalues, basis = herm_eig(H, tol)
    return basis @ (f(eigenvalues)[:, None] * adjoint(basis))


def expi(H, scale: float = 1.0, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Unitary exp(i * scale * H) of a Hermitian matrix H."""
    return hermitian_function(H, lambda x: np.exp(1j * scale * x), tol)


def psd_sqrt(P, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Positive square root of a positive semidefinite matrix.

    Eigenvalues in [-psd_clip, 0) are clamped to zero.

    Raises:
        NotPSD: If an eigenvalue lies below -psd_clip.
    """
    eigenvalues, basis = herm_eig(P, tol)
    if eigenvalues[0] < -tol.psd_clip:
        raise NotPSD(f"smallest eigenvalue {eigenvalues[0]:.3e} is below -{tol.psd_clip:g}")
    roots = np.sqrt(np.clip(eigenvalues, 0.0, None))
    S = basis @ (roots[:, None] * adjoint(basis))
    return (S + adjoint(S)) / 2


def defect_operators(T, tol: Tolerances = DEFAULT_TOLERANCES) -> tuple[np.ndarray, np.ndarray]:
    """Defect operators sqrt(I - T*T) and sqrt(I - TT*) of a contraction.

    Both are built from one singular value decomposition T = W diag(s) Y*, so
    T sqrt(I - T*T) = sqrt(I - TT*) T holds to rounding even when singular
    values sit at one.

    Raises:
        NotContraction: If ||T|| exceeds 1 + contraction_slack.
    """
    T = as_square(T, "T")
    W, s, Yh = scipy.linalg.svd(T)
    if s[0] > 1 + tol.contraction_slack:
        raise NotContraction(f"||T|| = {s[0]:.12g} exceeds 1")
    s = np.clip(s, 0.0, 1.0)
    d = np.sqrt(1.0 - s**2)
    Y = adjoint(Yh)
    defect = Y @ (d[:, None] * Yh)
    defect_star = W @ (d[:, None] * adjoint(W))
    return (defect + adjoint(defect)) / 2, (defect_star + adjoint(defect_star)) / 2


def clip_to_contraction(T, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Rescale T to norm one when it exceeds one by at most contraction_slack."""
    T = as_square(T, "T")
    norm = op_norm(T)
    if norm > 1 + tol.contraction_slack:
        raise NotContraction(f"||T|| = {norm:.12g} exceeds 1")
    return T / norm if norm > 1 else T


# --- Unitary spectral calculus ---


def _principal_phases(eigenvalues: np.ndarray, tol: Tolerances) -> np.ndarray:
    phases = np.angle(eigenvalues)
    near_cut = phases <= -np.pi + tol.branch_margin
    if np.any(near_cut):
        # -1 itself has principal phase +pi
        at_minus_one = np.abs(eigenvalues + 1) <= tol.phase_snap
        if np.any(near_cut & ~at_minus_one):
            worst = float(phases[near_cut & ~at_minus_one].min())
            raise BranchCut(f"eigenphase {worst:.12g} is within {tol.branch_margin:g} of -pi")
        phases = np.where(near_cut, np.pi, phases)
    return phases


def unitary_eig(U, tol: Tolerances = DEFAULT_TOLERANCES) -> tuple[np.ndarray, np.ndarray]:
    """Principal eigenphases in (-pi, pi] and a unitary eigenbasis of U.

    Raises:
        NotUnitary: If U is not unitary.
        BranchCut: If an eigenphase is too close to -pi.
    """
    U = check_unitary(U, tol, "U")
    T, Z = scipy.linalg.schur(U, output="complex")
    return _principal_phases(np.diag(T), tol), Z


def unitary_log(U, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Hermitian Theta with U = exp(i Theta) and spectrum in (-pi, pi]."""
    phases, Z = unitary_eig(U, tol)
    theta = Z @ (phases[:, None] * adjoint(Z))
    return (theta + adjoint(theta)) / 2


def max_phase(U, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Largest absolute principal eigenphase of U."""
    phases, _ = unitary_eig(U, tol)
    return float(np.abs(phases).max())


def unitary_power(U, t: float, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Fractional power U^t on principal eigenphases, t in [0, 1]."""
    if not 0.0 <= t <= 1.0:
        raise InvalidParameter(f"power t = {t} must lie in [0, 1]")
    phases, Z = unitary_eig(U, tol)
    if t == 0.0:
        return np.eye(Z.shape[0], dtype=complex)
    if t == 1.0:
        return np.array(U, dtype=complex)
    return Z @ (np.exp(1j * t * phases)[:, None] * adjoint(Z))


# --- Matrix-level properties ---


def hyponormal_defect(X) -> float:
    """Smallest eigenvalue of X*X - XX*; X is delta-hyponormal iff it is >= -delta."""
    X = as_square(X, "X")
    D = adjoint(X) @ X - X @ adjoint(X)
    return float(scipy.linalg.eigvalsh((D + adjoint(D)) / 2)[0])


def normalized_trace(X) -> complex:
    """tr(X) / n, the trace that gives the identity value 1.

    Args:
        X: Square matrix.

    Returns:
        The normalized trace as a complex number.
    """
    X = as_square(X, "X")
    return complex(np.trace(X) / X.shape[0])


# --- Random samples ---


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-distributed unitary from QR of a complex Gaussian matrix."""
    Z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    diagonal = np.diag(R)
    return Q * (diagonal / np.abs(diagonal))


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Hermitian part of a complex Gaussian matrix."""
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (G + adjoint(G)) / 2


def random_contraction(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Contraction with uniform singular values in [0, 1] and Haar singular vectors."""
    s = rng.uniform(0.0, 1.0, size=dim)
    return random_unitary(rng, dim) @ np.diag(s) @ random_unitary(rng, dim)
