"""Exception types raised by the soft torus library."""


class SoftTorusError(Exception):
    """Base class for all library errors."""


class InvalidParameter(SoftTorusError):
    """Raised when a scalar argument is outside its allowed range."""


# --- matrices ---


class NonFinite(SoftTorusError):
    """Raised when a matrix contains NaN or infinite entries."""


class NotSquare(SoftTorusError):
    """Raised when a matrix is not square."""


class NotHermitian(SoftTorusError):
    """Raised when a matrix differs from its adjoint beyond tolerance."""


class NotUnitary(SoftTorusError):
    """Raised when U*U differs from the identity beyond tolerance."""


class BranchCut(SoftTorusError):
    """Raised when an eigenphase is too close to -pi for the principal logarithm."""


class NotPSD(SoftTorusError):
    """Raised when a Hermitian matrix has an eigenvalue below the clipping floor."""


class NotContraction(SoftTorusError):
    """Raised when a matrix has operator norm above one."""


class DimensionMismatch(SoftTorusError):
    """Raised when matrices that must share a size do not."""


class MatrixFormatError(SoftTorusError):
    """Raised when a matrix or family document has the wrong shape or fields."""


# --- polynomials ---


class PolySyntaxError(SoftTorusError):
    """Raised when polynomial text does not follow the grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class IndexOverflow(SoftTorusError):
    """Raised when a generator index leaves the allowed range."""


class UnassignedSymbol(SoftTorusError):
    """Raised when evaluation meets a generator with no matrix assigned."""


class ZeroPolynomial(SoftTorusError):
    """Raised when a polynomial that must be nonzero has no terms."""


# --- representations ---


class FamilyError(SoftTorusError):
    """Raised when a family of unitaries violates its defining relations."""


class RankTooLarge(SoftTorusError):
    """Raised when a compression rank exceeds the family dimension."""


class WindowTooSmall(SoftTorusError):
    """Raised when a representation does not cover a polynomial's indices."""


class QTooSmall(SoftTorusError):
    """Raised when the averaging order does not exceed the v-degree."""


class NotUnitModulus(SoftTorusError):
    """Raised when a twisting scalar is not on the unit circle."""
