"""Exception types shared across the solver lab."""


class WlsLabError(Exception):
    """Base class for all package errors."""


class UnsupportedFormatError(WlsLabError):
    """A precision name or format is not one the simulator knows."""


class InvalidShapeError(WlsLabError):
    """Matrix/vector dimensions violate an operation's requirements."""


class RankDeficientError(WlsLabError):
    """A triangular factor came out singular (zero diagonal after rounding)."""


class SingularMatrixError(WlsLabError):
    """LU pivoting hit a pivot below the configured relative threshold."""


class NoConvergenceError(WlsLabError):
    """An internal iteration (SVD) exceeded its cap."""


class ZeroDiagonalError(WlsLabError):
    """Triangular solve encountered a zero diagonal entry."""


class ZeroRowError(WlsLabError):
    """Weight construction requires every row to have a nonzero entry."""


class NonpositiveWeightError(WlsLabError):
    """Weights must be strictly positive and representable after sqrt/inverse."""


class CholeskyError(WlsLabError):
    """The projected weight matrix is not numerically positive definite."""


class NotOrthonormalError(WlsLabError):
    """A matrix expected to have orthonormal columns does not, beyond tolerance."""


class FactorizationError(WlsLabError):
    """The low-precision factorization feeding a solve failed."""


class MatrixMarketParseError(WlsLabError):
    """Matrix Market input is malformed; carries the offending line number."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class UnsupportedFieldError(MatrixMarketParseError):
    """Matrix Market field (complex/pattern) not supported."""
