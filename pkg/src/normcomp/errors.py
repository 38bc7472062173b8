"""Exception and warning types raised by normcomp."""


class NormCompError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(NormCompError, ValueError):
    """Matrix dimensions or a block partition do not fit together."""


class NotHermitianError(NormCompError, ValueError):
    """A matrix that must be Hermitian is not, within tolerance."""

    def __init__(self, message: str, asymmetry: float):
        super().__init__(message)
        self.asymmetry = asymmetry


class NotPositiveSemidefiniteError(NormCompError, ValueError):
    """A matrix that must be PSD has a clearly negative eigenvalue."""

    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class SingularMatrixError(NormCompError, ValueError):
    """An inverse or negative power was requested of a singular matrix."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class DomainError(NormCompError, ValueError):
    """A scalar parameter (exponent, weight, count) is out of range."""


class ConvergenceError(NormCompError, ArithmeticError):
    """An iterative method did not converge.

    ``residual`` is the last measured residual of the method.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class ConditioningError(NormCompError, ArithmeticError):
    """A computed solution fails its a posteriori residual check."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class NumericalBreakdownError(NormCompError, ArithmeticError):
    """An intermediate quantity that must be PSD came out clearly indefinite."""


class MatrixFormatError(NormCompError, ValueError):
    """A serialized matrix or block matrix is malformed."""


class RegularizationWarning(UserWarning):
    """A singular-input geometric mean may be inaccurate.

    Emitted when the two regularized evaluations used for extrapolation
    differ by more than the stated relative tolerance.
    """
