"""Exception types raised by the library.

Every degenerate or singular evaluation fails closed with one of these
instead of returning ``nan``.
"""


class XMetrologyError(Exception):
    """Base class for all library errors."""


class NonXSupportError(XMetrologyError, ValueError):
    """A correlation matrix has weight outside the X pattern."""


class NotPositiveError(XMetrologyError, ValueError):
    """An X-state violates trace, population or coherence bounds."""


class InvalidDensityMatrixError(XMetrologyError, ValueError):
    """A general 4x4 matrix is not Hermitian, unit trace and PSD."""


class NotPSDError(InvalidDensityMatrixError):
    """Matrix square root requested for a matrix with negative eigenvalues."""


class OutOfDomainError(XMetrologyError, ValueError):
    """Parameter (or a finite-difference stencil point) outside the family interval."""


class SingularBlockError(XMetrologyError, ArithmeticError):
    """Mixed-state QFI formula is singular for this block (zero trace or zero Minkowski norm)."""


class NotPureError(XMetrologyError, ValueError):
    """Pure-state formula requested for a block that is not rank one."""


class DegenerateBlockError(XMetrologyError, ArithmeticError):
    """Square-root coefficients undefined (the block is zero)."""


class SingularSqrtError(XMetrologyError, ArithmeticError):
    """Square-root coefficient derivatives diverge (rank-deficient block)."""


class FormulaDomainError(XMetrologyError, ArithmeticError):
    """A printed closed form left its real domain (negative radicand, zero denominator)."""
