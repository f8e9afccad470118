"""Exception hierarchy shared by all rkhm modules."""

from __future__ import annotations


class RKHMError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(RKHMError):
    """Operands have incompatible shapes or dimensions."""


class NotHermitian(RKHMError):
    """A matrix required to be Hermitian drifts too far from its adjoint."""


class NotPSD(RKHMError):
    """A matrix required to be positive semi-definite has a genuinely
    negative eigenvalue (beyond the configured tolerance)."""


class IterationLimitExceeded(RKHMError):
    """The iterative eigensolver did not converge within its sweep budget."""


class PointKindMismatch(RKHMError):
    """A point (or batch of points) is of the wrong kind for a kernel."""


class KernelMismatch(RKHMError):
    """Two module vectors built over different kernels were combined."""


class EmptySample(RKHMError):
    """An operation received an empty (or too small) sample."""


class DegenerateGram(RKHMError):
    """All Gram eigenvalues are numerically zero; nothing to fit."""


class InvalidDimension(RKHMError):
    """A dimension argument is out of its valid range."""


class ConfigError(RKHMError):
    """A run configuration is missing fields or holds invalid values."""


class DataError(RKHMError):
    """An input data file failed to parse or validate.

    ``where`` carries a human-readable location (row / matrix index) so CLI
    diagnostics can point at the offending record.
    """

    def __init__(self, message: str, where: str | None = None):
        self.where = where
        super().__init__(message if where is None else f"{message} ({where})")
