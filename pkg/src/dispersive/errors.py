"""Exception types raised across the package."""

from __future__ import annotations


class DispersiveError(Exception):
    """Base class for all package errors."""


class BasisMismatchError(DispersiveError, ValueError):
    pass


class ComplexOperatorError(DispersiveError, ValueError):
    pass


class ZeroDetuningError(DispersiveError, ValueError):
    pass


class ModelKindError(DispersiveError, ValueError):
    pass


class NumericalError(DispersiveError, ArithmeticError):
    """A numerical routine failed (non-convergence, non-finite input, truncation cap)."""


class NonConvergenceError(NumericalError):
    def __init__(self, message: str, max_offdiag: float = float("nan")):
        super().__init__(message)
        self.max_offdiag = max_offdiag


class TruncationError(NumericalError):
    pass


class ClassificationError(DispersiveError):
    """Exact eigenstates could not be matched reliably to bare states."""


class ConfigError(DispersiveError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
