"""Error types raised by the eigensolver library and mapped to CLI exit codes."""


class FeastPowerError(Exception):
    """Base class for all library failures."""

    exit_code: int = 4


class ConfigError(FeastPowerError, ValueError):
    """Invalid run configuration or config file."""

    exit_code = 2


class ParseError(FeastPowerError, ValueError):
    """Input file could not be parsed."""

    exit_code = 3

    def __init__(self, message: str, line_number: int | None = None) -> None:
        """Initialize with optional 1-based line number of the offending line."""
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class UnsupportedFormat(FeastPowerError, ValueError):
    """Matrix Market header describes a matrix kind we do not handle."""

    exit_code = 3


class InvalidOrder(FeastPowerError, ValueError):
    """Quadrature order outside the supported range."""


class DimMismatch(FeastPowerError, ValueError):
    """Operand shapes do not agree."""


class NotSymmetric(FeastPowerError, ValueError):
    """Input matrix is not symmetric within tolerance."""


class InvalidNode(FeastPowerError, ValueError):
    """Quadrature node outside the open interval (0, 1)."""


class EmptyInterval(FeastPowerError, ValueError):
    """Search interval (a, b) with a >= b."""


class CirclesDoNotCover(FeastPowerError, ValueError):
    """Two-circle radius too small to cover the search interval."""


class RankDeficient(FeastPowerError, ArithmeticError):
    """Block lost numerical rank during QR orthonormalization."""

    def __init__(
        self, message: str, column: int, iteration: int | None = None
    ) -> None:
        """Initialize with the deficient column and, when known, the outer iteration."""
        if iteration is not None:
            message = f"{message} (iteration {iteration})"
        super().__init__(message)
        self.column = column
        self.iteration = iteration


class IllConditionedGram(FeastPowerError, ArithmeticError):
    """Gram matrix of the projected pencil is not numerically positive definite."""


class GramFailure(FeastPowerError, ArithmeticError):
    """Gram matrix stayed ill-conditioned after re-orthonormalization."""


class Breakdown(FeastPowerError, ArithmeticError):
    """BiCG recurrence broke down (vanishing inner product)."""

    def __init__(self, message: str, iteration: int) -> None:
        """Initialize with the BiCG iteration where the breakdown happened."""
        super().__init__(f"{message} at iteration {iteration}")
        self.iteration = iteration


class NonFinite(FeastPowerError, ArithmeticError):
    """A computed block contains NaN or infinite entries."""


class NonProgress(FeastPowerError, RuntimeError):
    """Interval sweep stopped moving."""


class DivisionByZeroRef(FeastPowerError, ArithmeticError):
    """Reference eigenvalue is zero, relative error undefined."""

    def __init__(self, message: str, absolute_error: float) -> None:
        """Initialize with the absolute error computed instead."""
        super().__init__(message)
        self.absolute_error = absolute_error


__all__ = [
    "Breakdown",
    "CirclesDoNotCover",
    "ConfigError",
    "DimMismatch",
    "DivisionByZeroRef",
    "EmptyInterval",
    "FeastPowerError",
    "GramFailure",
    "IllConditionedGram",
    "InvalidNode",
    "InvalidOrder",
    "NonFinite",
    "NonProgress",
    "NotSymmetric",
    "ParseError",
    "RankDeficient",
    "UnsupportedFormat",
]
