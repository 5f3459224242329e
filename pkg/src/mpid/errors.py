"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a formula is valid."""


class DimensionError(ValueError):
    """Matrix or index dimensions are inconsistent."""


class DegenerateError(ValueError):
    """A quantity needed as a divisor or scale is exactly zero."""


class ConvergenceError(RuntimeError):
    """An iterative kernel ran out of iterations."""


class UnderflowError(ArithmeticError):
    """A pivot norm vanished in the working precision.

    ``partial`` holds the factorization completed before the failing step
    (a :class:`mpid.mgsqr.PivotedQR` of rank ``step``) and ``step`` is the
    0-based index of the step that failed.
    """

    def __init__(self, message, partial=None, step=None):
        super().__init__(message)
        self.partial = partial
        self.step = step


class ParseError(ValueError):
    """Malformed matrix file. ``line`` or ``offset`` locate the problem."""

    def __init__(self, message, line=None, offset=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"offset {offset}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.offset = offset


class RaggedRowsError(ParseError, DimensionError):
    """CSV rows of unequal length."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""
