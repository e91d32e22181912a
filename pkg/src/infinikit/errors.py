"""Error types shared across the package.

Every error carries a short machine-readable ``code`` used by the CLI as
its one-line reason prefix, e.g. ``error[infinite-input]: ...``.
"""

from __future__ import annotations


class InfinikitError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "error"


class DivisionByZeroError(InfinikitError):
    code = "division-by-zero"


class InfiniteInputError(InfinikitError):
    """Standard part requested for an infinite element."""

    code = "infinite-input"


class PreconditionError(InfinikitError):
    code = "precondition"


class NoLimitError(InfinikitError):
    """The sequence's rate class diverges or oscillates."""

    code = "no-limit"


class DegenerateInputError(InfinikitError):
    code = "degenerate-input"


class SamplerDomainError(InfinikitError):
    """A natural extension hit a point outside the host function's domain."""

    code = "domain"


class CertificationFailureError(InfinikitError):
    """Bounded sampling could not certify any filter outcome."""

    code = "certification-failure"


class EmptyInputError(InfinikitError):
    code = "empty-input"


class DimensionMismatchError(InfinikitError):
    code = "dimension-mismatch"


class NonOrthogonalError(InfinikitError):
    code = "non-orthogonal"


class EigenSolverError(InfinikitError):
    """QL iteration failed to converge within the iteration cap."""

    code = "eigensolver-failure"


class NoTailError(InfinikitError):
    """Operation needs a symbolic tail but only a finite truncation is known."""

    code = "no-tail"


class NotCompactError(InfinikitError):
    code = "not-compact"


class InsufficientDataError(InfinikitError):
    """A partial sum was requested beyond the truncation and no tail exists."""

    code = "insufficient-data"


class ModeMismatchError(InfinikitError):
    """Expression uses a symbol that is invalid for the evaluation mode."""

    code = "mode-mismatch"


class ExprSyntaxError(InfinikitError):
    """Parse failure, annotated with position and the expected-token set."""

    code = "syntax"

    def __init__(self, message: str, line: int, column: int, expected: tuple[str, ...] = ()):
        super().__init__(message)
        self.line = line
        self.column = column
        self.expected = expected

    def __str__(self) -> str:
        base = super().__str__()
        loc = f"line {self.line}, column {self.column}"
        if self.expected:
            return f"{base} at {loc} (expected {', '.join(self.expected)})"
        return f"{base} at {loc}"
