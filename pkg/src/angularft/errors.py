from __future__ import annotations

from collections.abc import Iterable


class AngularFTError(RuntimeError):
    pass


class DomainError(AngularFTError, ValueError):
    pass


class RingError(AngularFTError, ArithmeticError):
    pass


class IndexArgumentError(AngularFTError, ValueError):
    pass


class UnpairedDeltaError(DomainError):
    pass


class UnsupportedShapeError(DomainError):
    pass


class ParseError(AngularFTError):
    """Syntax error in an expression, with the byte offset of the failure."""

    def __init__(self, message: str, offset: int, expected: Iterable[str] = ()):
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        if self.expected:
            message = f"{message} at offset {offset} (expected one of: {', '.join(self.expected)})"
        else:
            message = f"{message} at offset {offset}"
        super().__init__(message)


class SemanticError(ParseError):
    pass


class QuadratureError(AngularFTError):
    """Numeric integration did not converge; carries the partial estimate."""

    def __init__(self, message: str, estimate: float, error: float):
        self.estimate = estimate
        self.error = error
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")


class VerificationFailed(AngularFTError):
    pass
