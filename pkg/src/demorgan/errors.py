"""Exception types shared across the toolkit."""


class DemorganError(Exception):
    """Base class for all toolkit errors."""


class DomainError(DemorganError, ValueError):
    """An argument lies outside the mathematical domain of an operation.

    Raised when an intermediate logarithm argument is non-positive, when an
    index precedes the first admissible one, or when an index is too large
    to convert to a float without rounding.
    """


class UnsupportedLevel(DomainError):
    """Iteration depth exceeds what sampled numeric evaluation supports."""


class InvalidWindow(DemorganError, ValueError):
    """A sampling window is empty or inverted."""


class InvalidDrift(DemorganError, ValueError):
    """A walk drift value violates 0 < alpha(n) < min(C, n/2)."""


class ExpressionSyntaxError(DemorganError, ValueError):
    """An expression failed to parse.

    Carries the 0-based ``position`` of the offending character and a short
    description of what was ``expected`` there.
    """

    def __init__(self, message: str, position: int, expected: str = ""):
        self.position = position
        self.expected = expected
        suffix = f" (expected {expected})" if expected else ""
        super().__init__(f"{message} at position {position}{suffix}")


class EvalError(DemorganError, ValueError):
    """Expression evaluation failed at runtime (domain violation, zero division)."""
