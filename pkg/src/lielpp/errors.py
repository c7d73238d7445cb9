"""Exception types raised across the package."""


class LieLppError(Exception):
    """Base class for all library errors."""


class InvalidInput(LieLppError, ValueError):
    """Malformed arguments: bad shapes, counts, or non-finite entries."""


class DomainError(LieLppError, ArithmeticError):
    """A scalar function was evaluated outside its domain."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class NotPositiveDefinite(DomainError):
    """Matrix failed strict SPD validation; ``value`` is the smallest eigenvalue."""


class DegenerateInput(LieLppError, ArithmeticError):
    """Input is well-formed but numerically degenerate (zero pencil, isolated node)."""


class HypothesisNotMet(InvalidInput):
    """A theorem check was called on inputs violating its hypothesis."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class IngestError(InvalidInput):
    """Failure while reading a manifest or frame file."""

    def __init__(self, message, path=None, line=None):
        where = f"{path}:{line}: " if line is not None else (f"{path}: " if path else "")
        super().__init__(where + message)
        self.path = path
        self.line = line
