"""Exception types shared across the package."""


class NCInvError(Exception):
    """Base class for errors raised by ncinv."""


class DimensionMismatch(NCInvError, ValueError):
    pass


class NotInSubspace(NCInvError, ValueError):
    pass


class NotALieElement(NCInvError, ValueError):
    pass


class SingularMatrixError(NCInvError, ValueError):
    pass


class ContextMismatch(NCInvError, ValueError):
    """Operands belong to different algebras or contexts."""


class CapExceeded(NCInvError):
    """A configured size or degree cap was exceeded."""

    def __init__(self, cap: str, limit: int, message: str | None = None):
        self.cap = cap
        self.limit = limit
        super().__init__(message or f"{cap} cap of {limit} exceeded")


class ValidationError(NCInvError, ValueError):
    """Malformed or inadmissible user input."""


class OracleMismatch(NCInvError, AssertionError):
    """Two independent computations of the same quantity disagree."""
