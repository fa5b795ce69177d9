"""Exception types shared by every module in the package."""


class FracppkError(Exception):
    """Base class for all package-specific errors."""


class DomainError(FracppkError, ValueError):
    """An argument lies outside the supported (or numerically safe) domain."""


class NonConvergence(FracppkError):
    """A series or iterative scheme failed to reach the requested accuracy."""


class CapExceeded(FracppkError):
    """A configured size, truncation, or memory cap would be exceeded."""


class GridTooCoarse(FracppkError):
    """A grid operation was asked for with too few points behind it."""


class HorizonOverflow(FracppkError):
    """A simulated path exhausted its allowed extensions before the target event."""


class DegenerateBins(FracppkError):
    """Too few usable bins remain after pooling for a goodness-of-fit test."""
