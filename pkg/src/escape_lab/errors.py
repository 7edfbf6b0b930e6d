"""Exception types raised across escape_lab."""


class EscapeLabError(Exception):
    """Base class for all library errors."""


class DomainError(EscapeLabError, ValueError):
    """An argument lies outside the domain of an operation."""


class DimensionError(EscapeLabError, ValueError):
    """Vectors or matrices of incompatible lengths were combined."""


class PartitionError(EscapeLabError, ValueError):
    """A partition violates one of its structural invariants."""


class RefinementDegenerateError(PartitionError):
    """Refinement produced a cell shorter than the minimum cell length."""


class MarkovViolationError(EscapeLabError, ValueError):
    """A partition is not Markov for the map it was paired with."""

    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell


class ConvergenceError(EscapeLabError, RuntimeError):
    """Neither power iteration nor the dense fallback met the tolerance."""

    def __init__(self, message, residual=float("nan"), hole_index=None):
        super().__init__(message)
        self.residual = residual
        self.hole_index = hole_index


class InsufficientDataError(EscapeLabError, ValueError):
    """Too few usable survival counts to fit an escape rate."""
