"""Exception types shared across the package."""


class QmetroError(Exception):
    """Base class for all errors raised by qmetro."""


class DomainError(QmetroError, ValueError):
    """An argument lies outside the documented domain."""


class SingularModelError(QmetroError, ValueError):
    """A probability vanishes where its derivative does not."""


class InfeasibleDataError(QmetroError, ValueError):
    """Observed data has zero likelihood or zero posterior mass."""


class InconsistentDerivativeError(QmetroError, ValueError):
    """A supplied derivative does not preserve the norm of the state."""


class EmptySectorError(QmetroError, ValueError):
    """A fixed photon number sector carries no weight."""


class TruncationError(QmetroError, ValueError):
    """A truncated Fock expansion discards too much norm."""

    def __init__(self, message, discarded):
        super().__init__(message)
        self.discarded = discarded


class ResourceLimitError(QmetroError, MemoryError):
    """A dense computation would exceed the configured size cap."""


class NumericError(QmetroError, ArithmeticError):
    """A numerical routine failed to converge or certify its result."""
