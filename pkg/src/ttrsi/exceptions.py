"""Exception types raised by ttrsi."""


class TTError(Exception):
    """Base class for all ttrsi errors."""


class ShapeError(TTError, ValueError):
    """Incompatible orders, physical dimensions or bond dimensions."""


class CapacityError(TTError, MemoryError):
    """An operation would allocate more entries than the configured cap."""


class DomainError(TTError, ValueError):
    """Non-finite values, zero norms and similar degenerate numerical input."""


class DegenerateSketchError(TTError, RuntimeError):
    """The random sketch failed to capture the range of the sketched product.

    Raised by RSI after the automatic reseeds are exhausted. Retrying with a
    different seed usually succeeds.
    """

    def __init__(self, message, iteration=None, seeds=()):
        super().__init__(message)
        self.iteration = iteration
        self.seeds = tuple(seeds)
