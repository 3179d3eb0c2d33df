"""Exception types shared across the package."""


class HopfscopeError(Exception):
    """Base class for all package-specific errors."""


class DomainError(HopfscopeError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RootFindError(HopfscopeError, RuntimeError):
    """A bracketing or iterative root search failed."""


class IntegrationError(HopfscopeError, RuntimeError):
    """Numerical integration could not be completed.

    Carries the last time/state reached before the failure when available.
    """

    def __init__(self, message, last_t=None, last_state=None):
        super().__init__(message)
        self.last_t = last_t
        self.last_state = last_state


class EventError(HopfscopeError, RuntimeError):
    """An expected event (section crossing, threshold) never occurred."""


class FlatSignalError(HopfscopeError, ValueError):
    """Spectral peak detection failed because the signal has no usable peak."""


class NotMultimodalError(HopfscopeError, RuntimeError):
    """A trajectory could not be decomposed into alternating spikes/entries."""


class FitError(HopfscopeError, RuntimeError):
    """A least-squares fit is ill-conditioned or lacks usable data."""
