"""Exception types shared across the package."""


class SlowlightError(Exception):
    """Base class for all package errors."""


class InvalidInputError(SlowlightError, ValueError):
    """An argument is non-finite, out of range, or otherwise unusable."""


class ConfigurationError(SlowlightError, ValueError):
    """A solver or sweep configuration violates a documented precondition."""


class GridResolutionError(ConfigurationError):
    """A space/time/frequency grid is too coarse to resolve the medium."""


class NumericalFailureError(SlowlightError, RuntimeError):
    """An invariant was breached during integration.

    Carries the step (and, for propagation runs, the slab) index at which
    the breach was detected.
    """

    def __init__(self, message, step=None, slab=None):
        if step is not None:
            message = f"{message} [step {step}" + (f", slab {slab}]" if slab is not None else "]")
        super().__init__(message)
        self.step = step
        self.slab = slab


class DegenerateSteadyStateError(SlowlightError, RuntimeError):
    """The Liouvillian kernel is not one-dimensional."""

    def __init__(self, kernel_dim):
        super().__init__(
            f"steady state is not unique: Liouvillian kernel has dimension {kernel_dim}"
        )
        self.kernel_dim = kernel_dim


class FitFailureError(SlowlightError, RuntimeError):
    """A least-squares fit failed to converge; carries the best iterate."""

    def __init__(self, message, best_value=None):
        super().__init__(message)
        self.best_value = best_value


class UsageError(SlowlightError, ValueError):
    """Bad command-line or sweep-file usage (unknown kind, malformed file)."""
