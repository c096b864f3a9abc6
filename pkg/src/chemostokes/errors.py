"""Exception types shared across the package."""


class ChemoStokesError(Exception):
    """Base class for all package errors."""


class DegenerateInputError(ChemoStokesError):
    """A density field is negative beyond tolerance."""


class NotSolenoidalError(ChemoStokesError):
    """A velocity field violates the discrete divergence-free constraint."""


class NoConvergenceError(ChemoStokesError):
    """An iterative solver exhausted its budget above tolerance."""


class StepRejectedError(ChemoStokesError):
    """A time step would violate a state invariant; the driver should halve dt."""


class PotentialBlowupError(ChemoStokesError):
    """dt underflowed its floor; reported as a finding, with the last state attached."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class InsufficientDataError(ChemoStokesError):
    """Too few audit rows to evaluate a time-series claim."""


class ConfigError(ChemoStokesError):
    """Invalid run configuration (bad key, value, or constraint)."""
