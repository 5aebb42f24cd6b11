"""Exception types shared across the package."""


class StochLabError(Exception):
    """Base class for errors raised by stochlab."""


class CriticalSpecError(StochLabError):
    """The operator has no finite minimal Green function (it is critical)."""


class InfinitePotential(StochLabError):
    """A Green potential diverges."""


class HypothesisFailed(StochLabError):
    """A construction was refused because its hypothesis does not hold.

    ``gate`` names the failed check so callers can report it.
    """

    def __init__(self, message, gate=None):
        super().__init__(message)
        self.gate = gate


class StageError(StochLabError):
    """Numerical failure inside a named pipeline stage."""

    def __init__(self, stage, message):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
