class InterventionError(RuntimeError):
    """Base class for guard-loop errors."""


class PolicyError(InterventionError, ValueError):
    """An intervention policy that cannot be run."""

    def __init__(self, message: str, errors: dict | None = None):
        self.errors = errors or {}
        super().__init__(message)


class GuardStepError(InterventionError):
    """A guarded step was aborted; the session is left at its pre-step state."""

    def __init__(self, t: int, cause: str):
        self.t = t
        self.cause = cause
        # the run up to the failed step, set by run_guarded
        self.partial = None
        super().__init__(f"guarded step {t} aborted: {cause}")
