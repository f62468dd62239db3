class PredictionError(RuntimeError):
    """Risk estimation could not complete."""


class SamplingBudgetError(PredictionError):
    def __init__(self, calls: int, budget: int):
        self.calls = calls
        self.budget = budget
        super().__init__(f"estimate needs {calls} model calls, budget is {budget}")


class UnknownPatternError(PredictionError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown pattern"
