class MonitoringError(ValueError):
    """Base class for monitor and auditor errors."""


class MissingLabelsError(MonitoringError):
    def __init__(self, t: int):
        self.t = t
        super().__init__(f"step {t} has no labels; run a labeler first")


class ReportShapeError(MonitoringError):
    """Predicted and ground-truth reports do not line up."""


class AuditDiscrepancyError(MonitoringError):
    """Incremental verdicts differ from prefix-by-prefix recomputation."""

    def __init__(self, discrepancies: list[tuple[str, int]]):
        self.discrepancies = discrepancies
        listed = ", ".join(f"{constraint_id}@{t}" for constraint_id, t in discrepancies[:10])
        super().__init__(f"{len(discrepancies)} prefix discrepancies: {listed}")
