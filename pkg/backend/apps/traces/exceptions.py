class TraceError(ValueError):
    """Base class for trace and report errors."""


class TraceFormatError(TraceError):
    """A trace or report file that does not follow the JSON(L) schema."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message)


class LabelingError(TraceError):
    """A labeler failed, or returned an undeclared proposition, at step ``t``."""

    def __init__(self, t: int, cause: str):
        self.t = t
        self.cause = cause
        super().__init__(f"labeling failed at step {t}: {cause}")
