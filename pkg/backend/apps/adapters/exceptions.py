class ModelError(RuntimeError):
    """A black-box model call failed."""


class ModelTimeoutError(ModelError):
    pass


class ModelTransportError(ModelError):
    """Connection-level failure (DNS, refused, reset)."""


class ModelHTTPError(ModelError):
    def __init__(self, status_code: int, body: str = ""):
        self.status_code = status_code
        self.body = body
        super().__init__(f"endpoint returned HTTP {status_code}")


class MalformedResponseError(ModelError):
    """The endpoint answered, but not in chat-completions shape."""


class MissingGroundTruthError(ValueError):
    """Accuracy measurement needs a corpus with embedded labels."""
