class ConfigError(ValueError):
    """An experiment configuration that does not validate."""

    def __init__(self, message: str, errors: dict | None = None):
        self.errors = errors or {}
        super().__init__(message)
