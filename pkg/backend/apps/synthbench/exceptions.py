class SynthbenchError(ValueError):
    """Base class for benchmark generation and evaluation errors."""


class KnobError(SynthbenchError):
    """A generator knob outside its supported range."""

    def __init__(self, knob: str, value, reason: str):
        self.knob = knob
        self.value = value
        super().__init__(f"Invalid {knob}={value!r}: {reason}")


class UnknownPatternError(SynthbenchError, KeyError):
    """A formula that matches none of the known specification patterns."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown pattern"
