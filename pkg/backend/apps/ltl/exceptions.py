class LTLError(ValueError):
    """Base class for formula errors."""


class FormulaSyntaxError(LTLError):
    """A formula string that does not follow the grammar."""

    def __init__(self, message: str, text: str, line: int, column: int, expected: frozenset[str] = frozenset()):
        self.reason = message
        self.text = text
        self.line = line
        self.column = column
        self.expected = expected
        super().__init__(f"{message} at line {line}, column {column}")

    def caret(self) -> str:
        """The offending source line with a caret under the error column."""
        lines = self.text.splitlines() or [""]
        source = lines[self.line - 1] if 0 < self.line <= len(lines) else lines[-1]
        return f"{source}\n{' ' * (self.column - 1)}^"

    def describe(self) -> str:
        message = str(self)
        if self.expected:
            message += f"; expected one of: {', '.join(sorted(self.expected))}"
        return f"{message}\n{self.caret()}"


class LassoError(LTLError):
    """Malformed ultimately periodic word."""
