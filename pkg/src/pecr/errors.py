class PecrError(Exception):
    """Base class for all library errors."""


class ParseError(PecrError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapacityError(PecrError):
    """A machine-environment list bound (mlst) was exceeded."""
