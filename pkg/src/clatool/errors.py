"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class ClaToolError(Exception):
    """Base class for every error raised by clatool."""


class InputError(ClaToolError, ValueError):
    """Malformed user input: bad values, interactions, arities or files."""


class ModelSyntaxError(InputError):
    """Raised when a model file cannot be parsed."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ArrayFormatError(InputError):
    """Raised when an array file does not match its model."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class OutcomeFormatError(InputError):
    """Raised for unknown tokens or a length mismatch in an outcome file."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class CapExceededError(ClaToolError):
    """An enumeration or universe would grow past its configured cap."""


class BudgetExceededError(CapExceededError):
    """The exhaustive minimal-size search ran out of subset budget."""


class UnsatisfiableModelError(ClaToolError):
    """The model admits no valid test."""


class GenerationError(ClaToolError):
    """Generation reached an internally inconsistent state."""


class PreconditionError(ClaToolError):
    """Reduction input is not a covering array of the required strength."""
