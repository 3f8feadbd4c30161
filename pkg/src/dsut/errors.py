"""Exception types raised by the library."""
from __future__ import annotations

from dataclasses import dataclass


class DsutError(Exception):
    """Base class for all library errors."""


class ParseError(DsutError):
    """Syntax error in a fact file, with a 1-based line/column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class ShapeError(ParseError):
    """A fact parsed but its arguments do not match the fact's shape."""


@dataclass(frozen=True)
class BuildError:
    """One problem found while assembling a model from facts."""

    code: str  # DuplicateComponent, DanglingEndpoint, CrossLayerConnection, ...
    message: str
    line: int | None = None
    column: int | None = None

    def __str__(self) -> str:
        where = f"{self.line}:{self.column}: " if self.line is not None else ""
        return f"{where}{self.code}: {self.message}"


class ModelBuildError(DsutError):
    """Raised by ``build_model``; carries every error found, not just the first."""

    def __init__(self, errors: list[BuildError]):
        super().__init__("; ".join(str(e) for e in errors))
        self.errors = list(errors)


class UnknownComponent(DsutError, KeyError):
    def __str__(self) -> str:
        return DsutError.__str__(self)


class NoProjection(DsutError):
    pass


class SameEndpoints(DsutError, ValueError):
    pass
