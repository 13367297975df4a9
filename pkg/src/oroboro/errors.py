"""Error taxonomy shared across the package."""

from __future__ import annotations


class SpecError(Exception):
    """Base for problems with an assertion spec (text or structure)."""


class ParseError(SpecError):
    """Lexical or syntactic error in spec source.

    Positions are 1-based and point into the source text.
    """

    def __init__(self, line: int, column: int, message: str, lexeme: str = ""):
        self.line = line
        self.column = column
        self.message = message
        self.lexeme = lexeme
        where = f"line {line}, column {column}"
        detail = f" near {lexeme!r}" if lexeme else ""
        super().__init__(f"{where}: {message}{detail}")


class ConfigError(SpecError):
    """Duplicate, unresolved, or ill-formed names and references."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        self.message = message
        if line is not None:
            super().__init__(f"line {line}, column {column}: {message}")
        else:
            super().__init__(message)


class IngestError(Exception):
    """Malformed event record on the wire."""

    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        self.message = message
        super().__init__(f"line {lineno}: {message}")


class StreamOrderError(Exception):
    """Event seq did not strictly increase."""


class ProtocolError(Exception):
    """Live-wire handshake or framing violation."""
