"""Token structures shared by the Java and Python lexers."""

from __future__ import annotations

from typing import NamedTuple

# token kinds
NAME = "name"
INT = "int"
FLOAT = "float"
STRING = "string"
CHAR = "char"
OP = "op"
COMMENT = "comment"
NEWLINE = "newline"   # logical line end (Python only)
INDENT = "indent"     # Python only
DEDENT = "dedent"     # Python only
ERRTOK = "errtok"
EOF = "eof"


class Token(NamedTuple):
    kind: str
    text: str
    start_offset: int
    end_offset: int
    start_point: tuple[int, int]
    end_point: tuple[int, int]


class ParseError(Exception):
    """Internal recovery signal; never escapes parse_source."""

    def __init__(self, message: str, token: Token):
        super().__init__(f"{message} at {token.start_point}: {token.text!r}")
        self.token = token


def scan_points(text: str, start: tuple[int, int]) -> tuple[int, int]:
    """End point after consuming ``text`` from ``start``."""
    line, col = start
    nl = text.count("\n")
    if nl:
        line += nl
        col = len(text) - text.rfind("\n") - 1
    else:
        col += len(text)
    return line, col
