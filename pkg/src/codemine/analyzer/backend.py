"""Parser backend registry.

The backend interface is pluggable: a backend is any callable taking source
text and returning a SyntaxTree, registered per language together with its
grammar version string ("grammar-<language>-<semver>"). The reference
backends are the in-repo error-recovering parsers.
"""

from __future__ import annotations

from typing import Callable

from ..model import Language
from .java_parser import JAVA_GRAMMAR_VERSION, parse_java
from .python_parser import PYTHON_GRAMMAR_VERSION, parse_python
from .tree import SyntaxTree

DEFAULT_MAX_BYTES = 10 * 1024 * 1024  # 10 MiB


class FileTooLargeError(Exception):
    code = "file-too-large"

    def __init__(self, size: int, cap: int):
        super().__init__(f"input is {size} bytes, cap is {cap}")
        self.size = size
        self.cap = cap


_BACKENDS: dict[Language, tuple[Callable[[str], SyntaxTree], str]] = {
    Language.JAVA: (parse_java, JAVA_GRAMMAR_VERSION),
    Language.PYTHON: (parse_python, PYTHON_GRAMMAR_VERSION),
}


def register_backend(language: Language, parse: Callable[[str], SyntaxTree],
                     version: str) -> None:
    _BACKENDS[language] = (parse, version)


def parser_version(language: Language) -> str:
    return _BACKENDS[language][1]


def parse_source(content: str, language: Language,
                 max_bytes: int | None = None) -> SyntaxTree:
    """Parse source text; always returns a tree, flagging recovery errors.

    Rejects input whose UTF-8 size exceeds the cap (default 10 MiB).
    """
    cap = DEFAULT_MAX_BYTES if max_bytes is None else max_bytes
    size = len(content.encode("utf-8"))
    if size > cap:
        raise FileTooLargeError(size, cap)
    parse, _ = _BACKENDS[language]
    return parse(content)
