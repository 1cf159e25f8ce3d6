"""Function extraction from parsed files.

Java emits method and constructor declarations; a documentation comment
immediately preceding the declaration (whitespace-only gap, no blank line) is
attached to the instance span. Python emits every function definition,
including methods and nested functions, with decorators included in the span.
Lambdas are not named definitions and are not extracted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..model import Language
from .tree import Node, SyntaxTree

_JAVA_FUNCTION_TYPES = frozenset({"method_declaration", "constructor_declaration"})


@dataclass(frozen=True)
class FunctionSpan:
    name: Optional[str]
    start_line: int
    end_line: int
    content: str
    # the declaration subtree plus the instance origin in file coordinates
    node: Node
    instance_node: Node  # node whose span defines the instance (decorators in)
    origin_offset: int
    origin_point: tuple[int, int]


def extract_functions(tree: SyntaxTree, content: str,
                      language: Language) -> list[FunctionSpan]:
    if language is Language.JAVA:
        return _extract_java(tree, content)
    return _extract_python(tree, content)


def _end_line(node: Node) -> int:
    line, col = node.end_point
    return line if col > 0 else max(line - 1, 0)


def _span(tree: SyntaxTree, name: Optional[str], decl: Node, instance: Node,
          origin_offset: int, origin_point: tuple[int, int]) -> FunctionSpan:
    return FunctionSpan(
        name=name,
        start_line=origin_point[0],
        end_line=_end_line(decl),
        content=tree.source[origin_offset:decl.end_offset],
        node=decl,
        instance_node=instance,
        origin_offset=origin_offset,
        origin_point=origin_point,
    )


def _extract_java(tree: SyntaxTree, content: str) -> list[FunctionSpan]:
    doc_comments = [
        c for c in tree.comment_nodes()
        if c.type == "block_comment" and tree.text(c).startswith("/**")
    ]
    doc_comments.sort(key=lambda c: c.start_offset)
    out = []
    for node in tree.walk():
        if node.type not in _JAVA_FUNCTION_TYPES:
            continue
        name_node = node.child_by_field("name")
        name = tree.text(name_node) if name_node else None
        origin_offset, origin_point = node.start_offset, node.start_point
        doc = _attached_doc(doc_comments, node, content)
        if doc is not None:
            origin_offset, origin_point = doc.start_offset, doc.start_point
        out.append(_span(tree, name, node, node, origin_offset, origin_point))
    out.sort(key=lambda s: s.origin_offset)
    return out


def _attached_doc(doc_comments: list[Node], decl: Node, content: str) -> Optional[Node]:
    best = None
    for c in doc_comments:
        if c.end_offset <= decl.start_offset:
            best = c
        else:
            break
    if best is None:
        return None
    gap = content[best.end_offset:decl.start_offset]
    if gap.strip() != "" or gap.count("\n") > 1:
        return None
    return best


def _extract_python(tree: SyntaxTree, content: str) -> list[FunctionSpan]:
    out = []

    def visit(node: Node, parent: Optional[Node]) -> None:
        if node.type == "function_definition":
            name_node = node.child_by_field("name")
            name = tree.text(name_node) if name_node else None
            instance = node
            if parent is not None and parent.type == "decorated_definition":
                instance = parent
            out.append(_span(tree, name, node, instance,
                             instance.start_offset, instance.start_point))
        for c in node.children:
            visit(c, node)

    visit(tree.root, None)
    out.sort(key=lambda s: s.origin_offset)
    return out
