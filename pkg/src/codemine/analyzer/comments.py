"""Comment-stripping transformation.

Documentation removals: Java block comments opening with ``/**``; Python
string-expression statements appearing as the first statement of a module,
class, or function body. Regular removals: every other comment node. A
comment occupying an entire line (or lines) takes the line along with it, so
token-identical code yields character-identical output across differently
commented sources.
"""

from __future__ import annotations

from ..model import Language, StripMode
from .tree import Node, SyntaxTree


class TransformOnErrorTreeError(Exception):
    """Comment span overlaps a syntax-error region; instance must be exported
    unmodified."""

    code = "transform-on-error-tree"


def strip_comments(tree: SyntaxTree, content: str, language: Language,
                   mode: StripMode) -> str:
    if mode is StripMode.NONE:
        raise ValueError("mode must not be NONE")
    targets = _removal_targets(tree, content, language, mode)
    if not targets:
        return content
    if tree.has_errors:
        error_spans = [(e.start_offset, e.end_offset) for e in tree.error_nodes()]
        for t in targets:
            for es, ee in error_spans:
                if max(t.start_offset, es) < min(t.end_offset, ee):
                    raise TransformOnErrorTreeError()
    ranges = sorted((_deletion_range(content, t) for t in targets), reverse=True)
    result = content
    for start, end in ranges:
        result = result[:start] + result[end:]
    return result


def _removal_targets(tree: SyntaxTree, content: str, language: Language,
                     mode: StripMode) -> list[Node]:
    want_regular = mode in (StripMode.REGULAR, StripMode.BOTH)
    want_doc = mode in (StripMode.DOCUMENTATION, StripMode.BOTH)
    targets: list[Node] = []
    for c in tree.comment_nodes():
        is_doc = (language is Language.JAVA and c.type == "block_comment"
                  and tree.text(c).startswith("/**"))
        if is_doc:
            if want_doc:
                targets.append(c)
        elif want_regular:
            targets.append(c)
    if want_doc and language is Language.PYTHON:
        targets.extend(_python_docstrings(tree))
    return targets


def _python_docstrings(tree: SyntaxTree) -> list[Node]:
    """Docstring expression statements; a docstring that is the sole statement
    of a function/class body is kept, as removing it would create a syntax
    error."""
    out: list[Node] = []

    def first_statement_docstring(body_children: list[Node]) -> Node | None:
        stmts = [c for c in body_children
                 if c.named and not c.is_comment and not c.is_missing]
        if not stmts:
            return None
        first = stmts[0]
        if first.type != "expression_statement":
            return None
        inner = first.named_children()
        if len(inner) == 1 and inner[0].type in ("string", "concatenated_string"):
            return first if len(stmts) > 1 else ("sole", first)
        return None

    root = tree.root
    found = first_statement_docstring(root.children)
    if found is not None:
        # module-level docstrings are removable even when alone
        out.append(found[1] if isinstance(found, tuple) else found)
    for node in root.walk():
        if node.type not in ("function_definition", "class_definition"):
            continue
        body = node.child_by_field("body")
        if body is None or body.type != "block":
            continue
        found = first_statement_docstring(body.children)
        if found is not None and not isinstance(found, tuple):
            out.append(found)
    return out


def _deletion_range(content: str, node: Node) -> tuple[int, int]:
    """The node's span, widened to whole lines when nothing else shares them."""
    start, end = node.start_offset, node.end_offset
    line_start = content.rfind("\n", 0, start) + 1
    nl = content.find("\n", end)
    line_end = len(content) if nl == -1 else nl
    if content[line_start:start].strip() == "" and content[end:line_end].strip() == "":
        return (line_start, line_end + 1 if nl != -1 else line_end)
    return (start, end)
