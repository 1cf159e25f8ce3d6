"""Tree-derived metadata: metrics, XML/sexp serializations, digests.

Hashing scheme: content_hash digests the ordered non-comment terminal token
texts, each length-prefixed to prevent boundary collisions. structural_hash
is a Merkle digest over named non-comment nodes only (leaf text never enters
it), making it a collision-resistant surrogate for sexp equality: two trees
hash equal iff their sexp strings are equal.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..model import DIGEST
from .tree import Node, SyntaxTree


@dataclass(frozen=True)
class InstanceMetrics:
    lines: int
    tokens: int
    characters: int
    has_syntax_errors: bool
    has_non_ascii: bool


def count_lines(content: str) -> int:
    """Lines spanned by content; a trailing newline does not add a line."""
    if not content:
        return 0
    return content.count("\n") + (0 if content.endswith("\n") else 1)


def iter_code_tokens(root: Node):
    """Non-comment terminal nodes, in source order. Zero-width leaves are
    synthesized containers (an empty module), not tokens."""
    for n in root.walk():
        if n.is_leaf and not n.is_missing and not n.is_comment \
                and n.end_offset > n.start_offset:
            yield n


def compute_metrics(tree: SyntaxTree, content: str) -> InstanceMetrics:
    tokens = sum(1 for _ in iter_code_tokens(tree.root))
    return InstanceMetrics(
        lines=count_lines(content),
        tokens=tokens,
        characters=len(content),
        has_syntax_errors=tree.has_errors,
        has_non_ascii=any(ord(c) > 127 for c in content),
    )


_XML_NAME_OK = frozenset(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")


def _xml_name(type_: str) -> str:
    return "".join(c if c in _XML_NAME_OK else "_" for c in type_)


def ast_to_xml(tree: SyntaxTree) -> str:
    """One XML element per named node: type name plus 0-based end-exclusive
    positions, children nested in source order, no source text. Deterministic
    byte-for-byte."""
    out: list[str] = []
    _xml_node(tree.root, out)
    return "".join(out)


def _xml_node(node: Node, out: list[str]) -> None:
    name = _xml_name(node.type)
    attrs = (f' start-line="{node.start_point[0]}" start-col="{node.start_point[1]}"'
             f' end-line="{node.end_point[0]}" end-col="{node.end_point[1]}"')
    kids = [c for c in node.children if c.named and not c.is_missing]
    if not kids:
        out.append(f"<{name}{attrs}/>")
        return
    out.append(f"<{name}{attrs}>")
    for c in kids:
        _xml_node(c, out)
    out.append(f"</{name}>")


def ast_to_sexp(tree: SyntaxTree) -> str:
    """Parenthesized preorder listing of named node types; comments excluded,
    no positions."""
    out: list[str] = []
    _sexp_node(tree.root, out)
    return "".join(out)


def _sexp_node(node: Node, out: list[str]) -> None:
    kids = [c for c in node.children
            if c.named and not c.is_missing and not c.is_comment]
    if not kids:
        out.append(f"({node.type})")
        return
    out.append(f"({node.type} ")
    for i, c in enumerate(kids):
        if i:
            out.append(" ")
        _sexp_node(c, out)
    out.append(")")


def _update_length_prefixed(h, data: bytes) -> None:
    h.update(str(len(data)).encode("ascii"))
    h.update(b":")
    h.update(data)


def content_hash(tree: SyntaxTree, content: str) -> str:
    """Digest over ordered non-comment token texts; whitespace and comments
    have no effect."""
    h = DIGEST()
    for tok in iter_code_tokens(tree.root):
        _update_length_prefixed(h, content[tok.start_offset:tok.end_offset].encode("utf-8"))
    return h.hexdigest()


def structural_hash(tree: SyntaxTree) -> str:
    return _merkle(tree.root).hex()


def _merkle(node: Node) -> bytes:
    h = DIGEST()
    _update_length_prefixed(h, node.type.encode("utf-8"))
    for c in node.children:
        if c.named and not c.is_missing and not c.is_comment:
            h.update(_merkle(c))
    return h.digest()
