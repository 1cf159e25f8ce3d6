"""Concrete syntax tree structures shared by both language parsers.

Positions are 0-based (line, column) with end-exclusive node spans; columns
count Unicode scalar values within the line. Node spans nest, and slicing the
source at a node's offset span yields exactly that node's text.
"""

from __future__ import annotations

from typing import Iterator, Optional

# Node types that represent comments, per language vocabulary.
COMMENT_TYPES = frozenset({"comment", "line_comment", "block_comment"})

ERROR_TYPE = "ERROR"


class Node:
    __slots__ = ("type", "named", "start_offset", "end_offset",
                 "start_point", "end_point", "children", "field",
                 "is_missing")

    def __init__(self, type: str, named: bool,
                 start_offset: int, end_offset: int,
                 start_point: tuple[int, int], end_point: tuple[int, int],
                 children: Optional[list["Node"]] = None,
                 field: Optional[str] = None,
                 is_missing: bool = False):
        self.type = type
        self.named = named
        self.start_offset = start_offset
        self.end_offset = end_offset
        self.start_point = start_point
        self.end_point = end_point
        self.children = children if children is not None else []
        self.field = field
        self.is_missing = is_missing

    @property
    def is_comment(self) -> bool:
        return self.type in COMMENT_TYPES

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def child_by_field(self, name: str) -> Optional["Node"]:
        for c in self.children:
            if c.field == name:
                return c
        return None

    def named_children(self) -> list["Node"]:
        return [c for c in self.children if c.named and not c.is_missing]

    def walk(self) -> Iterator["Node"]:
        """Preorder traversal including self."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def __repr__(self) -> str:  # debugging aid only
        return (f"Node({self.type!r}, {self.start_point}-{self.end_point}"
                f"{', missing' if self.is_missing else ''})")


class SyntaxTree:
    """Parser-backend output: the root node plus the source it was parsed from.

    ``has_errors`` is true iff the tree contains any ERROR or missing node or
    the parser recorded a recovery event that produced no node (for example a
    stray indentation change).
    """

    __slots__ = ("root", "source", "language", "_recovery_errors")

    def __init__(self, root: Node, source: str, language: str,
                 recovery_errors: int = 0):
        self.root = root
        self.source = source
        self.language = language
        self._recovery_errors = recovery_errors

    @property
    def has_errors(self) -> bool:
        if self._recovery_errors:
            return True
        return any(n.type == ERROR_TYPE or n.is_missing for n in self.root.walk())

    def text(self, node: Node) -> str:
        return self.source[node.start_offset:node.end_offset]

    def walk(self) -> Iterator[Node]:
        return self.root.walk()

    def leaves(self) -> Iterator[Node]:
        for n in self.root.walk():
            if n.is_leaf and not n.is_missing:
                yield n

    def comment_nodes(self) -> list[Node]:
        return [n for n in self.root.walk() if n.is_comment]

    def error_nodes(self) -> list[Node]:
        return [n for n in self.root.walk() if n.type == ERROR_TYPE or n.is_missing]


def insert_comments(root: Node, comments: list[Node]) -> None:
    """Attach comment nodes into the tree at their deepest containing node.

    Both parsers strip comment tokens from the parse stream and re-attach
    them afterwards; placement keeps children in source order and preserves
    span nesting.
    """
    for comment in comments:
        target = root
        while True:
            descend = None
            for child in target.children:
                if (child.start_offset <= comment.start_offset
                        and comment.end_offset <= child.end_offset
                        and not child.is_leaf):
                    descend = child
                    break
            if descend is None:
                break
            target = descend
        # insert in source order among existing children
        idx = len(target.children)
        for i, child in enumerate(target.children):
            if child.start_offset >= comment.end_offset:
                idx = i
                break
        target.children.insert(idx, comment)


def subtree_view(tree: SyntaxTree, node: Node,
                 origin_offset: int, origin_point: tuple[int, int]) -> SyntaxTree:
    """Copy ``node``'s subtree rebased so the instance starts at (0, 0).

    ``origin_offset``/``origin_point`` give the instance start in file
    coordinates (it may precede the node itself, e.g. an attached doc
    comment). The view's source is the corresponding slice of the file; the
    copied end offset of ``node`` equals the slice length, so span fidelity
    holds within the view.
    """
    o_line, o_col = origin_point

    def rebase(p: tuple[int, int]) -> tuple[int, int]:
        line, col = p
        return (line - o_line, col - o_col if line == o_line else col)

    def copy(n: Node) -> Node:
        return Node(
            n.type, n.named,
            n.start_offset - origin_offset, n.end_offset - origin_offset,
            rebase(n.start_point), rebase(n.end_point),
            [copy(c) for c in n.children], n.field, n.is_missing,
        )

    source = tree.source[origin_offset:node.end_offset]
    return SyntaxTree(copy(node), source, tree.language)
