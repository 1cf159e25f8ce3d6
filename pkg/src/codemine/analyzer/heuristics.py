"""Test-code and boilerplate heuristics.

The path heuristic follows the literal rule: a directory segment equal to
"test"/"tests" or a filename (extension removed) containing "test", both
case-insensitive. This intentionally flags names like "contest.py"; the
looser rule is the documented behavior.
"""

from __future__ import annotations

from ..model import Language
from .tree import Node, SyntaxTree

JAVA_SPECIAL_METHODS = frozenset({"toString", "equals", "hashCode"})
PYTHON_SPECIAL_METHODS = frozenset({"__str__", "__repr__", "__eq__", "__hash__"})


def is_test_file(path: str) -> bool:
    segments = path.split("/")
    for d in segments[:-1]:
        if d.lower() in ("test", "tests"):
            return True
    filename = segments[-1]
    dot = filename.rfind(".")
    stem = filename[:dot] if dot > 0 else filename
    return "test" in stem.lower()


def is_boilerplate(node: Node, language: Language, tree: SyntaxTree) -> bool:
    """True for mechanically patterned functions: getters, setters,
    constructors, toString-style methods (Java) and their Python analogues."""
    if language is Language.JAVA:
        return _java_boilerplate(node, tree)
    return _python_boilerplate(node, tree)


def _stmts(body: Node) -> list[Node]:
    return [c for c in body.children
            if c.named and not c.is_comment and not c.is_missing]


def _java_boilerplate(node: Node, tree: SyntaxTree) -> bool:
    if node.type == "constructor_declaration":
        body = node.child_by_field("body")
        if body is None:
            return False
        for stmt in _stmts(body):
            if stmt.type == "explicit_constructor_invocation":
                continue
            if stmt.type == "expression_statement" and _is_field_assignment(stmt):
                continue
            return False
        return True
    if node.type != "method_declaration":
        return False
    name_node = node.child_by_field("name")
    name = tree.text(name_node) if name_node else ""
    if name in JAVA_SPECIAL_METHODS:
        return True
    params = node.child_by_field("parameters")
    body = node.child_by_field("body")
    if params is None or body is None or body.type != "block":
        return False
    n_params = sum(1 for c in params.children
                   if c.type in ("formal_parameter", "spread_parameter"))
    stmts = _stmts(body)
    if n_params == 0 and len(stmts) == 1 and stmts[0].type == "return_statement":
        value = stmts[0].named_children()
        return len(value) == 1 and _is_field_reference(value[0])
    if n_params == 1 and len(stmts) == 1:
        type_node = node.child_by_field("type")
        if type_node is not None and type_node.type == "void_type" \
                and stmts[0].type == "expression_statement" \
                and _is_field_assignment(stmts[0]):
            return True
    return False


def _is_field_reference(expr: Node) -> bool:
    if expr.type == "identifier":
        return True
    if expr.type == "field_access":
        obj = expr.child_by_field("object")
        return obj is not None and obj.type == "this"
    return False


def _is_field_assignment(stmt: Node) -> bool:
    inner = [c for c in stmt.named_children() if not c.is_comment]
    if len(inner) != 1 or inner[0].type != "assignment_expression":
        return False
    left = inner[0].child_by_field("left")
    return left is not None and _is_field_reference(left)


_PROPERTY_DECORATOR_ATTRS = frozenset({"setter", "getter"})


def _python_boilerplate(node: Node, tree: SyntaxTree) -> bool:
    defn = node
    decorators: list[Node] = []
    if node.type == "decorated_definition":
        decorators = [c for c in node.children if c.type == "decorator"]
        inner = node.child_by_field("definition")
        if inner is None or inner.type != "function_definition":
            return False
        defn = inner
    if defn.type != "function_definition":
        return False
    for dec in decorators:
        expr = next((c for c in dec.children if c.named), None)
        if expr is None:
            continue
        if expr.type == "identifier" and tree.text(expr) == "property":
            return True
        if expr.type == "attribute":
            attr = expr.child_by_field("attribute")
            if attr is not None and tree.text(attr) in _PROPERTY_DECORATOR_ATTRS:
                return True
    name_node = defn.child_by_field("name")
    name = tree.text(name_node) if name_node else ""
    if name in PYTHON_SPECIAL_METHODS:
        return True
    if name == "__init__":
        body = defn.child_by_field("body")
        if body is None or body.type != "block":
            return False
        for stmt in _stmts(body):
            if stmt.type != "expression_statement":
                return False
            inner_nodes = stmt.named_children()
            if len(inner_nodes) != 1:
                return False
            e = inner_nodes[0]
            if e.type in ("string", "concatenated_string"):
                continue  # docstring
            if e.type == "assignment":
                left = e.child_by_field("left") or (e.named_children()[0] if e.named_children() else None)
                if left is not None and left.type == "attribute":
                    continue
            return False
        return True
    return False
