"""Error-recovering Java parser producing tree-sitter-style concrete trees.

Grammar version: grammar-java-1.0.0. Node vocabulary follows the conventional
Java grammar names (program, class_declaration, method_declaration,
field_declaration, ...). The top-level rule additionally accepts bare class
members and statements so that extracted function instances re-parse cleanly
as snippets; unparseable regions are collected into ERROR nodes.

Known simplifications, reflected in the grammar version: no switch
expressions, method references, text blocks, records or modules; such input
parses via error recovery.
"""

from __future__ import annotations

from .lexutil import (CHAR, COMMENT, EOF, ERRTOK, FLOAT, INT, NAME, OP,
                      STRING, ParseError, Token, scan_points)
from .tree import Node, SyntaxTree, insert_comments

JAVA_GRAMMAR_VERSION = "grammar-java-1.0.0"

KEYWORDS = frozenset("""
abstract assert boolean break byte case catch char class const continue
default do double else enum extends final finally float for goto if
implements import instanceof int interface long native new package private
protected public return short static strictfp super switch synchronized this
throw throws transient try void volatile while
""".split())

MODIFIER_WORDS = frozenset("""
public protected private abstract static final strictfp default synchronized
native transient volatile
""".split())

PRIMITIVE_INTEGRAL = frozenset({"byte", "short", "int", "long", "char"})
PRIMITIVE_FLOAT = frozenset({"float", "double"})

# '>' is always lexed singly so generics close cleanly; the expression
# parser merges adjacent '>' tokens back into shift operators.
_OPS3 = ("<<=", ">>=", "...", "&&=", "||=")
_OPS2 = ("==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=",
         "/=", "%=", "&=", "|=", "^=", "<<", "->", "::")
_OPS1 = "+-*/%&|^~!<>()[]{};,.=:?@"

_ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=",
                         "^=", "<<=", ">>=", ">>>="})


def tokenize(src: str) -> tuple[list[Token], int]:
    tokens: list[Token] = []
    errors = 0
    n = len(src)
    pos = 0
    line = 0
    col = 0

    def emit(kind: str, start: int, end: int) -> None:
        nonlocal line, col
        text = src[start:end]
        sp = (line, col)
        ep = scan_points(text, sp)
        tokens.append(Token(kind, text, start, end, sp, ep))
        line, col = ep

    while pos < n:
        ch = src[pos]
        if ch == "\n":
            pos += 1
            line += 1
            col = 0
            continue
        if ch in " \t\r\f":
            pos += 1
            col += 1
            continue
        if src.startswith("//", pos):
            end = src.find("\n", pos)
            end = n if end == -1 else end
            emit(COMMENT, pos, end)
            pos = end
            continue
        if src.startswith("/*", pos):
            end = src.find("*/", pos + 2)
            if end == -1:
                emit(COMMENT, pos, n)
                errors += 1
                pos = n
                continue
            emit(COMMENT, pos, end + 2)
            pos = end + 2
            continue
        if ch == '"':
            end, ok = _scan_quoted(src, pos, '"')
            emit(STRING if ok else ERRTOK, pos, end)
            if not ok:
                errors += 1
            pos = end
            continue
        if ch == "'":
            end, ok = _scan_quoted(src, pos, "'")
            emit(CHAR if ok else ERRTOK, pos, end)
            if not ok:
                errors += 1
            pos = end
            continue
        if ch.isdigit() or (ch == "." and pos + 1 < n and src[pos + 1].isdigit()):
            end, kind = _scan_number(src, pos)
            emit(kind, pos, end)
            pos = end
            continue
        if ch.isalpha() or ch in "_$" or ord(ch) > 127:
            end = pos + 1
            while end < n and (src[end].isalnum() or src[end] in "_$"
                               or ord(src[end]) > 127):
                end += 1
            emit(NAME, pos, end)
            pos = end
            continue
        op = None
        for cand in _OPS3:
            if src.startswith(cand, pos):
                op = cand
                break
        if op is None:
            for cand in _OPS2:
                if src.startswith(cand, pos):
                    op = cand
                    break
        if op is None and ch in _OPS1:
            op = ch
        if op is not None:
            emit(OP, pos, pos + len(op))
            pos += len(op)
            continue
        emit(ERRTOK, pos, pos + 1)
        errors += 1
        pos += 1

    tokens.append(Token(EOF, "", pos, pos, (line, col), (line, col)))
    return tokens, errors


def _scan_quoted(src: str, pos: int, quote: str) -> tuple[int, bool]:
    n = len(src)
    i = pos + 1
    while i < n:
        c = src[i]
        if c == "\\":
            i += 2
            continue
        if c == quote:
            return i + 1, True
        if c == "\n":
            return i, False
        i += 1
    return n, False


def _scan_number(src: str, pos: int) -> tuple[int, str]:
    n = len(src)
    i = pos
    if src.startswith(("0x", "0X"), pos):
        i += 2
        while i < n and (src[i] in "0123456789abcdefABCDEF_"):
            i += 1
        if i < n and src[i] in "lL":
            i += 1
        return i, "hex"
    if src.startswith(("0b", "0B"), pos):
        i += 2
        while i < n and src[i] in "01_":
            i += 1
        if i < n and src[i] in "lL":
            i += 1
        return i, "bin"
    kind = INT
    while i < n and (src[i].isdigit() or src[i] == "_"):
        i += 1
    if i < n and src[i] == "." and (i + 1 >= n or src[i + 1] != "."):
        kind = FLOAT
        i += 1
        while i < n and (src[i].isdigit() or src[i] == "_"):
            i += 1
    if i < n and src[i] in "eE" and i + 1 < n and (
            src[i + 1].isdigit() or src[i + 1] in "+-"):
        kind = FLOAT
        i += 2
        while i < n and src[i].isdigit():
            i += 1
    if i < n and src[i] in "fFdD":
        kind = FLOAT
        i += 1
    elif i < n and src[i] in "lL":
        i += 1
    # octal: leading zero with more digits stays "int"; node name chosen later
    return i, kind


_LITERAL_NODE = {
    INT: "decimal_integer_literal",
    "hex": "hex_integer_literal",
    "bin": "binary_integer_literal",
    FLOAT: "decimal_floating_point_literal",
    STRING: "string_literal",
    CHAR: "character_literal",
}


def _leaf_for(tok: Token) -> Node:
    if tok.kind == NAME:
        if tok.text == "true":
            return _named_leaf("true", tok)
        if tok.text == "false":
            return _named_leaf("false", tok)
        if tok.text == "null":
            return _named_leaf("null_literal", tok)
        if tok.text == "this":
            return _named_leaf("this", tok)
        if tok.text in KEYWORDS:
            return _anon_leaf(tok)
        return _named_leaf("identifier", tok)
    node_type = _LITERAL_NODE.get(tok.kind)
    if node_type:
        return _named_leaf(node_type, tok)
    return _anon_leaf(tok)


def _named_leaf(type_: str, tok: Token, field: str | None = None) -> Node:
    return Node(type_, True, tok.start_offset, tok.end_offset,
                tok.start_point, tok.end_point, field=field)


def _anon_leaf(tok: Token, field: str | None = None) -> Node:
    return Node(tok.text or tok.kind, False, tok.start_offset, tok.end_offset,
                tok.start_point, tok.end_point, field=field)


def _mk(type_: str, children: list[Node], field: str | None = None) -> Node:
    assert children, f"cannot make empty {type_}"
    return Node(type_, True, children[0].start_offset, children[-1].end_offset,
                children[0].start_point, children[-1].end_point,
                children=children, field=field)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = [t for t in tokens if t.kind != COMMENT]
        self.comments = [t for t in tokens if t.kind == COMMENT]
        self.i = 0
        self.recovery_errors = 0

    def peek(self, k: int = 0) -> Token:
        j = min(self.i + k, len(self.toks) - 1)
        return self.toks[j]

    def advance(self) -> Token:
        tok = self.toks[self.i]
        if tok.kind != EOF:
            self.i += 1
        return tok

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind in (OP, NAME) and t.text == text

    def at_kind(self, kind: str) -> bool:
        return self.peek().kind == kind

    def take(self, text: str) -> Node:
        if not self.at(text):
            raise ParseError(f"expected {text!r}", self.peek())
        return _anon_leaf(self.advance())

    def take_name(self, field: str | None = None) -> Node:
        t = self.peek()
        if t.kind != NAME or t.text in KEYWORDS:
            raise ParseError("expected identifier", t)
        return _named_leaf("identifier", self.advance(), field=field)

    # --- program -----------------------------------------------------------
    def parse_program(self, source: str) -> Node:
        items: list[Node] = []
        while not self.at_kind(EOF):
            items.append(self.toplevel_with_recovery())
        end_point = scan_points(source, (0, 0))
        return Node("program", True, 0, len(source), (0, 0), end_point,
                    children=items)

    def toplevel_with_recovery(self) -> Node:
        start = self.i
        try:
            return self.toplevel_item()
        except ParseError:
            self.i = start
            return self.error_region()

    def error_region(self) -> Node:
        """Consume a balanced stretch up to ';' or a closing boundary."""
        children: list[Node] = []
        depth = 0
        while True:
            t = self.peek()
            if t.kind == EOF:
                break
            if t.kind == OP and t.text in "([{":
                depth += 1
            elif t.kind == OP and t.text in ")]}":
                if depth == 0:
                    if not children:
                        children.append(_leaf_for(self.advance()))
                    break
                depth -= 1
            self.advance()
            children.append(_leaf_for(t))
            if t.kind == OP and t.text == ";" and depth == 0:
                break
            if t.kind == OP and t.text == "}" and depth == 0:
                break
        if not children:
            t = self.peek()
            self.recovery_errors += 1
            return Node("ERROR", True, t.start_offset, t.start_offset,
                        t.start_point, t.start_point, is_missing=True)
        return _mk("ERROR", children)

    def toplevel_item(self) -> Node:
        if self.at("package"):
            return self.package_declaration()
        if self.at("import"):
            return self.import_declaration()
        return self.class_member_or_statement(toplevel=True)

    def package_declaration(self) -> Node:
        kw = self.take("package")
        name = self.scoped_name()
        semi = self.take(";")
        return _mk("package_declaration", [kw, name, semi])

    def import_declaration(self) -> Node:
        children = [self.take("import")]
        if self.at("static"):
            children.append(_anon_leaf(self.advance()))
        children.append(self.scoped_name())
        if self.at("."):
            children.append(_anon_leaf(self.advance()))
            children.append(_mk("asterisk", [self.take("*")]))
        children.append(self.take(";"))
        return _mk("import_declaration", children)

    def scoped_name(self) -> Node:
        node = self.take_name()
        while self.at(".") and self.peek(1).kind == NAME \
                and self.peek(1).text not in KEYWORDS:
            dot = _anon_leaf(self.advance())
            name = self.take_name(field="name")
            node.field = "scope"
            node = _mk("scoped_identifier", [node, dot, name])
        return node

    # --- declarations -------------------------------------------------------
    def modifiers(self) -> Node | None:
        parts: list[Node] = []
        while True:
            t = self.peek()
            if t.kind == NAME and t.text in MODIFIER_WORDS:
                parts.append(_anon_leaf(self.advance()))
            elif self.at("@") and self.peek(1).kind == NAME \
                    and self.peek(1).text != "interface":
                parts.append(self.annotation())
            else:
                break
        return _mk("modifiers", parts) if parts else None

    def annotation(self) -> Node:
        at = self.take("@")
        name = self.scoped_name()
        name.field = "name"
        if self.at("("):
            args = self.argument_list()
            args.type = "annotation_argument_list"
            return _mk("annotation", [at, name, args])
        return _mk("marker_annotation", [at, name])

    def class_declaration(self, mods: Node | None) -> Node:
        children = [mods] if mods else []
        children.append(self.take("class"))
        children.append(self.take_name(field="name"))
        if self.at("<"):
            children.append(self.type_parameters())
        if self.at("extends"):
            kw = _anon_leaf(self.advance())
            children.append(_mk("superclass", [kw, self.type_ref()]))
        if self.at("implements"):
            kw = _anon_leaf(self.advance())
            types = [self.type_ref()]
            while self.at(","):
                types.append(_anon_leaf(self.advance()))
                types.append(self.type_ref())
            children.append(_mk("super_interfaces", [kw, _mk("type_list", types)]))
        body = self.class_body()
        body.field = "body"
        children.append(body)
        return _mk("class_declaration", children)

    def interface_declaration(self, mods: Node | None) -> Node:
        children = [mods] if mods else []
        children.append(self.take("interface"))
        children.append(self.take_name(field="name"))
        if self.at("<"):
            children.append(self.type_parameters())
        if self.at("extends"):
            kw = _anon_leaf(self.advance())
            types = [self.type_ref()]
            while self.at(","):
                types.append(_anon_leaf(self.advance()))
                types.append(self.type_ref())
            children.append(_mk("extends_interfaces", [kw, _mk("type_list", types)]))
        body = self.class_body()
        body.type = "interface_body"
        body.field = "body"
        children.append(body)
        return _mk("interface_declaration", children)

    def enum_declaration(self, mods: Node | None) -> Node:
        children = [mods] if mods else []
        children.append(self.take("enum"))
        children.append(self.take_name(field="name"))
        body: list[Node] = [self.take("{")]
        while not self.at("}") and not self.at_kind(EOF) and not self.at(";"):
            const = [self.take_name(field="name")]
            if self.at("("):
                const.append(self.argument_list())
            body.append(_mk("enum_constant", const))
            if self.at(","):
                body.append(_anon_leaf(self.advance()))
        if self.at(";"):
            ebody: list[Node] = [_anon_leaf(self.advance())]
            while not self.at("}") and not self.at_kind(EOF):
                ebody.append(self.member_with_recovery())
            body.append(_mk("enum_body_declarations", ebody))
        body.append(self.take("}"))
        children.append(_mk("enum_body", body, field="body"))
        return _mk("enum_declaration", children)

    def type_parameters(self) -> Node:
        children = [self.take("<")]
        children.append(_mk("type_parameter", [self.take_name()]))
        while self.at(","):
            children.append(_anon_leaf(self.advance()))
            children.append(_mk("type_parameter", [self.take_name()]))
        children.append(self.take(">"))
        return _mk("type_parameters", children)

    def class_body(self) -> Node:
        children = [self.take("{")]
        while not self.at("}") and not self.at_kind(EOF):
            children.append(self.member_with_recovery())
        children.append(self.take("}"))
        return _mk("class_body", children)

    def member_with_recovery(self) -> Node:
        start = self.i
        try:
            return self.class_member_or_statement(toplevel=False)
        except ParseError:
            self.i = start
            return self.error_region()

    def class_member_or_statement(self, toplevel: bool) -> Node:
        mods = self.modifiers()
        if self.at("class"):
            return self.class_declaration(mods)
        if self.at("interface"):
            return self.interface_declaration(mods)
        if self.at("enum"):
            return self.enum_declaration(mods)
        if self.at("{") and mods is None:
            block = self.block()
            return block
        if self.at("static") and self.peek(1).text == "{":
            kw = _anon_leaf(self.advance())
            return _mk("static_initializer", [kw, self.block()])
        # constructor: Name ( params ) { ... } with no return type
        t = self.peek()
        if t.kind == NAME and t.text not in KEYWORDS \
                and self.peek(1).text == "(" and self._constructor_ahead():
            return self.constructor_declaration(mods)
        if mods is not None or self._looks_like_member():
            return self.field_or_method(mods)
        if toplevel:
            return self.statement()
        return self.field_or_method(mods)

    def _constructor_ahead(self) -> bool:
        """Name '(' ... ')' followed by '{' or 'throws' means a constructor,
        as opposed to a call statement."""
        k = 2
        depth = 1
        while k < 200 and depth > 0:
            t = self.peek(k)
            if t.kind == EOF:
                return False
            if t.text == "(":
                depth += 1
            elif t.text == ")":
                depth -= 1
            k += 1
        nxt = self.peek(k)
        return nxt.text in ("{", "throws")

    def _looks_like_member(self) -> bool:
        """Heuristic: does a type (then a name) start here?"""
        t = self.peek()
        if t.kind != NAME:
            return False
        if t.text in PRIMITIVE_INTEGRAL or t.text in PRIMITIVE_FLOAT \
                or t.text in ("boolean", "void"):
            return True
        if t.text in KEYWORDS:
            return False
        # Name Name ... | Name < ... | Name [ ] Name | Name . Name Name
        k = 1
        depth = 0
        while k < 40:
            nxt = self.peek(k)
            if nxt.kind == EOF:
                return False
            if nxt.text == "<":
                depth += 1
            elif nxt.text == ">":
                depth -= 1
                if depth < 0:
                    return False
            elif depth == 0:
                if nxt.text == "." and self.peek(k + 1).kind == NAME:
                    k += 1
                elif nxt.text == "[" and self.peek(k + 1).text == "]":
                    k += 1
                elif nxt.kind == NAME and nxt.text not in KEYWORDS:
                    return self.peek(k + 1).text in ("(", "=", ";", ",", "[")
                else:
                    return False
            k += 1
        return False

    def constructor_declaration(self, mods: Node | None) -> Node:
        children = [mods] if mods else []
        children.append(self.take_name(field="name"))
        children.append(self.formal_parameters())
        if self.at("throws"):
            children.append(self.throws_clause())
        body = self.constructor_body()
        body.field = "body"
        children.append(body)
        return _mk("constructor_declaration", children)

    def constructor_body(self) -> Node:
        children = [self.take("{")]
        if (self.at("super") or self.at("this")) and self.peek(1).text == "(":
            kw = _anon_leaf(self.advance())
            args = self.argument_list()
            semi = self.take(";")
            children.append(_mk("explicit_constructor_invocation",
                                [kw, args, semi]))
        while not self.at("}") and not self.at_kind(EOF):
            children.append(self.statement_with_recovery())
        children.append(self.take("}"))
        return _mk("constructor_body", children)

    def field_or_method(self, mods: Node | None) -> Node:
        prefix = [mods] if mods else []
        if self.at("<"):
            prefix.append(self.type_parameters())
        type_node = self.type_ref()
        type_node.field = "type"
        name = self.take_name(field="name")
        if self.at("("):
            children = prefix + [type_node, name, self.formal_parameters()]
            if self.at("throws"):
                children.append(self.throws_clause())
            if self.at(";"):
                children.append(_anon_leaf(self.advance()))
            else:
                body = self.block()
                body.field = "body"
                children.append(body)
            return _mk("method_declaration", children)
        declarators = [self.variable_declarator(name)]
        while self.at(","):
            declarators.append(_anon_leaf(self.advance()))
            declarators.append(self.variable_declarator(self.take_name(field="name")))
        semi = self.take(";")
        return _mk("field_declaration", prefix + [type_node] + declarators + [semi])

    def variable_declarator(self, name: Node) -> Node:
        children = [name]
        while self.at("[") and self.peek(1).text == "]":
            children.append(_mk("dimensions",
                                [_anon_leaf(self.advance()), _anon_leaf(self.advance())]))
        if self.at("="):
            children.append(_anon_leaf(self.advance()))
            value = self.variable_initializer()
            value.field = "value"
            children.append(value)
        return _mk("variable_declarator", children)

    def variable_initializer(self) -> Node:
        if self.at("{"):
            return self.array_initializer()
        return self.expression()

    def array_initializer(self) -> Node:
        children = [self.take("{")]
        while not self.at("}") and not self.at_kind(EOF):
            children.append(self.variable_initializer())
            if self.at(","):
                children.append(_anon_leaf(self.advance()))
        children.append(self.take("}"))
        return _mk("array_initializer", children)

    def throws_clause(self) -> Node:
        children = [self.take("throws"), self.type_ref()]
        while self.at(","):
            children.append(_anon_leaf(self.advance()))
            children.append(self.type_ref())
        return _mk("throws", children)

    def formal_parameters(self) -> Node:
        children = [self.take("(")]
        while not self.at(")") and not self.at_kind(EOF):
            children.append(self.formal_parameter())
            if self.at(","):
                children.append(_anon_leaf(self.advance()))
            elif not self.at(")"):
                raise ParseError("expected ',' or ')' in parameters", self.peek())
        children.append(self.take(")"))
        return _mk("formal_parameters", children, field="parameters")

    def formal_parameter(self) -> Node:
        mods = self.modifiers()
        parts = [mods] if mods else []
        type_node = self.type_ref()
        type_node.field = "type"
        parts.append(type_node)
        if self.at("..."):
            parts.append(_anon_leaf(self.advance()))
            parts.append(self.take_name(field="name"))
            return _mk("spread_parameter", parts)
        parts.append(self.take_name(field="name"))
        while self.at("[") and self.peek(1).text == "]":
            parts.append(_mk("dimensions",
                             [_anon_leaf(self.advance()), _anon_leaf(self.advance())]))
        return _mk("formal_parameter", parts)

    # --- types ---------------------------------------------------------------
    def type_ref(self) -> Node:
        t = self.peek()
        if t.kind != NAME:
            raise ParseError("expected type", t)
        if t.text == "void":
            node = _named_leaf("void_type", self.advance())
        elif t.text in PRIMITIVE_INTEGRAL:
            node = _mk("integral_type", [_anon_leaf(self.advance())])
        elif t.text in PRIMITIVE_FLOAT:
            node = _mk("floating_point_type", [_anon_leaf(self.advance())])
        elif t.text == "boolean":
            node = _mk("boolean_type", [_anon_leaf(self.advance())])
        elif t.text in KEYWORDS:
            raise ParseError("expected type", t)
        else:
            node = _named_leaf("type_identifier", self.advance())
            while self.at(".") and self.peek(1).kind == NAME \
                    and self.peek(1).text not in KEYWORDS:
                dot = _anon_leaf(self.advance())
                name = _named_leaf("type_identifier", self.advance(), field="name")
                node.field = "scope"
                node = _mk("scoped_type_identifier", [node, dot, name])
            if self.at("<"):
                node = _mk("generic_type", [node, self.type_arguments()])
        while self.at("[") and self.peek(1).text == "]":
            dims = _mk("dimensions",
                       [_anon_leaf(self.advance()), _anon_leaf(self.advance())])
            node = _mk("array_type", [node, dims])
        return node

    def type_arguments(self) -> Node:
        children = [self.take("<")]
        if not self.at(">"):
            children.append(self.type_argument())
            while self.at(","):
                children.append(_anon_leaf(self.advance()))
                children.append(self.type_argument())
        children.append(self.take(">"))
        return _mk("type_arguments", children)

    def type_argument(self) -> Node:
        if self.at("?"):
            parts = [_anon_leaf(self.advance())]
            if self.at("extends") or self.at("super"):
                parts.append(_anon_leaf(self.advance()))
                parts.append(self.type_ref())
            return _mk("wildcard", parts)
        return self.type_ref()

    # --- statements ------------------------------------------------------------
    def statement_with_recovery(self) -> Node:
        start = self.i
        try:
            return self.statement()
        except ParseError:
            self.i = start
            return self.error_region()

    def statement(self) -> Node:
        t = self.peek()
        if self.at("{"):
            return self.block()
        if t.kind == NAME:
            kw = t.text
            if kw == "if":
                return self.if_statement()
            if kw == "while":
                return self.while_statement()
            if kw == "do":
                return self.do_statement()
            if kw == "for":
                return self.for_statement()
            if kw == "return":
                return self.return_statement()
            if kw == "throw":
                children = [_anon_leaf(self.advance()), self.expression(), self.take(";")]
                return _mk("throw_statement", children)
            if kw == "try":
                return self.try_statement()
            if kw == "break":
                children = [_anon_leaf(self.advance())]
                if self.peek().kind == NAME and not self.at(";"):
                    children.append(self.take_name())
                children.append(self.take(";"))
                return _mk("break_statement", children)
            if kw == "continue":
                children = [_anon_leaf(self.advance())]
                if self.peek().kind == NAME and not self.at(";"):
                    children.append(self.take_name())
                children.append(self.take(";"))
                return _mk("continue_statement", children)
            if kw == "synchronized":
                children = [_anon_leaf(self.advance()), self.paren_expression(), self.block()]
                return _mk("synchronized_statement", children)
            if kw == "assert":
                children = [_anon_leaf(self.advance()), self.expression()]
                if self.at(":"):
                    children.append(_anon_leaf(self.advance()))
                    children.append(self.expression())
                children.append(self.take(";"))
                return _mk("assert_statement", children)
        if self.at(";"):
            # lone semicolon is an empty statement
            return _mk("expression_statement", [_anon_leaf(self.advance())])
        if self._starts_local_declaration():
            return self.local_variable_declaration()
        expr = self.expression()
        semi = self.take(";")
        return _mk("expression_statement", [expr, semi])

    def _starts_local_declaration(self) -> bool:
        t = self.peek()
        if t.kind != NAME:
            return False
        if t.text in PRIMITIVE_INTEGRAL or t.text in PRIMITIVE_FLOAT \
                or t.text in ("boolean",):
            return True
        if t.text == "final":
            return True
        if t.text in KEYWORDS:
            return False
        return self._looks_like_member()

    def local_variable_declaration(self) -> Node:
        mods = self.modifiers()
        parts = [mods] if mods else []
        type_node = self.type_ref()
        type_node.field = "type"
        parts.append(type_node)
        parts.append(self.variable_declarator(self.take_name(field="name")))
        while self.at(","):
            parts.append(_anon_leaf(self.advance()))
            parts.append(self.variable_declarator(self.take_name(field="name")))
        parts.append(self.take(";"))
        return _mk("local_variable_declaration", parts)

    def block(self) -> Node:
        children = [self.take("{")]
        while not self.at("}") and not self.at_kind(EOF):
            children.append(self.statement_with_recovery())
        children.append(self.take("}"))
        return _mk("block", children)

    def paren_expression(self) -> Node:
        children = [self.take("("), self.expression(), self.take(")")]
        return _mk("parenthesized_expression", children)

    def if_statement(self) -> Node:
        children = [self.take("if")]
        cond = self.paren_expression()
        cond.field = "condition"
        children.append(cond)
        cons = self.statement()
        cons.field = "consequence"
        children.append(cons)
        if self.at("else"):
            children.append(_anon_leaf(self.advance()))
            alt = self.statement()
            alt.field = "alternative"
            children.append(alt)
        return _mk("if_statement", children)

    def while_statement(self) -> Node:
        children = [self.take("while")]
        cond = self.paren_expression()
        cond.field = "condition"
        children.append(cond)
        children.append(self.statement())
        return _mk("while_statement", children)

    def do_statement(self) -> Node:
        children = [self.take("do"), self.statement(), self.take("while"),
                    self.paren_expression(), self.take(";")]
        return _mk("do_statement", children)

    def for_statement(self) -> Node:
        for_kw = self.take("for")
        open_p = self.take("(")
        # enhanced for: [final] Type name : expr
        save = self.i
        try:
            mods = self.modifiers()
            type_node = self.type_ref()
            name = self.take_name(field="name")
            colon = self.take(":")
            value = self.expression()
            close_p = self.take(")")
            body = self.statement()
            type_node.field = "type"
            value.field = "value"
            parts = [for_kw, open_p]
            if mods:
                parts.append(mods)
            parts += [type_node, name, colon, value, close_p, body]
            return _mk("enhanced_for_statement", parts)
        except ParseError:
            self.i = save
        children = [for_kw, open_p]
        if not self.at(";"):
            if self._starts_local_declaration():
                children.append(self.local_variable_declaration())  # eats ';'
            else:
                children.append(self.expression())
                children.append(self.take(";"))
        else:
            children.append(_anon_leaf(self.advance()))
        if not self.at(";"):
            cond = self.expression()
            cond.field = "condition"
            children.append(cond)
        children.append(self.take(";"))
        if not self.at(")"):
            children.append(self.expression())
            while self.at(","):
                children.append(_anon_leaf(self.advance()))
                children.append(self.expression())
        children.append(self.take(")"))
        children.append(self.statement())
        return _mk("for_statement", children)

    def return_statement(self) -> Node:
        children = [self.take("return")]
        if not self.at(";"):
            children.append(self.expression())
        children.append(self.take(";"))
        return _mk("return_statement", children)

    def try_statement(self) -> Node:
        children = [self.take("try")]
        if self.at("("):
            res = [self.take("(")]
            while not self.at(")") and not self.at_kind(EOF):
                mods = self.modifiers()
                parts = [mods] if mods else []
                type_node = self.type_ref()
                type_node.field = "type"
                parts.append(type_node)
                parts.append(self.take_name(field="name"))
                parts.append(self.take("="))
                parts.append(self.expression())
                res.append(_mk("resource", parts))
                if self.at(";"):
                    res.append(_anon_leaf(self.advance()))
            res.append(self.take(")"))
            children.append(_mk("resource_specification", res))
        children.append(self.block())
        while self.at("catch"):
            cc = [_anon_leaf(self.advance()), self.take("(")]
            types = [self.type_ref()]
            while self.at("|"):
                types.append(_anon_leaf(self.advance()))
                types.append(self.type_ref())
            param = _mk("catch_formal_parameter",
                        [_mk("catch_type", types), self.take_name(field="name")])
            cc.append(param)
            cc.append(self.take(")"))
            cc.append(self.block())
            children.append(_mk("catch_clause", cc))
        if self.at("finally"):
            fc = [_anon_leaf(self.advance()), self.block()]
            children.append(_mk("finally_clause", fc))
        return _mk("try_statement", children)

    # --- expressions --------------------------------------------------------------
    def expression(self) -> Node:
        left = self.ternary()
        t = self.peek()
        if t.kind == OP and (t.text in _ASSIGN_OPS or self._at_shift_assign()):
            left.field = "left"
            op = self._merged_shift_assign() if self._at_shift_assign() \
                else _anon_leaf(self.advance())
            right = self.expression()
            right.field = "right"
            return _mk("assignment_expression", [left, op, right])
        return left

    def _at_shift_assign(self) -> bool:
        # '>' '>' '=' or '>' '>' '>' '=' lexed as singles plus '>='
        return self.at(">") and self.peek(1).text in (">", ">=") and \
            self._adjacent(0, 1)

    def _merged_shift_assign(self) -> Node:
        parts = [self.advance()]
        while self.peek().kind == OP and self.peek().text in (">", ">=", "=") \
                and self._adjacent_tok(parts[-1], self.peek()):
            parts.append(self.advance())
            if parts[-1].text in (">=", "="):
                break
        start, end = parts[0], parts[-1]
        return Node("".join(p.text for p in parts), False,
                    start.start_offset, end.end_offset,
                    start.start_point, end.end_point)

    def _adjacent(self, a: int, b: int) -> bool:
        return self.peek(a).end_offset == self.peek(b).start_offset

    @staticmethod
    def _adjacent_tok(a: Token, b: Token) -> bool:
        return a.end_offset == b.start_offset

    def ternary(self) -> Node:
        cond = self.logical_or()
        if self.at("?"):
            q = _anon_leaf(self.advance())
            cons = self.expression()
            colon = self.take(":")
            alt = self.expression()
            cond.field = "condition"
            return _mk("ternary_expression", [cond, q, cons, colon, alt])
        return cond

    def _binary_level(self, sub, ops: tuple[str, ...]) -> Node:
        left = sub()
        while True:
            t = self.peek()
            if t.kind == OP and t.text in ops:
                op = _anon_leaf(self.advance())
            elif ">" in ops and self.at(">") and self.peek(1).text == ">" \
                    and self._adjacent(0, 1) and ops == ("<<", ">>", ">>>"):
                op = self._merged_shift()
            else:
                return left
            right = sub()
            left = _mk("binary_expression", [left, op, right])

    def _merged_shift(self) -> Node:
        first = self.advance()
        parts = [first]
        while self.at(">") and self._adjacent_tok(parts[-1], self.peek()) \
                and len(parts) < 3:
            parts.append(self.advance())
        return Node("".join(p.text for p in parts), False,
                    parts[0].start_offset, parts[-1].end_offset,
                    parts[0].start_point, parts[-1].end_point)

    def logical_or(self) -> Node:
        return self._binary_level(self.logical_and, ("||",))

    def logical_and(self) -> Node:
        return self._binary_level(self.bit_or, ("&&",))

    def bit_or(self) -> Node:
        return self._binary_level(self.bit_xor, ("|",))

    def bit_xor(self) -> Node:
        return self._binary_level(self.bit_and, ("^",))

    def bit_and(self) -> Node:
        return self._binary_level(self.equality, ("&",))

    def equality(self) -> Node:
        return self._binary_level(self.relational, ("==", "!="))

    def relational(self) -> Node:
        left = self.shift_expr()
        while True:
            t = self.peek()
            if t.kind == OP and t.text in ("<", ">", "<=", ">="):
                # avoid eating '>' that closes a merged shift; relational is
                # only reached outside type contexts so single '>' is fine
                op = _anon_leaf(self.advance())
                left = _mk("binary_expression", [left, op, self.shift_expr()])
            elif self.at("instanceof"):
                kw = _anon_leaf(self.advance())
                left = _mk("instanceof_expression", [left, kw, self.type_ref()])
            else:
                return left

    def shift_expr(self) -> Node:
        left = self.additive()
        while True:
            if self.at("<<"):
                op = _anon_leaf(self.advance())
            elif self.at(">") and self.peek(1).text == ">" and self._adjacent(0, 1):
                op = self._merged_shift()
            else:
                return left
            left = _mk("binary_expression", [left, op, self.additive()])

    def additive(self) -> Node:
        return self._binary_level(self.multiplicative, ("+", "-"))

    def multiplicative(self) -> Node:
        return self._binary_level(self.unary, ("*", "/", "%"))

    def unary(self) -> Node:
        t = self.peek()
        if t.kind == OP and t.text in ("!", "~", "+", "-"):
            op = _anon_leaf(self.advance())
            return _mk("unary_expression", [op, self.unary()])
        if t.kind == OP and t.text in ("++", "--"):
            op = _anon_leaf(self.advance())
            return _mk("update_expression", [op, self.unary()])
        if self.at("(") and self._looks_like_cast():
            open_p = self.take("(")
            type_node = self.type_ref()
            type_node.field = "type"
            close_p = self.take(")")
            value = self.unary()
            value.field = "value"
            return _mk("cast_expression", [open_p, type_node, close_p, value])
        return self.postfix()

    def _looks_like_cast(self) -> bool:
        k = 1
        t = self.peek(k)
        if t.kind != NAME:
            return False
        if t.text in PRIMITIVE_INTEGRAL or t.text in PRIMITIVE_FLOAT \
                or t.text in ("boolean",):
            return True
        if t.text in KEYWORDS:
            return False
        depth = 0
        while k < 30:
            t = self.peek(k)
            if t.kind == EOF:
                return False
            if t.text == "<":
                depth += 1
            elif t.text == ">":
                depth -= 1
            elif t.text == ")" and depth == 0:
                nxt = self.peek(k + 1)
                return (nxt.kind in (NAME, STRING, CHAR, INT, FLOAT, "hex", "bin")
                        and nxt.text not in KEYWORDS - {"this", "new", "super"}) \
                    or nxt.text == "("
            elif t.text not in (".", "[", "]", ",", "?", "extends", "super") \
                    and t.kind != NAME:
                return False
            k += 1
        return False

    def postfix(self) -> Node:
        node = self.primary()
        while True:
            if self.at(".") and self.peek(1).kind == NAME \
                    and self.peek(1).text not in KEYWORDS - {"this", "new", "class"}:
                dot = _anon_leaf(self.advance())
                nxt = self.peek()
                if nxt.text == "new":  # inner-class creation, rare; recover
                    raise ParseError("qualified new unsupported", nxt)
                if nxt.text == "this":
                    name = _named_leaf("this", self.advance())
                elif nxt.text == "class":
                    name = _anon_leaf(self.advance())
                else:
                    name = _named_leaf("identifier", self.advance())
                if self.at("("):
                    node.field = "object"
                    name.field = "name"
                    args = self.argument_list()
                    args.field = "arguments"
                    node = _mk("method_invocation", [node, dot, name, args])
                else:
                    node.field = "object"
                    name.field = "field"
                    node = _mk("field_access", [node, dot, name])
            elif self.at("["):
                open_b = _anon_leaf(self.advance())
                node.field = "array"
                index = self.expression()
                index.field = "index"
                node = _mk("array_access", [node, open_b, index, self.take("]")])
            elif self.at("++") or self.at("--"):
                op = _anon_leaf(self.advance())
                node = _mk("update_expression", [node, op])
            else:
                return node

    def argument_list(self) -> Node:
        children = [self.take("(")]
        while not self.at(")") and not self.at_kind(EOF):
            children.append(self.expression())
            if self.at(","):
                children.append(_anon_leaf(self.advance()))
            elif not self.at(")"):
                raise ParseError("expected ',' or ')' in arguments", self.peek())
        children.append(self.take(")"))
        return _mk("argument_list", children)

    def primary(self) -> Node:
        t = self.peek()
        if t.kind in _LITERAL_NODE:
            return _named_leaf(_LITERAL_NODE[t.kind], self.advance())
        if t.kind == NAME:
            text = t.text
            if text == "true":
                return _named_leaf("true", self.advance())
            if text == "false":
                return _named_leaf("false", self.advance())
            if text == "null":
                return _named_leaf("null_literal", self.advance())
            if text == "this":
                node = _named_leaf("this", self.advance())
                if self.at("("):
                    raise ParseError("constructor call outside constructor", t)
                return node
            if text == "super":
                node = _named_leaf("super", self.advance())
                return node
            if text == "new":
                return self.object_creation()
            if text in PRIMITIVE_INTEGRAL or text in PRIMITIVE_FLOAT \
                    or text in ("boolean", "void"):
                # e.g. int.class; parse the type as primary for field access
                return self.type_ref()
            if text in KEYWORDS:
                raise ParseError("unexpected keyword in expression", t)
            name = _named_leaf("identifier", self.advance())
            if self.at("("):
                name.field = "name"
                args = self.argument_list()
                args.field = "arguments"
                return _mk("method_invocation", [name, args])
            if self.at("->"):
                arrow = _anon_leaf(self.advance())
                body = self.lambda_body()
                return _mk("lambda_expression", [name, arrow, body])
            return name
        if self.at("("):
            # lambda with parenthesized params?
            save = self.i
            try:
                params = self.formal_parameters_or_inferred()
                arrow = self.take("->")
                body = self.lambda_body()
                return _mk("lambda_expression", [params, arrow, body])
            except ParseError:
                self.i = save
            return self.paren_expression()
        raise ParseError("expected expression", t)

    def formal_parameters_or_inferred(self) -> Node:
        children = [self.take("(")]
        while not self.at(")") and not self.at_kind(EOF):
            if self.peek().kind == NAME and self.peek(1).text in (",", ")"):
                children.append(self.take_name())
            else:
                children.append(self.formal_parameter())
            if self.at(","):
                children.append(_anon_leaf(self.advance()))
            elif not self.at(")"):
                raise ParseError("expected ',' or ')'", self.peek())
        children.append(self.take(")"))
        return _mk("formal_parameters", children)

    def lambda_body(self) -> Node:
        if self.at("{"):
            return self.block()
        return self.expression()

    def object_creation(self) -> Node:
        kw = self.take("new")
        type_node = self.type_ref()
        type_node.field = "type"
        if self.at("["):
            dims: list[Node] = []
            while self.at("["):
                d = [_anon_leaf(self.advance())]
                if not self.at("]"):
                    d.append(self.expression())
                d.append(self.take("]"))
                dims.append(_mk("dimensions_expr", d))
            parts = [kw, type_node] + dims
            if self.at("{"):
                parts.append(self.array_initializer())
            return _mk("array_creation_expression", parts)
        args = self.argument_list()
        args.field = "arguments"
        parts = [kw, type_node, args]
        if self.at("{"):  # anonymous class
            parts.append(self.class_body())
        return _mk("object_creation_expression", parts)


def parse_java(source: str) -> SyntaxTree:
    tokens, lex_errors = tokenize(source)
    parser = _Parser(tokens)
    root = parser.parse_program(source)
    comments = []
    for t in parser.comments:
        type_ = "line_comment" if t.text.startswith("//") else "block_comment"
        comments.append(_named_leaf(type_, t))
    insert_comments(root, comments)
    return SyntaxTree(root, source, "java",
                      recovery_errors=lex_errors + parser.recovery_errors)
