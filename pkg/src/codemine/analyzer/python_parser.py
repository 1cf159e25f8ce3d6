"""Error-recovering Python parser producing tree-sitter-style concrete trees.

Grammar version: grammar-python-1.0.0 (see analyzer docs for the node
vocabulary). Keywords and punctuation appear as anonymous leaf tokens; grammar
rules (module, expression_statement, assignment, identifier, integer, ...)
are named nodes. Unparseable statements are collected into ERROR nodes so a
tree is always produced; the tree-level error flag reflects recovery.

Known simplifications, reflected in the grammar version: f-strings are atomic
``string`` leaves (no interpolation children) and ``match`` statements parse
via error recovery.
"""

from __future__ import annotations

from .lexutil import (COMMENT, DEDENT, EOF, ERRTOK, FLOAT, INDENT, INT, NAME,
                      NEWLINE, OP, STRING, ParseError, Token, scan_points)
from .tree import Node, SyntaxTree, insert_comments

PYTHON_GRAMMAR_VERSION = "grammar-python-1.0.0"

KEYWORDS = frozenset("""
and as assert async await break class continue def del elif else except
finally for from global if import in is lambda nonlocal not or pass raise
return try while with yield
""".split())

_CONSTANT_NAMES = {"True": "true", "False": "false", "None": "none"}

_OPS3 = ("**=", "//=", ">>=", "<<=", "...")
_OPS2 = ("**", "//", ">>", "<<", "<=", ">=", "==", "!=", "->", ":=",
         "+=", "-=", "*=", "/=", "%=", "@=", "&=", "|=", "^=")
_OPS1 = "+-*/%@&|^~<>()[]{},:.;="

_STRING_PREFIXES = {"r", "b", "f", "u", "rb", "br", "fr", "rf",
                    "R", "B", "F", "U"}  # case-insensitive match done below

_AUGOPS = frozenset({"+=", "-=", "*=", "/=", "//=", "%=", "@=", "**=",
                     ">>=", "<<=", "&=", "|=", "^="})
_COMPARE_OPS = frozenset({"<", ">", "==", "!=", "<=", ">="})


def tokenize(src: str) -> tuple[list[Token], int]:
    """Lex Python source; returns (tokens, recovery_error_count).

    Logical-line structure (NEWLINE/INDENT/DEDENT) follows the language
    rules: blank and comment-only lines produce no structure tokens, lines
    inside brackets continue implicitly, and a backslash joins physical
    lines.
    """
    tokens: list[Token] = []
    errors = 0
    n = len(src)
    pos = 0
    line = 0
    col = 0
    depth = 0
    bol = True
    indents = [0]

    def emit(kind: str, start: int, end: int, sp: tuple[int, int]) -> None:
        nonlocal line, col
        text = src[start:end]
        ep = scan_points(text, sp)
        tokens.append(Token(kind, text, start, end, sp, ep))
        line, col = ep

    def zero(kind: str) -> None:
        tokens.append(Token(kind, "", pos, pos, (line, col), (line, col)))

    while pos < n:
        if bol and depth == 0:
            # measure indentation of the upcoming line
            start = pos
            width = 0
            while pos < n and src[pos] in " \t\f":
                width = width + 1 if src[pos] != "\t" else (width // 8 + 1) * 8
                pos += 1
            col += pos - start
            if pos >= n:
                break
            ch = src[pos]
            if ch == "\n":
                pos += 1
                line += 1
                col = 0
                continue
            if ch == "#":
                end = src.find("\n", pos)
                end = n if end == -1 else end
                emit(COMMENT, pos, end, (line, col))
                pos = end
                continue
            if width > indents[-1]:
                indents.append(width)
                zero(INDENT)
            else:
                while width < indents[-1]:
                    indents.pop()
                    zero(DEDENT)
                if width != indents[-1]:
                    errors += 1  # unaligned dedent; recovered by leveling
                    indents[-1] = width
            bol = False
            continue

        ch = src[pos]
        if ch in " \t\f":
            pos += 1
            col += 1
            continue
        if ch == "\\" and pos + 1 < n and src[pos + 1] == "\n":
            pos += 2
            line += 1
            col = 0
            continue
        if ch == "\n":
            if depth > 0:
                pos += 1
                line += 1
                col = 0
                continue
            emit(NEWLINE, pos, pos + 1, (line, col))
            pos += 1
            bol = True
            continue
        if ch == "#":
            end = src.find("\n", pos)
            end = n if end == -1 else end
            emit(COMMENT, pos, end, (line, col))
            pos = end
            continue

        # string literal (with optional prefix)
        quote_at = -1
        if ch in "'\"":
            quote_at = pos
        elif ch.isalpha() and pos + 2 < n + 1:
            for plen in (2, 1):
                prefix = src[pos:pos + plen]
                if prefix.lower() in _STRING_PREFIXES and pos + plen < n \
                        and src[pos + plen] in "'\"":
                    quote_at = pos + plen
                    break
        if quote_at >= 0:
            end, ok = _scan_string(src, quote_at)
            emit(STRING if ok else ERRTOK, pos, end, (line, col))
            if not ok:
                errors += 1
            pos = end
            continue

        if ch.isdigit() or (ch == "." and pos + 1 < n and src[pos + 1].isdigit()):
            end, kind = _scan_number(src, pos)
            emit(kind, pos, end, (line, col))
            pos = end
            continue

        if ch.isalpha() or ch == "_" or ord(ch) > 127:
            end = pos + 1
            while end < n and (src[end].isalnum() or src[end] == "_"
                               or ord(src[end]) > 127):
                end += 1
            emit(NAME, pos, end, (line, col))
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
            if op in "([{":
                depth += 1
            elif op in ")]}":
                depth = max(0, depth - 1)
            emit(OP, pos, pos + len(op), (line, col))
            pos += len(op)
            continue

        emit(ERRTOK, pos, pos + 1, (line, col))
        errors += 1

    if tokens and tokens[-1].kind not in (NEWLINE, COMMENT) and not bol:
        zero(NEWLINE)
    elif tokens and tokens[-1].kind == COMMENT:
        zero(NEWLINE)
    while len(indents) > 1:
        indents.pop()
        zero(DEDENT)
    zero(EOF)
    return tokens, errors


def _scan_string(src: str, quote_at: int) -> tuple[int, bool]:
    """Scan from the opening quote; returns (end, terminated)."""
    n = len(src)
    q = src[quote_at]
    triple = src.startswith(q * 3, quote_at)
    qlen = 3 if triple else 1
    i = quote_at + qlen
    closer = q * qlen
    while i < n:
        c = src[i]
        if c == "\\":
            i += 2
            continue
        if src.startswith(closer, i):
            return i + qlen, True
        if c == "\n" and not triple:
            return i, False
        i += 1
    return n, False


def _scan_number(src: str, pos: int) -> tuple[int, str]:
    n = len(src)
    i = pos
    kind = INT
    if src.startswith(("0x", "0X", "0o", "0O", "0b", "0B"), pos):
        i += 2
        while i < n and (src[i].isalnum() or src[i] == "_"):
            i += 1
        return i, INT
    while i < n and (src[i].isdigit() or src[i] == "_"):
        i += 1
    if i < n and src[i] == ".":
        kind = FLOAT
        i += 1
        while i < n and (src[i].isdigit() or src[i] == "_"):
            i += 1
    if i < n and src[i] in "eE" and i + 1 < n and (
            src[i + 1].isdigit() or (src[i + 1] in "+-" and i + 2 < n and src[i + 2].isdigit())):
        kind = FLOAT
        i += 2
        while i < n and src[i].isdigit():
            i += 1
    if i < n and src[i] in "jJ":
        i += 1  # imaginary suffix keeps the int/float split of the mantissa
    return i, kind


def _leaf_for(tok: Token) -> Node:
    """Leaf node for a raw token (used both in normal parse and ERROR fill)."""
    if tok.kind == NAME:
        if tok.text in _CONSTANT_NAMES:
            return _named_leaf(_CONSTANT_NAMES[tok.text], tok)
        if tok.text in KEYWORDS:
            return _anon_leaf(tok)
        return _named_leaf("identifier", tok)
    if tok.kind == INT:
        return _named_leaf("integer", tok)
    if tok.kind == FLOAT:
        return _named_leaf("float", tok)
    if tok.kind == STRING:
        return _named_leaf("string", tok)
    if tok.kind == OP and tok.text == "...":
        return _named_leaf("ellipsis", tok)
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

    # --- cursor helpers -------------------------------------------------
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

    def take_kind(self, kind: str) -> Token:
        if not self.at_kind(kind):
            raise ParseError(f"expected {kind}", self.peek())
        return self.advance()

    def missing(self, type_: str, named: bool) -> Node:
        t = self.peek()
        return Node(type_, named, t.start_offset, t.start_offset,
                    t.start_point, t.start_point, is_missing=True)

    # --- module ----------------------------------------------------------
    def parse_module(self, source: str) -> Node:
        stmts: list[Node] = []
        while not self.at_kind(EOF):
            stmts.extend(self.statement_with_recovery())
        end_point = scan_points(source, (0, 0))
        return Node("module", True, 0, len(source), (0, 0), end_point,
                    children=stmts)

    def statement_with_recovery(self) -> list[Node]:
        if self.at_kind(NEWLINE):  # stray logical terminator
            self.advance()
            return []
        if self.at_kind(INDENT):
            # unexpected indent: parse the indented suite, wrap it as ERROR
            self.advance()
            inner: list[Node] = []
            while not self.at_kind(DEDENT) and not self.at_kind(EOF):
                inner.extend(self.statement_with_recovery())
            if self.at_kind(DEDENT):
                self.advance()
            self.recovery_errors += 1
            return [_mk("ERROR", inner)] if inner else []
        if self.at_kind(DEDENT):
            self.advance()
            self.recovery_errors += 1
            return []
        start = self.i
        try:
            return self.parse_statement()
        except ParseError:
            self.i = start
            return [self._error_to_line_end()]

    def _error_to_line_end(self) -> Node:
        """Consume tokens through the logical line end into an ERROR node."""
        children: list[Node] = []
        while True:
            t = self.peek()
            if t.kind in (EOF, DEDENT):
                break
            self.advance()
            if t.kind == NEWLINE:
                break
            if t.kind == INDENT:
                continue
            children.append(_leaf_for(t))
        if not children:  # zero-width error at current position
            t = self.peek()
            self.recovery_errors += 1
            return Node("ERROR", True, t.start_offset, t.start_offset,
                        t.start_point, t.start_point, is_missing=True)
        return _mk("ERROR", children)

    # --- statements -------------------------------------------------------
    def parse_statement(self) -> list[Node]:
        t = self.peek()
        if t.kind == NAME:
            kw = t.text
            if kw == "if":
                return [self.if_statement()]
            if kw == "while":
                return [self.while_statement()]
            if kw == "for":
                return [self.for_statement()]
            if kw == "try":
                return [self.try_statement()]
            if kw == "with":
                return [self.with_statement()]
            if kw == "def":
                return [self.function_definition()]
            if kw == "class":
                return [self.class_definition()]
            if kw == "async":
                return [self.async_statement()]
        if self.at("@"):
            return [self.decorated_definition()]
        return self.simple_statement_line()

    def simple_statement_line(self) -> list[Node]:
        stmts = [self.simple_statement()]
        while self.at(";"):
            self.advance()
            if self.at_kind(NEWLINE) or self.at_kind(EOF):
                break
            stmts.append(self.simple_statement())
        if self.at_kind(NEWLINE):
            self.advance()
        elif not self.at_kind(EOF) and not self.at_kind(DEDENT):
            raise ParseError("expected end of statement", self.peek())
        return stmts

    def simple_statement(self) -> Node:
        t = self.peek()
        if t.kind == NAME:
            kw = t.text
            simple = {
                "return": self.return_statement,
                "pass": lambda: self.keyword_statement("pass_statement"),
                "break": lambda: self.keyword_statement("break_statement"),
                "continue": lambda: self.keyword_statement("continue_statement"),
                "import": self.import_statement,
                "from": self.import_from_statement,
                "raise": self.raise_statement,
                "global": lambda: self.name_list_statement("global_statement"),
                "nonlocal": lambda: self.name_list_statement("nonlocal_statement"),
                "del": self.delete_statement,
                "assert": self.assert_statement,
            }
            if kw in simple:
                return simple[kw]()
        return self.expression_statement()

    def keyword_statement(self, type_: str) -> Node:
        return _mk(type_, [_anon_leaf(self.advance())])

    def return_statement(self) -> Node:
        children = [self.take("return")]
        if not self._at_line_end():
            children.append(self.expression_list())
        return _mk("return_statement", children)

    def _at_line_end(self) -> bool:
        return self.at_kind(NEWLINE) or self.at_kind(EOF) or self.at(";") \
            or self.at_kind(DEDENT)

    def name_list_statement(self, type_: str) -> Node:
        children = [_anon_leaf(self.advance())]
        children.append(_named_leaf("identifier", self.take_kind(NAME)))
        while self.at(","):
            children.append(_anon_leaf(self.advance()))
            children.append(_named_leaf("identifier", self.take_kind(NAME)))
        return _mk(type_, children)

    def delete_statement(self) -> Node:
        children = [self.take("del"), self.expression_list()]
        return _mk("delete_statement", children)

    def assert_statement(self) -> Node:
        children = [self.take("assert"), self.expression()]
        if self.at(","):
            children.append(_anon_leaf(self.advance()))
            children.append(self.expression())
        return _mk("assert_statement", children)

    def raise_statement(self) -> Node:
        children = [self.take("raise")]
        if not self._at_line_end():
            children.append(self.expression())
            if self.at("from"):
                children.append(_anon_leaf(self.advance()))
                children.append(self.expression())
        return _mk("raise_statement", children)

    def import_statement(self) -> Node:
        children = [self.take("import"), self.import_target()]
        while self.at(","):
            children.append(_anon_leaf(self.advance()))
            children.append(self.import_target())
        return _mk("import_statement", children)

    def import_target(self) -> Node:
        name = self.dotted_name()
        if self.at("as"):
            as_kw = _anon_leaf(self.advance())
            alias = _named_leaf("identifier", self.take_kind(NAME), field="alias")
            return _mk("aliased_import", [name, as_kw, alias])
        return name

    def dotted_name(self) -> Node:
        parts = [_named_leaf("identifier", self.take_kind(NAME))]
        while self.at(".") and self.peek(1).kind == NAME:
            parts.append(_anon_leaf(self.advance()))
            parts.append(_named_leaf("identifier", self.take_kind(NAME)))
        return _mk("dotted_name", parts)

    def import_from_statement(self) -> Node:
        children = [self.take("from")]
        if self.at(".") or self.at("..."):
            dots = []
            while self.at(".") or self.at("..."):
                dots.append(_anon_leaf(self.advance()))
            prefix = _mk("import_prefix", dots)
            rel = [prefix]
            if self.peek().kind == NAME and not self.at("import"):
                rel.append(self.dotted_name())
            children.append(_mk("relative_import", rel))
        else:
            children.append(self.dotted_name())
        children.append(self.take("import"))
        if self.at("*"):
            children.append(_mk("wildcard_import", [_anon_leaf(self.advance())]))
            return _mk("import_from_statement", children)
        parenthesized = self.at("(")
        if parenthesized:
            children.append(_anon_leaf(self.advance()))
        children.append(self.import_target())
        while self.at(","):
            children.append(_anon_leaf(self.advance()))
            if parenthesized and self.at(")"):
                break
            children.append(self.import_target())
        if parenthesized:
            children.append(self.take(")"))
        return _mk("import_from_statement", children)

    def expression_statement(self) -> Node:
        expr = self.expression_list(pattern_ok=True)
        if self.at(":") or self.at("=") or self._at_augop():
            expr = self.assignment(expr)
        return _mk("expression_statement", [expr])

    def _at_augop(self) -> bool:
        t = self.peek()
        return t.kind == OP and t.text in _AUGOPS

    def assignment(self, left: Node) -> Node:
        if self._at_augop():
            op = _anon_leaf(self.advance())
            right = self.expression_list()
            return _mk("augmented_assignment", [left, op, right])
        children = [left]
        left.field = "left"
        if self.at(":"):
            children.append(_anon_leaf(self.advance()))
            children.append(_mk("type", [self.expression()], field="type"))
        if self.at("="):
            children.append(_anon_leaf(self.advance()))
            right = self.expression_list(pattern_ok=True)
            if self.at("=") or self._at_augop():  # chained a = b = c
                right = self.assignment(right)
            right.field = "right"
            children.append(right)
        return _mk("assignment", children)

    def expression_list(self, pattern_ok: bool = False) -> Node:
        """One expression, or a comma-joined expression_list/pattern_list."""
        first = self.expression()
        if not self.at(","):
            return first
        children = [first]
        trailing_comma = False
        while self.at(","):
            children.append(_anon_leaf(self.advance()))
            if self._at_line_end() or self.at("=") or self.at(")") or self.at("]"):
                trailing_comma = True
                break
            children.append(self.expression())
        list_type = "expression_list"
        if pattern_ok and (self.at("=") or self.at("in")):
            list_type = "pattern_list"
        node = _mk(list_type, children)
        return node

    # --- compound statements ----------------------------------------------
    def block(self) -> Node:
        """Parse the suite after ':' (inline statements or an indented block)."""
        if self.at_kind(NEWLINE):
            self.advance()
            if not self.at_kind(INDENT):
                self.recovery_errors += 1
                return self.missing("block", True)
            self.advance()
            stmts: list[Node] = []
            while not self.at_kind(DEDENT) and not self.at_kind(EOF):
                stmts.extend(self.statement_with_recovery())
            if self.at_kind(DEDENT):
                self.advance()
            if not stmts:
                self.recovery_errors += 1
                return self.missing("block", True)
            return _mk("block", stmts, field="body")
        stmts = self.simple_statement_line()
        if not stmts:
            self.recovery_errors += 1
            return self.missing("block", True)
        return _mk("block", stmts, field="body")

    def if_statement(self) -> Node:
        children = [self.take("if")]
        cond = self.expression()
        cond.field = "condition"
        children.append(cond)
        children.append(self.take(":"))
        children.append(self.block())
        while self.at("elif"):
            ec = [_anon_leaf(self.advance())]
            c = self.expression()
            c.field = "condition"
            ec.append(c)
            ec.append(self.take(":"))
            ec.append(self.block())
            children.append(_mk("elif_clause", ec))
        if self.at("else"):
            children.append(self.else_clause())
        return _mk("if_statement", children)

    def else_clause(self) -> Node:
        ec = [self.take("else"), self.take(":"), self.block()]
        return _mk("else_clause", ec)

    def while_statement(self) -> Node:
        children = [self.take("while")]
        cond = self.expression()
        cond.field = "condition"
        children.append(cond)
        children.append(self.take(":"))
        children.append(self.block())
        if self.at("else"):
            children.append(self.else_clause())
        return _mk("while_statement", children)

    def for_statement(self, async_kw: Node | None = None) -> Node:
        children = [async_kw] if async_kw else []
        children.append(self.take("for"))
        left = self.target_list()
        left.field = "left"
        children.append(left)
        children.append(self.take("in"))
        right = self.expression_list()
        right.field = "right"
        children.append(right)
        children.append(self.take(":"))
        children.append(self.block())
        if self.at("else"):
            children.append(self.else_clause())
        return _mk("for_statement", children)

    def target_list(self) -> Node:
        first = self.postfix_expression()
        if not self.at(","):
            return first
        children = [first]
        while self.at(","):
            children.append(_anon_leaf(self.advance()))
            if self.at("in"):
                break
            children.append(self.postfix_expression())
        return _mk("pattern_list", children)

    def try_statement(self) -> Node:
        children = [self.take("try"), self.take(":"), self.block()]
        while self.at("except"):
            ec = [_anon_leaf(self.advance())]
            if not self.at(":"):
                value = self.expression()
                if self.at("as"):
                    as_kw = _anon_leaf(self.advance())
                    alias = _named_leaf("as_pattern_target",
                                        self.take_kind(NAME), field="alias")
                    value = _mk("as_pattern", [value, as_kw, alias])
                ec.append(value)
            ec.append(self.take(":"))
            ec.append(self.block())
            children.append(_mk("except_clause", ec))
        if self.at("else"):
            children.append(self.else_clause())
        if self.at("finally"):
            fc = [_anon_leaf(self.advance()), self.take(":"), self.block()]
            children.append(_mk("finally_clause", fc))
        return _mk("try_statement", children)

    def with_statement(self, async_kw: Node | None = None) -> Node:
        children = [async_kw] if async_kw else []
        children.append(self.take("with"))
        items = [self.with_item()]
        while self.at(","):
            items.append(_anon_leaf(self.advance()))
            items.append(self.with_item())
        children.append(_mk("with_clause", items))
        children.append(self.take(":"))
        children.append(self.block())
        return _mk("with_statement", children)

    def with_item(self) -> Node:
        value = self.expression()
        if self.at("as"):
            as_kw = _anon_leaf(self.advance())
            alias = _named_leaf("as_pattern_target",
                                self.take_kind(NAME), field="alias")
            value = _mk("as_pattern", [value, as_kw, alias])
        value.field = "value"
        return _mk("with_item", [value])

    def async_statement(self) -> Node:
        async_kw = self.take("async")
        if self.at("def"):
            return self.function_definition(async_kw)
        if self.at("for"):
            return self.for_statement(async_kw)
        if self.at("with"):
            return self.with_statement(async_kw)
        raise ParseError("expected def/for/with after async", self.peek())

    def decorated_definition(self) -> Node:
        decorators = []
        while self.at("@"):
            at = _anon_leaf(self.advance())
            expr = self.postfix_expression()
            decorators.append(_mk("decorator", [at, expr]))
            if self.at_kind(NEWLINE):
                self.advance()
        if self.at("def"):
            defn = self.function_definition()
        elif self.at("async"):
            defn = self.async_statement()
        elif self.at("class"):
            defn = self.class_definition()
        else:
            raise ParseError("expected definition after decorator", self.peek())
        defn.field = "definition"
        return _mk("decorated_definition", decorators + [defn])

    def function_definition(self, async_kw: Node | None = None) -> Node:
        children = [async_kw] if async_kw else []
        children.append(self.take("def"))
        children.append(_named_leaf("identifier", self.take_kind(NAME), field="name"))
        children.append(self.parameters())
        if self.at("->"):
            children.append(_anon_leaf(self.advance()))
            children.append(_mk("type", [self.expression()], field="return_type"))
        children.append(self.take(":"))
        children.append(self.block())
        return _mk("function_definition", children)

    def parameters(self) -> Node:
        children = [self.take("(")]
        while not self.at(")") and not self.at_kind(EOF):
            children.append(self.parameter())
            if self.at(","):
                children.append(_anon_leaf(self.advance()))
            elif not self.at(")"):
                raise ParseError("expected ',' or ')' in parameters", self.peek())
        children.append(self.take(")"))
        return _mk("parameters", children, field="parameters")

    def parameter(self, typed_ok: bool = True) -> Node:
        if self.at("*") and self.peek(1).kind == NAME:
            star = _anon_leaf(self.advance())
            name = _named_leaf("identifier", self.take_kind(NAME))
            return _mk("list_splat_pattern", [star, name])
        if self.at("**"):
            stars = _anon_leaf(self.advance())
            name = _named_leaf("identifier", self.take_kind(NAME))
            return _mk("dictionary_splat_pattern", [stars, name])
        if self.at("*") or self.at("/"):
            return _anon_leaf(self.advance())
        name = _named_leaf("identifier", self.take_kind(NAME))
        typed = None
        if typed_ok and self.at(":"):
            colon = _anon_leaf(self.advance())
            typed = [name, colon, _mk("type", [self.expression()])]
        if self.at("="):
            eq = _anon_leaf(self.advance())
            value = self.expression()
            value.field = "value"
            if typed:
                name.field = "name"
                return _mk("typed_default_parameter", typed + [eq, value])
            name.field = "name"
            return _mk("default_parameter", [name, eq, value])
        if typed:
            return _mk("typed_parameter", typed)
        return name

    def class_definition(self) -> Node:
        children = [self.take("class")]
        children.append(_named_leaf("identifier", self.take_kind(NAME), field="name"))
        if self.at("("):
            children.append(self.argument_list("superclasses"))
        children.append(self.take(":"))
        children.append(self.block())
        return _mk("class_definition", children)

    # --- expressions --------------------------------------------------------
    def expression(self) -> Node:
        if self.at("lambda"):
            return self.lambda_expression()
        if self.at("yield"):
            return self.yield_expression()
        expr = self.or_expr()
        if self.at("if"):
            if_kw = _anon_leaf(self.advance())
            cond = self.or_expr()
            else_kw = self.take("else")
            alt = self.expression()
            return _mk("conditional_expression", [expr, if_kw, cond, else_kw, alt])
        if self.at(":="):
            op = _anon_leaf(self.advance())
            value = self.expression()
            return _mk("named_expression", [expr, op, value])
        return expr

    def yield_expression(self) -> Node:
        children = [self.take("yield")]
        if self.at("from"):
            children.append(_anon_leaf(self.advance()))
            children.append(self.expression())
        elif not self._at_line_end() and not self.at(")"):
            children.append(self.expression_list())
        return _mk("yield", children)

    def lambda_expression(self) -> Node:
        children = [self.take("lambda")]
        if not self.at(":"):
            params = [self.parameter(typed_ok=False)]
            while self.at(","):
                params.append(_anon_leaf(self.advance()))
                params.append(self.parameter(typed_ok=False))
            children.append(_mk("lambda_parameters", params, field="parameters"))
        children.append(self.take(":"))
        body = self.expression()
        body.field = "body"
        children.append(body)
        return _mk("lambda", children)

    def _binary_chain(self, sub, ops: frozenset[str] | set[str]) -> Node:
        left = sub()
        while self.peek().kind in (OP, NAME) and self.peek().text in ops:
            op = _anon_leaf(self.advance())
            right = sub()
            left = _mk("binary_operator", [left, op, right])
        return left

    def or_expr(self) -> Node:
        left = self.and_expr()
        while self.at("or"):
            op = _anon_leaf(self.advance())
            left = _mk("boolean_operator", [left, op, self.and_expr()])
        return left

    def and_expr(self) -> Node:
        left = self.not_expr()
        while self.at("and"):
            op = _anon_leaf(self.advance())
            left = _mk("boolean_operator", [left, op, self.not_expr()])
        return left

    def not_expr(self) -> Node:
        if self.at("not"):
            kw = _anon_leaf(self.advance())
            return _mk("not_operator", [kw, self.not_expr()])
        return self.comparison()

    def comparison(self) -> Node:
        left = self.bit_or()
        parts = [left]
        while True:
            t = self.peek()
            if t.kind == OP and t.text in _COMPARE_OPS:
                parts.append(_anon_leaf(self.advance()))
            elif self.at("in"):
                parts.append(_anon_leaf(self.advance()))
            elif self.at("not") and self.peek(1).text == "in":
                parts.append(_anon_leaf(self.advance()))
                parts.append(_anon_leaf(self.advance()))
            elif self.at("is"):
                parts.append(_anon_leaf(self.advance()))
                if self.at("not"):
                    parts.append(_anon_leaf(self.advance()))
            else:
                break
            parts.append(self.bit_or())
        if len(parts) == 1:
            return left
        return _mk("comparison_operator", parts)

    def bit_or(self) -> Node:
        return self._binary_chain(self.bit_xor, {"|"})

    def bit_xor(self) -> Node:
        return self._binary_chain(self.bit_and, {"^"})

    def bit_and(self) -> Node:
        return self._binary_chain(self.shift, {"&"})

    def shift(self) -> Node:
        return self._binary_chain(self.arith, {"<<", ">>"})

    def arith(self) -> Node:
        return self._binary_chain(self.term, {"+", "-"})

    def term(self) -> Node:
        return self._binary_chain(self.factor, {"*", "/", "//", "%", "@"})

    def factor(self) -> Node:
        if self.at("+") or self.at("-") or self.at("~"):
            op = _anon_leaf(self.advance())
            return _mk("unary_operator", [op, self.factor()])
        return self.power()

    def power(self) -> Node:
        base = self.await_expr()
        if self.at("**"):
            op = _anon_leaf(self.advance())
            return _mk("binary_operator", [base, op, self.factor()])
        return base

    def await_expr(self) -> Node:
        if self.at("await"):
            kw = _anon_leaf(self.advance())
            return _mk("await", [kw, self.await_expr()])
        return self.postfix_expression()

    def postfix_expression(self) -> Node:
        node = self.primary()
        while True:
            if self.at(".") and self.peek(1).kind == NAME:
                dot = _anon_leaf(self.advance())
                node.field = "object"
                attr = _named_leaf("identifier", self.take_kind(NAME),
                                   field="attribute")
                node = _mk("attribute", [node, dot, attr])
            elif self.at("("):
                node.field = "function"
                args = self.argument_list("arguments")
                node = _mk("call", [node, args])
            elif self.at("["):
                node.field = "value"
                open_b = _anon_leaf(self.advance())
                subs = [node, open_b]
                subs.append(self.subscript_item())
                while self.at(","):
                    subs.append(_anon_leaf(self.advance()))
                    if self.at("]"):
                        break
                    subs.append(self.subscript_item())
                subs.append(self.take("]"))
                node = _mk("subscript", subs)
            else:
                return node

    def subscript_item(self) -> Node:
        parts: list[Node] = []
        if not self.at(":"):
            parts.append(self.expression())
            if not self.at(":"):
                return parts[0]
        while self.at(":"):
            parts.append(_anon_leaf(self.advance()))
            if not self.at(":") and not self.at("]") and not self.at(","):
                parts.append(self.expression())
        return _mk("slice", parts)

    def argument_list(self, field: str) -> Node:
        children: list[Node] = [self.take("(")]
        while not self.at(")") and not self.at_kind(EOF):
            children.append(self.argument())
            if self.at(","):
                children.append(_anon_leaf(self.advance()))
            elif not self.at(")"):
                raise ParseError("expected ',' or ')' in arguments", self.peek())
        children.append(self.take(")"))
        return _mk("argument_list", children, field=field)

    def argument(self) -> Node:
        if self.at("*") and not self.at("**"):
            star = _anon_leaf(self.advance())
            return _mk("list_splat", [star, self.expression()])
        if self.at("**"):
            stars = _anon_leaf(self.advance())
            return _mk("dictionary_splat", [stars, self.expression()])
        if self.peek().kind == NAME and self.peek().text not in KEYWORDS \
                and self.peek(1).text == "=" and self.peek(1).kind == OP:
            name = _named_leaf("identifier", self.advance(), field="name")
            eq = _anon_leaf(self.advance())
            value = self.expression()
            value.field = "value"
            return _mk("keyword_argument", [name, eq, value])
        expr = self.expression()
        if self.at("for") or self.at("async"):
            clauses = self.comprehension_clauses()
            return _mk("generator_expression", [expr] + clauses)
        return expr

    def comprehension_clauses(self) -> list[Node]:
        clauses: list[Node] = []
        while True:
            if self.at("for") or (self.at("async") and self.peek(1).text == "for"):
                fc: list[Node] = []
                if self.at("async"):
                    fc.append(_anon_leaf(self.advance()))
                fc.append(self.take("for"))
                left = self.target_list()
                left.field = "left"
                fc.append(left)
                fc.append(self.take("in"))
                right = self.or_expr()
                right.field = "right"
                fc.append(right)
                clauses.append(_mk("for_in_clause", fc))
            elif self.at("if"):
                kw = _anon_leaf(self.advance())
                clauses.append(_mk("if_clause", [kw, self.or_expr()]))
            else:
                return clauses

    def primary(self) -> Node:
        t = self.peek()
        if t.kind == NAME:
            if t.text in _CONSTANT_NAMES:
                return _named_leaf(_CONSTANT_NAMES[t.text], self.advance())
            if t.text == "lambda":
                return self.lambda_expression()
            if t.text in KEYWORDS:
                raise ParseError("unexpected keyword", t)
            return _named_leaf("identifier", self.advance())
        if t.kind == INT:
            return _named_leaf("integer", self.advance())
        if t.kind == FLOAT:
            return _named_leaf("float", self.advance())
        if t.kind == STRING:
            return self.string_expression()
        if self.at("..."):
            return _named_leaf("ellipsis", self.advance())
        if self.at("("):
            return self.paren_expression()
        if self.at("["):
            return self.bracket_expression()
        if self.at("{"):
            return self.brace_expression()
        raise ParseError("expected expression", t)

    def string_expression(self) -> Node:
        first = _named_leaf("string", self.advance())
        if not self.at_kind(STRING):
            return first
        parts = [first]
        while self.at_kind(STRING):
            parts.append(_named_leaf("string", self.advance()))
        return _mk("concatenated_string", parts)

    def paren_expression(self) -> Node:
        open_p = self.take("(")
        if self.at(")"):
            return _mk("tuple", [open_p, self.take(")")])
        if self.at("yield"):
            inner = self.yield_expression()
            return _mk("parenthesized_expression", [open_p, inner, self.take(")")])
        first = self.expression()
        if self.at("for"):
            clauses = self.comprehension_clauses()
            return _mk("generator_expression", [open_p, first] + clauses + [self.take(")")])
        if self.at(","):
            children = [open_p, first]
            while self.at(","):
                children.append(_anon_leaf(self.advance()))
                if self.at(")"):
                    break
                children.append(self.expression())
            children.append(self.take(")"))
            return _mk("tuple", children)
        return _mk("parenthesized_expression", [open_p, first, self.take(")")])

    def bracket_expression(self) -> Node:
        open_b = self.take("[")
        if self.at("]"):
            return _mk("list", [open_b, self.take("]")])
        first = self.spreadable_expression()
        if self.at("for"):
            first.field = "body"
            clauses = self.comprehension_clauses()
            return _mk("list_comprehension", [open_b, first] + clauses + [self.take("]")])
        children = [open_b, first]
        while self.at(","):
            children.append(_anon_leaf(self.advance()))
            if self.at("]"):
                break
            children.append(self.spreadable_expression())
        children.append(self.take("]"))
        return _mk("list", children)

    def spreadable_expression(self) -> Node:
        if self.at("*") and not self.at("**"):
            star = _anon_leaf(self.advance())
            return _mk("list_splat", [star, self.expression()])
        return self.expression()

    def brace_expression(self) -> Node:
        open_b = self.take("{")
        if self.at("}"):
            return _mk("dictionary", [open_b, self.take("}")])
        if self.at("**"):
            stars = _anon_leaf(self.advance())
            first: Node = _mk("dictionary_splat", [stars, self.expression()])
            is_dict = True
        else:
            key = self.expression()
            if self.at(":"):
                colon = _anon_leaf(self.advance())
                key.field = "key"
                value = self.expression()
                value.field = "value"
                first = _mk("pair", [key, colon, value])
                is_dict = True
            else:
                first = key
                is_dict = False
        if self.at("for"):
            clauses = self.comprehension_clauses()
            type_ = "dictionary_comprehension" if is_dict else "set_comprehension"
            first.field = "body"
            return _mk(type_, [open_b, first] + clauses + [self.take("}")])
        children = [open_b, first]
        while self.at(","):
            children.append(_anon_leaf(self.advance()))
            if self.at("}"):
                break
            if is_dict:
                if self.at("**"):
                    stars = _anon_leaf(self.advance())
                    children.append(_mk("dictionary_splat", [stars, self.expression()]))
                else:
                    key = self.expression()
                    colon = self.take(":")
                    key.field = "key"
                    value = self.expression()
                    value.field = "value"
                    children.append(_mk("pair", [key, colon, value]))
            else:
                children.append(self.expression())
        children.append(self.take("}"))
        return _mk("dictionary" if is_dict else "set", children)


def parse_python(source: str) -> SyntaxTree:
    tokens, lex_errors = tokenize(source)
    parser = _Parser(tokens)
    root = parser.parse_module(source)
    insert_comments(root, [_named_leaf("comment", t) for t in parser.comments])
    return SyntaxTree(root, source, "python",
                      recovery_errors=lex_errors + parser.recovery_errors)
