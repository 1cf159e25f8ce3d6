import pytest

from codemine.analyzer import (TransformOnErrorTreeError, ast_to_sexp,
                               content_hash, parse_source, strip_comments)
from codemine.model import Language, StripMode

JAVA = Language.JAVA
PY = Language.PYTHON


def strip(src, lang, mode):
    return strip_comments(parse_source(src, lang), src, lang, mode)


def test_java_regular_keeps_doc():
    src = '/** d */\nint f(){ // c\n return 1; }\n'
    out = strip(src, JAVA, StripMode.REGULAR)
    assert "/** d */" in out
    assert "// c" not in out


def test_java_documentation_keeps_regular():
    src = '/** d */\nint f(){ // c\n return 1; }\n'
    out = strip(src, JAVA, StripMode.DOCUMENTATION)
    assert "/** d */" not in out
    assert "// c" in out


def test_java_both_removes_everything():
    src = '/** d */\nint f(){ // c\n /* b */ return 1; }\n'
    out = strip(src, JAVA, StripMode.BOTH)
    for marker in ("/** d */", "// c", "/* b */"):
        assert marker not in out


def test_whole_line_comment_removes_the_line():
    src = "int a;\n// gone entirely\nint b;\n"
    out = strip(src, JAVA, StripMode.REGULAR)
    assert out == "int a;\nint b;\n"


def test_multiline_block_comment_removes_all_lines():
    src = "int a;\n/* one\n   two\n   three */\nint b;\n"
    out = strip(src, JAVA, StripMode.REGULAR)
    assert out == "int a;\nint b;\n"


def test_trailing_comment_removes_span_only():
    src = "int a; // tail\n"
    out = strip(src, JAVA, StripMode.REGULAR)
    assert out == "int a; \n"


def test_python_docstring_removed_in_documentation_mode():
    src = 'def f():\n    """doc"""\n    return 1\n'
    out = strip(src, PY, StripMode.DOCUMENTATION)
    assert '"""doc"""' not in out
    assert "return 1" in out
    assert parse_source(out, PY).has_errors is False


def test_python_docstring_kept_in_regular_mode():
    src = 'def f():\n    """doc"""\n    # note\n    return 1\n'
    out = strip(src, PY, StripMode.REGULAR)
    assert '"""doc"""' in out
    assert "# note" not in out


def test_python_sole_docstring_is_kept():
    src = 'def f():\n    """only body"""\n'
    out = strip(src, PY, StripMode.DOCUMENTATION)
    assert out == src
    assert parse_source(out, PY).has_errors is False


def test_module_docstring_removed():
    src = '"""module doc"""\nx = 1\n'
    out = strip(src, PY, StripMode.DOCUMENTATION)
    assert out == "x = 1\n"


def test_class_docstring_removed():
    src = 'class C:\n    """doc"""\n    x = 1\n'
    out = strip(src, PY, StripMode.DOCUMENTATION)
    assert '"""doc"""' not in out
    assert parse_source(out, PY).has_errors is False


def test_non_docstring_string_statement_is_kept():
    src = 'def f():\n    x = 1\n    "not a docstring"\n    return x\n'
    out = strip(src, PY, StripMode.DOCUMENTATION)
    assert '"not a docstring"' in out


@pytest.mark.parametrize("lang,src", [
    (JAVA, '/** d */\nclass A { // x\n  int f() { /* y */ return 1; } }\n'),
    (PY, '"""m"""\n# top\ndef f():\n    """d"""\n    return 1  # tail\n'),
])
@pytest.mark.parametrize("mode", [StripMode.REGULAR, StripMode.DOCUMENTATION,
                                  StripMode.BOTH])
def test_strip_is_idempotent(lang, src, mode):
    once = strip(src, lang, mode)
    twice = strip_comments(parse_source(once, lang), once, lang, mode)
    assert once == twice


@pytest.mark.parametrize("lang,src", [
    (JAVA, 'class A { // x\n  int f() { /* y */ return 1; } }\n'),
    (PY, '# top\ndef f():\n    return 1  # tail\n'),
])
def test_regular_strip_preserves_content_hash_and_reparses(lang, src):
    tree = parse_source(src, lang)
    out = strip(src, lang, StripMode.REGULAR)
    tree2 = parse_source(out, lang)
    assert tree2.has_errors is False
    assert content_hash(tree, src) == content_hash(tree2, out)
    assert ast_to_sexp(tree) == ast_to_sexp(tree2)


def test_error_overlapping_comment_raises():
    src = "class A { int broken( /* inside the error region */ }\n"
    tree = parse_source(src, JAVA)
    assert tree.has_errors
    with pytest.raises(TransformOnErrorTreeError):
        strip_comments(tree, src, JAVA, StripMode.REGULAR)


def test_error_elsewhere_does_not_block_strip():
    src = "// header\nclass A { int ok() { return 1; } }\nclass B { broken(\n"
    tree = parse_source(src, JAVA)
    assert tree.has_errors
    out = strip_comments(tree, src, JAVA, StripMode.REGULAR)
    assert "// header" not in out


def test_mode_none_is_rejected():
    tree = parse_source("x = 1\n", PY)
    with pytest.raises(ValueError):
        strip_comments(tree, "x = 1\n", PY, StripMode.NONE)
