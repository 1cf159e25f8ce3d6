from codemine.analyzer import (ast_to_sexp, ast_to_xml, compute_metrics,
                               extract_functions, parse_source, parser_version)
from codemine.model import Language

JAVA = Language.JAVA


def parse(src):
    return parse_source(src, JAVA)


def test_root_node_type_is_program():
    tree = parse("class A { int x; }")
    assert tree.root.type == "program"
    assert tree.has_errors is False


def test_malformed_input_is_flagged():
    assert parse("class A { void broken( }").has_errors is True


def test_unterminated_block_comment_is_flagged():
    assert parse("class A { /* never closed ").has_errors is True


def test_metrics_counts():
    src = "class A { int x; }\n"
    m = compute_metrics(parse(src), src)
    # class A { int x ; } -> 7 terminals
    assert m.tokens == 7
    assert m.lines == 1


def test_comments_do_not_count_as_tokens():
    src = "// header\nclass A { /* inner */ int x; }\n"
    m = compute_metrics(parse(src), src)
    assert m.tokens == 7


def test_comment_only_file_has_zero_tokens():
    src = "// one\n/* two */\n"
    m = compute_metrics(parse(src), src)
    assert m.tokens == 0
    assert m.has_syntax_errors is False


def test_sexp_shape_for_simple_class():
    assert ast_to_sexp(parse("class A { int x; }")) == (
        "(program (class_declaration (identifier) (class_body "
        "(field_declaration (integral_type) (variable_declarator (identifier))))))"
    )


def test_xml_contains_positions_and_sanitized_names():
    xml = ast_to_xml(parse("class A { }"))
    assert xml.startswith('<program start-line="0" start-col="0"')
    assert "class_declaration" in xml and "class_body" in xml


def test_extract_methods_and_constructors_in_order():
    src = (
        "public class P {\n"
        "    public P() { }\n"
        "    public int one() { return 1; }\n"
        "    public int two() { return 2; }\n"
        "}\n"
    )
    spans = extract_functions(parse(src), src, JAVA)
    assert [s.name for s in spans] == ["P", "one", "two"]


def test_doc_comment_attachment():
    src = (
        "public class P {\n"
        "    /** Adds numbers. */\n"
        "    public int add(int a, int b) {\n"
        "        return a + b;\n"
        "    }\n"
        "\n"
        "    /** Orphaned by a blank line. */\n"
        "\n"
        "    public int sub(int a, int b) {\n"
        "        return a - b;\n"
        "    }\n"
        "}\n"
    )
    spans = extract_functions(parse(src), src, JAVA)
    add, sub = spans
    assert add.content.startswith("/** Adds numbers. */")
    assert add.start_line == 1
    # a blank line between comment and declaration prevents attachment
    assert sub.content.startswith("public int sub")


def test_regular_comment_is_not_attached():
    src = (
        "class P {\n"
        "    // plain comment\n"
        "    int f() { return 1; }\n"
        "}\n"
    )
    spans = extract_functions(parse(src), src, JAVA)
    assert spans[0].content.startswith("int f()")


def test_no_functions_in_interface_constants():
    src = "interface K { int LIMIT = 10; }\n"
    assert extract_functions(parse(src), src, JAVA) == []


def test_java_lambdas_are_not_extracted():
    src = (
        "class P {\n"
        "    Runnable r = () -> System.out.println(1);\n"
        "}\n"
    )
    spans = extract_functions(parse(src), src, JAVA)
    assert spans == []


def test_method_snippet_reparses_cleanly():
    src = "class P { int f(int a) { if (a > 0) { return a; } return -a; } }"
    spans = extract_functions(parse(src), src, JAVA)
    again = parse(spans[0].content)
    assert again.has_errors is False


def test_node_span_fidelity():
    src = (
        "package com.x;\n"
        "import java.util.List;\n"
        "public class A<T> extends B implements C {\n"
        "    private List<String> names = new java.util.ArrayList<>();\n"
        "    int f(int[] xs) throws RuntimeException {\n"
        "        try { return xs[0] >= 2 ? xs.length : -1; }\n"
        "        catch (RuntimeException e) { throw e; }\n"
        "        finally { int unused = 3 >> 1; }\n"
        "    }\n"
        "}\n"
    )
    tree = parse(src)
    assert tree.has_errors is False
    for node in tree.walk():
        assert tree.text(node) == src[node.start_offset:node.end_offset]
        for child in node.children:
            assert child.start_offset >= node.start_offset
            assert child.end_offset <= node.end_offset


def test_parser_version_format():
    assert parser_version(JAVA).startswith("grammar-java-")
