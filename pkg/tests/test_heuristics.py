import pytest

from codemine.analyzer import extract_functions, is_boilerplate, is_test_file, parse_source
from codemine.model import Language

JAVA = Language.JAVA
PY = Language.PYTHON


@pytest.mark.parametrize("path,expected", [
    ("src/test/java/FooTest.java", True),
    ("src/main/java/Main.java", False),
    ("contest.py", True),                 # documented literal-rule false positive
    ("tests/helpers.py", True),
    ("TESTS/data.py", True),
    ("src/latest/Main.java", False),      # directory must equal test/tests
    ("protest/march.py", False),
    ("src/util/TestBench.java", True),
    ("attestation.py", True),
    ("src/main.py", False),
    ("test", True),                       # extensionless filename
])
def test_is_test_file(path, expected):
    assert is_test_file(path) is expected


def _functions(src, lang):
    tree = parse_source(src, lang)
    return tree, extract_functions(tree, src, lang)


def _flag(src, lang, index=0):
    tree, spans = _functions(src, lang)
    return is_boilerplate(spans[index].instance_node, lang, tree)


# --- Java ------------------------------------------------------------------

def test_java_getter_is_boilerplate():
    assert _flag("class C { int x; int getX(){return x;} }", JAVA, 0) is True


def test_java_getter_of_this_field():
    assert _flag("class C { int x; int getX(){return this.x;} }", JAVA, 0) is True


def test_java_return_of_literal_is_not_a_getter():
    assert _flag("class C { int answer(){return 42;} }", JAVA, 0) is False


def test_java_setter_is_boilerplate():
    assert _flag("class C { int x; void setX(int v){ this.x = v; } }", JAVA, 0) is True


def test_java_nonvoid_setter_shape_is_not_boilerplate():
    assert _flag("class C { int x; int setX(int v){ this.x = v; return v; } }", JAVA, 0) is False


def test_java_constructor_with_field_assignments():
    assert _flag("class C { int x; C(int x){ this.x = x; } }", JAVA, 0) is True


def test_java_constructor_with_super_call():
    assert _flag("class C extends B { C(){ super(); } }", JAVA, 0) is True


def test_java_constructor_with_logic_is_not_boilerplate():
    src = "class C { int x; C(int x){ this.x = x; validate(); } }"
    assert _flag(src, JAVA, 0) is False


def test_java_tostring_equals_hashcode():
    src = (
        "class C { "
        "public String toString(){ return compute(); } "
        "public boolean equals(Object o){ return deep(o); } "
        "public int hashCode(){ return mix(); } "
        "}"
    )
    tree, spans = _functions(src, JAVA)
    assert [is_boilerplate(s.instance_node, JAVA, tree) for s in spans] == [True, True, True]


def test_java_method_with_loop_is_not_boilerplate():
    src = (
        "class C { int total(int n){ int t = 0; "
        "for (int i = 0; i < n; i++) { t += check(i); } emit(t); return t; } }"
    )
    assert _flag(src, JAVA, 0) is False


# --- Python -------------------------------------------------------------------

def test_python_init_with_attribute_assignments():
    assert _flag("class C:\n    def __init__(self):\n        self.x = 1\n", PY) is True


def test_python_init_with_docstring_and_assignments():
    src = (
        "class C:\n"
        "    def __init__(self, x):\n"
        "        \"\"\"Create.\"\"\"\n"
        "        self.x = x\n"
        "        self.y = x * 2\n"
    )
    assert _flag(src, PY) is True


def test_python_init_with_logic_is_not_boilerplate():
    src = (
        "class C:\n"
        "    def __init__(self, x):\n"
        "        self.x = x\n"
        "        self.prepare()\n"
    )
    assert _flag(src, PY) is False


def test_python_property_getter():
    src = (
        "class C:\n"
        "    @property\n"
        "    def value(self):\n"
        "        return self._v * 3 + compute()\n"
    )
    assert _flag(src, PY) is True


def test_python_property_setter():
    src = (
        "class C:\n"
        "    @value.setter\n"
        "    def value(self, v):\n"
        "        self._v = v\n"
    )
    assert _flag(src, PY) is True


def test_python_other_decorator_is_not_boilerplate():
    src = (
        "class C:\n"
        "    @staticmethod\n"
        "    def build(v):\n"
        "        return parse(v) + 1\n"
    )
    assert _flag(src, PY) is False


def test_python_dunders():
    src = (
        "class C:\n"
        "    def __repr__(self):\n"
        "        return render(self)\n"
        "    def __eq__(self, other):\n"
        "        return deep_compare(self, other)\n"
    )
    tree, spans = _functions(src, PY)
    assert all(is_boilerplate(s.instance_node, PY, tree) for s in spans)


def test_python_plain_function_is_not_boilerplate():
    assert _flag("def work(a):\n    return a * 2\n", PY) is False
