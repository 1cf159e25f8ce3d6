import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codemine.model import (ChangeSet, CodeInstance, Dedup, FilterSpec,
                            Granularity, Language, RepositoryMeta,
                            SpecParseError, StripMode, spec_from_wire,
                            validate_filter_spec)

VECTORS = json.loads(
    (Path(__file__).parent / "vectors" / "filter_spec_vectors.json").read_text())


optional_bound = st.one_of(st.none(), st.integers(min_value=0, max_value=10_000))

spec_strategy = st.builds(
    FilterSpec,
    language=st.one_of(st.none(), st.sampled_from(Language)),
    repo_min_commits=optional_bound, repo_max_commits=optional_bound,
    repo_min_issues=optional_bound, repo_max_issues=optional_bound,
    repo_min_stars=optional_bound, repo_max_stars=optional_bound,
    repo_min_contributors=optional_bound, repo_max_contributors=optional_bound,
    require_license=st.booleans(), exclude_forks=st.booleans(),
    granularity=st.sampled_from(Granularity),
    instance_min_characters=optional_bound, instance_max_characters=optional_bound,
    instance_min_tokens=optional_bound, instance_max_tokens=optional_bound,
    instance_min_lines=optional_bound, instance_max_lines=optional_bound,
    exclude_test=st.booleans(), exclude_syntax_errors=st.booleans(),
    exclude_non_ascii=st.booleans(), exclude_boilerplate=st.booleans(),
    dedup=st.sampled_from(Dedup), strip_comments=st.sampled_from(StripMode),
    include_ast=st.booleans(), include_sexp=st.booleans(),
    include_parser_version=st.booleans(),
)


@settings(max_examples=200)
@given(spec_strategy)
def test_wire_round_trip(spec):
    assert spec_from_wire(spec.to_wire()) == spec


@settings(max_examples=200)
@given(spec_strategy)
def test_wire_round_trip_through_json(spec):
    assert spec_from_wire(json.loads(json.dumps(spec.to_wire()))) == spec


@settings(max_examples=100)
@given(spec_strategy)
def test_validation_is_pure_and_sorted(spec):
    first = validate_filter_spec(spec)
    second = validate_filter_spec(spec)
    assert first == second
    assert [v.field for v in first] == sorted(v.field for v in first)


def test_minimal_java_spec_is_ok():
    assert validate_filter_spec(FilterSpec(language=Language.JAVA)) == []


def test_boilerplate_requires_function():
    spec = FilterSpec(language=Language.JAVA, granularity=Granularity.FILE,
                      exclude_boilerplate=True)
    codes = [v.code for v in validate_filter_spec(spec)]
    assert codes == ["boilerplate-requires-function"]


def test_min_exceeds_max():
    spec = FilterSpec(language=Language.PYTHON, instance_min_lines=20,
                      instance_max_lines=5)
    violations = validate_filter_spec(spec)
    assert [(v.code, v.field) for v in violations] == [("min-exceeds-max", "instance_lines")]


@pytest.mark.parametrize("case", VECTORS["cases"], ids=lambda c: c["name"])
def test_shared_vectors(case):
    spec = spec_from_wire(case["spec"])
    violations = validate_filter_spec(spec)
    assert (violations == []) == case["valid"]
    assert [{"code": v.code, "field": v.field} for v in violations] == case["violations"]


def test_unknown_field_rejected_at_parse():
    with pytest.raises(SpecParseError) as err:
        spec_from_wire({"language": "java", "min_size": 3})
    assert err.value.violations[0].code == "unknown-field"


def test_bad_enum_value_rejected_at_parse():
    with pytest.raises(SpecParseError):
        spec_from_wire({"language": "cobol"})
    with pytest.raises(SpecParseError):
        spec_from_wire({"language": "java", "dedup": "fuzzy"})


def test_bound_type_checking():
    with pytest.raises(SpecParseError):
        spec_from_wire({"language": "java", "instance_min_lines": -1})
    with pytest.raises(SpecParseError):
        spec_from_wire({"language": "java", "instance_min_lines": "five"})
    with pytest.raises(SpecParseError):
        spec_from_wire({"language": "java", "exclude_test": 1})


def test_repository_meta_invariants():
    with pytest.raises(ValueError):
        RepositoryMeta(name="not-a-repo-name", language=Language.JAVA, clone_url="x")
    with pytest.raises(ValueError):
        RepositoryMeta(name="a/b", language=Language.JAVA, clone_url="x",
                       last_commit_sha="XYZ")
    with pytest.raises(ValueError):
        RepositoryMeta(name="a/b", language=Language.JAVA, clone_url="x", stars=-1)
    meta = RepositoryMeta(name="a/b", language=Language.JAVA, clone_url="x",
                          last_commit_sha="a" * 40)
    assert meta.last_commit_sha == "a" * 40


def test_code_instance_invariants():
    kwargs = dict(
        id="i1", repo_name="a/b", path="x.py", granularity=Granularity.FILE,
        start_line=0, end_line=1, content="a\nb\n", lines=2, tokens=2,
        characters=4, has_syntax_errors=False, has_non_ascii=False,
        is_test=False, content_hash="0" * 64, structural_hash="0" * 64,
        ast_xml="<module/>", sexp="(module)", parser_version="grammar-python-1.0.0",
    )
    CodeInstance(**kwargs)
    with pytest.raises(ValueError):
        CodeInstance(**{**kwargs, "lines": 3})
    with pytest.raises(ValueError):
        CodeInstance(**{**kwargs, "characters": 99})
    with pytest.raises(ValueError):
        CodeInstance(**{**kwargs, "is_boilerplate": True})


def test_changeset_disjointness():
    with pytest.raises(ValueError):
        ChangeSet(added=("a",), deleted=("a",))
    cs = ChangeSet(added=("a",), modified=("b",), deleted=("c",))
    assert not cs.empty
    assert ChangeSet().empty
