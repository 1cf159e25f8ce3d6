"""Per-file analysis: parse once, derive the file instance plus one instance
per extracted function, with all metadata precomputed at both granularities.

Function metadata comes from the file tree's subtree rebased to the instance
(a bare Java method is not a valid compilation unit, so instances are never
re-parsed here); the attached Java doc comment extends the span and content
but stays outside the hashed/serialized subtree, which keeps both digests
independent of comment text.
"""

from __future__ import annotations

from ..model import CodeInstance, Granularity, Language, instance_id
from .backend import parse_source, parser_version
from .functions import extract_functions
from .heuristics import is_boilerplate, is_test_file
from .ops import ast_to_sexp, ast_to_xml, compute_metrics, content_hash, structural_hash
from .tree import SyntaxTree, subtree_view


def analyze_source_file(repo_name: str, path: str, content: str,
                        language: Language,
                        max_bytes: int | None = None) -> tuple[CodeInstance, list[CodeInstance]]:
    tree = parse_source(content, language, max_bytes=max_bytes)
    version = parser_version(language)
    test_flag = is_test_file(path)

    file_instance = _build_instance(
        tree, content, repo_name, path, Granularity.FILE,
        start_line=0, name=None, is_test=test_flag,
        is_boilerplate_flag=False, version=version,
    )

    functions: list[CodeInstance] = []
    for span in extract_functions(tree, content, language):
        view = subtree_view(tree, span.node, span.origin_offset, span.origin_point)
        boiler = is_boilerplate(span.instance_node, language, tree)
        functions.append(_build_instance(
            view, span.content, repo_name, path, Granularity.FUNCTION,
            start_line=span.start_line, name=span.name, is_test=test_flag,
            is_boilerplate_flag=boiler, version=version,
        ))
    return file_instance, functions


def _build_instance(tree: SyntaxTree, content: str, repo_name: str, path: str,
                    granularity: Granularity, start_line: int,
                    name: str | None, is_test: bool, is_boilerplate_flag: bool,
                    version: str) -> CodeInstance:
    metrics = compute_metrics(tree, content)
    end_line = start_line + metrics.lines - 1
    chash = content_hash(tree, content)
    return CodeInstance(
        id=instance_id(repo_name, path, granularity, start_line, end_line,
                       name, chash),
        repo_name=repo_name,
        path=path,
        granularity=granularity,
        name=name,
        start_line=start_line,
        end_line=end_line,
        content=content,
        lines=metrics.lines,
        tokens=metrics.tokens,
        characters=metrics.characters,
        has_syntax_errors=metrics.has_syntax_errors,
        has_non_ascii=metrics.has_non_ascii,
        is_test=is_test,
        is_boilerplate=is_boilerplate_flag,
        content_hash=chash,
        structural_hash=structural_hash(tree),
        ast_xml=ast_to_xml(tree),
        sexp=ast_to_sexp(tree),
        parser_version=version,
    )
