"""Source-code analysis: parsing, metrics, serializations, hashes, function
extraction, comment stripping, and test/boilerplate heuristics.

All operations are pure functions of their inputs and safe to call from many
threads; SyntaxTree handles are cheap per-worker values, not shared state.
"""

from .backend import (DEFAULT_MAX_BYTES, FileTooLargeError, parse_source,
                      parser_version, register_backend)
from .comments import TransformOnErrorTreeError, strip_comments
from .functions import FunctionSpan, extract_functions
from .heuristics import is_boilerplate, is_test_file
from .ops import (InstanceMetrics, ast_to_sexp, ast_to_xml, compute_metrics,
                  content_hash, count_lines, structural_hash)
from .pipeline import analyze_source_file
from .tree import Node, SyntaxTree, subtree_view

__all__ = [
    "DEFAULT_MAX_BYTES", "FileTooLargeError", "FunctionSpan",
    "InstanceMetrics", "Node", "SyntaxTree", "TransformOnErrorTreeError",
    "analyze_source_file", "ast_to_sexp", "ast_to_xml", "compute_metrics",
    "content_hash", "count_lines", "extract_functions", "is_boilerplate",
    "is_test_file", "parse_source", "parser_version", "register_backend",
    "strip_comments", "structural_hash", "subtree_view",
]
