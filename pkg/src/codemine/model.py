"""Shared domain vocabulary: repository metadata, code instances, filter specs.

All types here are immutable values (frozen dataclasses) and safe to share
between threads. The FilterSpec JSON wire schema defined by ``to_wire`` /
``spec_from_wire`` is the contract shared with the dashboard and the CLI.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field, fields, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Optional

# Single fixed cryptographic hash for every digest in the platform
# (content hashes, structural hashes, instance ids). 256-bit, rendered
# as 64 lowercase hex chars.
DIGEST = hashlib.sha256

_SHA_RE = re.compile(r"^[0-9a-f]{40}$")
_NAME_RE = re.compile(r"^[^/\s]+/[^/\s]+$")


class Language(Enum):
    JAVA = "java"
    PYTHON = "python"


class Granularity(Enum):
    FILE = "file"
    FUNCTION = "function"


class Dedup(Enum):
    NONE = "none"
    EXACT = "exact"
    NEAR_CLONE = "near_clone"


class StripMode(Enum):
    NONE = "none"
    REGULAR = "regular"
    DOCUMENTATION = "documentation"
    BOTH = "both"


@dataclass(frozen=True)
class RepositoryMeta:
    """Identity plus repository-level filterable attributes and sync state.

    ``name`` ("owner/repo") is the primary key across the store.
    ``last_commit_sha`` is empty before the first crawl, otherwise exactly
    40 lowercase hex characters.
    """

    name: str
    language: Language
    clone_url: str
    license: Optional[str] = None
    is_fork: bool = False
    commits: int = 0
    issues: int = 0
    stars: int = 0
    contributors: int = 0
    last_commit_date: Optional[datetime] = None
    last_commit_sha: str = ""

    def __post_init__(self) -> None:
        if not _NAME_RE.match(self.name):
            raise ValueError(f"repository name must look like owner/repo: {self.name!r}")
        if self.last_commit_sha and not _SHA_RE.match(self.last_commit_sha):
            raise ValueError(f"last_commit_sha must be empty or 40 lowercase hex chars: {self.last_commit_sha!r}")
        for f in ("commits", "issues", "stars", "contributors"):
            if getattr(self, f) < 0:
                raise ValueError(f"{f} must be non-negative")

    def with_sync(self, sha: str, date: datetime) -> "RepositoryMeta":
        return replace(self, last_commit_sha=sha, last_commit_date=date)


@dataclass(frozen=True)
class CodeInstance:
    """One exportable unit of code: a whole file or a single function.

    Line indices are 0-based and ``end_line`` is inclusive, so
    ``lines == end_line - start_line + 1`` holds exactly (an empty file has
    lines=0 and end_line=-1). ``characters`` counts Unicode scalar values of
    ``content``. Function instances reference their file via
    ``(repo_name, path)`` and are the only granularity that may set
    ``is_boilerplate``.
    """

    id: str
    repo_name: str
    path: str
    granularity: Granularity
    start_line: int
    end_line: int
    content: str
    lines: int
    tokens: int
    characters: int
    has_syntax_errors: bool
    has_non_ascii: bool
    is_test: bool
    content_hash: str
    structural_hash: str
    ast_xml: str
    sexp: str
    parser_version: str
    name: Optional[str] = None
    is_boilerplate: bool = False

    def __post_init__(self) -> None:
        if self.lines != self.end_line - self.start_line + 1:
            raise ValueError(
                f"lines={self.lines} inconsistent with span "
                f"[{self.start_line},{self.end_line}] for {self.repo_name}/{self.path}"
            )
        if self.characters != len(self.content):
            raise ValueError("characters must equal the Unicode scalar count of content")
        if self.is_boilerplate and self.granularity is not Granularity.FUNCTION:
            raise ValueError("is_boilerplate implies function granularity")


def instance_id(repo_name: str, path: str, granularity: Granularity,
                start_line: int, end_line: int, name: Optional[str],
                content_hash: str) -> str:
    """Deterministic opaque instance id.

    Derived from identity fields so that re-analysis of identical content
    yields identical rows regardless of worker scheduling or crawl history.
    """
    h = DIGEST()
    for part in (repo_name, path, granularity.value, str(start_line),
                 str(end_line), name or "", content_hash):
        raw = part.encode("utf-8")
        h.update(str(len(raw)).encode("ascii"))
        h.update(b":")
        h.update(raw)
    return h.hexdigest()[:32]


# Bounded instance/repository metrics a FilterSpec can constrain.
REPO_METRICS = ("commits", "issues", "stars", "contributors")
INSTANCE_METRICS = ("characters", "tokens", "lines")


@dataclass(frozen=True)
class FilterSpec:
    """A dataset-construction request.

    Unset optional bounds mean "unbounded on that side"; all bounds are
    inclusive. ``language`` is mandatory (None only occurs for not-yet-valid
    form states and is rejected by :func:`validate_filter_spec`).
    """

    language: Optional[Language] = None
    repo_min_commits: Optional[int] = None
    repo_max_commits: Optional[int] = None
    repo_min_issues: Optional[int] = None
    repo_max_issues: Optional[int] = None
    repo_min_stars: Optional[int] = None
    repo_max_stars: Optional[int] = None
    repo_min_contributors: Optional[int] = None
    repo_max_contributors: Optional[int] = None
    require_license: bool = False
    exclude_forks: bool = False
    granularity: Granularity = Granularity.FILE
    instance_min_characters: Optional[int] = None
    instance_max_characters: Optional[int] = None
    instance_min_tokens: Optional[int] = None
    instance_max_tokens: Optional[int] = None
    instance_min_lines: Optional[int] = None
    instance_max_lines: Optional[int] = None
    exclude_test: bool = False
    exclude_syntax_errors: bool = False
    exclude_non_ascii: bool = False
    exclude_boilerplate: bool = False
    dedup: Dedup = Dedup.NONE
    strip_comments: StripMode = StripMode.NONE
    include_ast: bool = False
    include_sexp: bool = False
    include_parser_version: bool = False

    def to_wire(self) -> dict[str, Any]:
        """JSON wire form: snake_case field names, enum values as strings."""
        out: dict[str, Any] = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = v.value if isinstance(v, Enum) else v
        return out


@dataclass(frozen=True)
class Violation:
    """One violated FilterSpec constraint, with a machine-readable code."""

    code: str
    field: str
    message: str

    def to_wire(self) -> dict[str, str]:
        return {"code": self.code, "field": self.field, "message": self.message}


class SpecParseError(ValueError):
    """Raised when a wire payload cannot even be decoded into a FilterSpec."""

    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(v.message for v in violations))
        self.violations = violations


_ENUM_FIELDS = {
    "language": Language,
    "granularity": Granularity,
    "dedup": Dedup,
    "strip_comments": StripMode,
}
_BOOL_FIELDS = {
    "require_license", "exclude_forks", "exclude_test", "exclude_syntax_errors",
    "exclude_non_ascii", "exclude_boilerplate", "include_ast", "include_sexp",
    "include_parser_version",
}
_BOUND_FIELDS = tuple(
    [f"repo_min_{m}" for m in REPO_METRICS] + [f"repo_max_{m}" for m in REPO_METRICS]
    + [f"instance_min_{m}" for m in INSTANCE_METRICS]
    + [f"instance_max_{m}" for m in INSTANCE_METRICS]
)


def spec_from_wire(payload: Any) -> FilterSpec:
    """Parse the JSON wire form back into a FilterSpec.

    Raises SpecParseError listing every decode problem; constraint checking
    (min<=max etc.) is validate_filter_spec's job, not this function's.
    """
    problems: list[Violation] = []
    if not isinstance(payload, dict):
        raise SpecParseError([Violation("invalid-payload", "", "request body must be a JSON object")])
    known = {f.name for f in fields(FilterSpec)}
    kwargs: dict[str, Any] = {}
    for key, value in payload.items():
        if key not in known:
            problems.append(Violation("unknown-field", key, f"unknown field {key!r}"))
            continue
        if key in _ENUM_FIELDS:
            if value is None:
                kwargs[key] = None if key == "language" else value
                if key != "language":
                    problems.append(Violation("invalid-value", key, f"{key} must not be null"))
                continue
            enum_cls = _ENUM_FIELDS[key]
            try:
                kwargs[key] = enum_cls(value)
            except ValueError:
                allowed = ", ".join(e.value for e in enum_cls)
                problems.append(Violation("invalid-value", key, f"{key} must be one of: {allowed}"))
        elif key in _BOOL_FIELDS:
            if isinstance(value, bool):
                kwargs[key] = value
            else:
                problems.append(Violation("invalid-type", key, f"{key} must be a boolean"))
        elif key in _BOUND_FIELDS:
            if value is None:
                kwargs[key] = None
            elif isinstance(value, int) and not isinstance(value, bool) and value >= 0:
                kwargs[key] = value
            else:
                problems.append(Violation("invalid-type", key, f"{key} must be a non-negative integer or null"))
        else:
            raise AssertionError(f"unhandled field {key}")
    if problems:
        raise SpecParseError(sorted(problems, key=lambda v: v.field))
    return FilterSpec(**kwargs)


def validate_filter_spec(spec: FilterSpec) -> list[Violation]:
    """Check every FilterSpec invariant; empty result means the spec is ok.

    Pure: identical inputs yield identical violation lists, sorted by field
    name. Violations are data, not failures.
    """
    out: list[Violation] = []
    if spec.language is None:
        out.append(Violation("language-required", "language", "language is mandatory"))
    for prefix, metrics in (("repo", REPO_METRICS), ("instance", INSTANCE_METRICS)):
        for metric in metrics:
            lo = getattr(spec, f"{prefix}_min_{metric}")
            hi = getattr(spec, f"{prefix}_max_{metric}")
            if lo is not None and hi is not None and lo > hi:
                out.append(Violation(
                    "min-exceeds-max", f"{prefix}_{metric}",
                    f"{prefix}_min_{metric}={lo} exceeds {prefix}_max_{metric}={hi}",
                ))
    if spec.exclude_boilerplate and spec.granularity is not Granularity.FUNCTION:
        out.append(Violation(
            "boilerplate-requires-function", "exclude_boilerplate",
            "boilerplate exclusion is only applicable at function granularity",
        ))
    return sorted(out, key=lambda v: v.field)


@dataclass(frozen=True)
class ManifestEntry:
    """One candidate repository from an ingested manifest."""

    name: str
    language: Language
    clone_url: str
    last_pushed: datetime
    license: Optional[str] = None
    is_fork: bool = False
    commits: int = 0
    issues: int = 0
    stars: int = 0
    contributors: int = 0

    def __post_init__(self) -> None:
        if not self.clone_url:
            raise ValueError("clone_url must be non-empty")
        if not _NAME_RE.match(self.name):
            raise ValueError(f"manifest name must look like owner/repo: {self.name!r}")

    def to_meta(self) -> RepositoryMeta:
        return RepositoryMeta(
            name=self.name, language=self.language, clone_url=self.clone_url,
            license=self.license, is_fork=self.is_fork, commits=self.commits,
            issues=self.issues, stars=self.stars, contributors=self.contributors,
        )


@dataclass(frozen=True)
class ChangeSet:
    """File-level outcome of one repository update, as applied to the store."""

    added: tuple[str, ...] = ()
    modified: tuple[str, ...] = ()
    deleted: tuple[str, ...] = ()
    old_sha: str = ""
    new_sha: str = ""

    def __post_init__(self) -> None:
        a, m, d = set(self.added), set(self.modified), set(self.deleted)
        if a & m or a & d or m & d:
            raise ValueError("added/modified/deleted must be pairwise disjoint")

    @property
    def empty(self) -> bool:
        return not (self.added or self.modified or self.deleted)


def utc_now() -> datetime:
    return datetime.now(timezone.utc).replace(microsecond=0)


def parse_timestamp(raw: str) -> datetime:
    """Parse an ISO-8601 timestamp, normalizing to aware UTC."""
    dt = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)
