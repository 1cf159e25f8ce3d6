"""Independent brute-force oracles the production paths are checked against.

These deliberately re-derive semantics from first principles (linear scans,
group-by, a standalone mini-lexer) instead of reusing the store's SQL
compiler or the engine's streaming dedup.
"""

from __future__ import annotations

import random
import sqlite3
import zlib
from pathlib import Path

from codemine.model import Dedup, FilterSpec, Granularity, Language


def dump_rows(store_path: str | Path) -> dict:
    """Raw store contents as plain dicts (decompressed), for oracles and
    record-identity comparisons."""
    conn = sqlite3.connect(str(store_path))
    conn.row_factory = sqlite3.Row
    repos = {}
    for row in conn.execute("SELECT * FROM repositories"):
        repos[row["name"]] = dict(row)
    instances = []
    for row in conn.execute("SELECT * FROM instances"):
        d = dict(row)
        d["ast_xml"] = zlib.decompress(d["ast_xml"]).decode("utf-8")
        d["sexp"] = zlib.decompress(d["sexp"]).decode("utf-8")
        instances.append(d)
    conn.close()
    instances.sort(key=lambda d: (d["repo_name"], d["path"], d["start_line"], d["id"]))
    return {"repos": repos, "instances": instances}


def oracle_matches(dump: dict, spec: FilterSpec) -> list[dict]:
    """Linear-scan filter mirroring the documented predicate semantics."""
    out = []
    for inst in dump["instances"]:
        repo = dump["repos"][inst["repo_name"]]
        if spec.language is None or repo["language"] != spec.language.value:
            continue
        if inst["granularity"] != spec.granularity.value:
            continue
        ok = True
        for metric in ("commits", "issues", "stars", "contributors"):
            lo = getattr(spec, f"repo_min_{metric}")
            hi = getattr(spec, f"repo_max_{metric}")
            if lo is not None and repo[metric] < lo:
                ok = False
            if hi is not None and repo[metric] > hi:
                ok = False
        if spec.require_license and repo["license"] is None:
            ok = False
        if spec.exclude_forks and repo["is_fork"]:
            ok = False
        for metric in ("characters", "tokens", "lines"):
            lo = getattr(spec, f"instance_min_{metric}")
            hi = getattr(spec, f"instance_max_{metric}")
            if lo is not None and inst[metric] < lo:
                ok = False
            if hi is not None and inst[metric] > hi:
                ok = False
        if spec.exclude_test and inst["is_test"]:
            ok = False
        if spec.exclude_syntax_errors and inst["has_syntax_errors"]:
            ok = False
        if spec.exclude_non_ascii and inst["has_non_ascii"]:
            ok = False
        if spec.exclude_boilerplate and inst["is_boilerplate"]:
            ok = False
        if ok:
            out.append(inst)
    return out  # dump is already in (repo, path, start_line, id) order


def oracle_dedup(matches: list[dict], dedup: Dedup) -> list[dict]:
    """Group by hash, keep the first in stream order."""
    if dedup is Dedup.NONE:
        return list(matches)
    key = "content_hash" if dedup is Dedup.EXACT else "structural_hash"
    seen: set[str] = set()
    out = []
    for inst in matches:
        if inst[key] in seen:
            continue
        seen.add(inst[key])
        out.append(inst)
    return out


def random_valid_spec(rng: random.Random) -> FilterSpec:
    """Random FilterSpec landing in interesting regions of the fixture corpus."""
    def bound(max_value: int) -> int | None:
        return rng.choice([None, rng.randint(0, max_value)])

    def pair(max_value: int) -> tuple[int | None, int | None]:
        lo, hi = bound(max_value), bound(max_value)
        if lo is not None and hi is not None and lo > hi:
            lo, hi = hi, lo
        return lo, hi

    granularity = rng.choice(list(Granularity))
    min_c, max_c = pair(600)
    min_t, max_t = pair(260)
    min_l, max_l = pair(60)
    min_commits, max_commits = pair(300)
    min_stars, max_stars = pair(520)
    min_issues, max_issues = pair(30)
    min_contrib, max_contrib = pair(25)
    return FilterSpec(
        language=rng.choice(list(Language)),
        granularity=granularity,
        repo_min_commits=min_commits, repo_max_commits=max_commits,
        repo_min_stars=min_stars, repo_max_stars=max_stars,
        repo_min_issues=min_issues, repo_max_issues=max_issues,
        repo_min_contributors=min_contrib, repo_max_contributors=max_contrib,
        require_license=rng.random() < 0.3,
        exclude_forks=rng.random() < 0.3,
        instance_min_characters=min_c, instance_max_characters=max_c,
        instance_min_tokens=min_t, instance_max_tokens=max_t,
        instance_min_lines=min_l, instance_max_lines=max_l,
        exclude_test=rng.random() < 0.4,
        exclude_syntax_errors=rng.random() < 0.4,
        exclude_non_ascii=rng.random() < 0.3,
        exclude_boilerplate=(granularity is Granularity.FUNCTION
                             and rng.random() < 0.4),
        dedup=rng.choice(list(Dedup)),
    )


def java_token_texts(source: str) -> list[str]:
    """Standalone mini-lexer for the content-hash oracle: Java token texts
    with comments and whitespace discarded."""
    out = []
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        if c.isspace():
            i += 1
            continue
        if source.startswith("//", i):
            j = source.find("\n", i)
            i = n if j == -1 else j
            continue
        if source.startswith("/*", i):
            j = source.find("*/", i + 2)
            i = n if j == -1 else j + 2
            continue
        if c == '"' or c == "'":
            j = i + 1
            while j < n and source[j] != c:
                j += 2 if source[j] == "\\" else 1
            out.append(source[i:j + 1])
            i = j + 1
            continue
        if c.isalnum() or c in "_$":
            j = i
            while j < n and (source[j].isalnum() or source[j] in "_$."):
                if source[j] == "." and not (j + 1 < n and source[j + 1].isdigit()):
                    break
                j += 1
            out.append(source[i:j])
            i = j
            continue
        out.append(c)
        i += 1
    return out
