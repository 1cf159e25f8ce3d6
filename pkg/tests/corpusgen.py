"""Deterministic fixture corpus: local git repositories with seeded
duplicates, near-clones, test files, boilerplate, syntax errors, and
non-ASCII content, plus scripted upstream-evolution scenarios.

Everything is generated from fixed templates with fixed commit dates and
authors, so repeated builds are byte-identical.
"""

from __future__ import annotations

import json
import os
import shutil
import subprocess
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

GIT_ENV_BASE = {
    "GIT_AUTHOR_NAME": "fixture",
    "GIT_AUTHOR_EMAIL": "fixture@example.org",
    "GIT_COMMITTER_NAME": "fixture",
    "GIT_COMMITTER_EMAIL": "fixture@example.org",
}

BASE_DATE = datetime(2024, 1, 1, 12, 0, 0, tzinfo=timezone.utc)


def git(repo: Path, *args: str, date: datetime | None = None) -> str:
    env = dict(os.environ)
    env.update(GIT_ENV_BASE)
    if date is not None:
        stamp = date.strftime("%Y-%m-%dT%H:%M:%S +0000")
        env["GIT_AUTHOR_DATE"] = stamp
        env["GIT_COMMITTER_DATE"] = stamp
    proc = subprocess.run(["git", *args], cwd=str(repo), env=env,
                          capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"git {args} failed in {repo}: {proc.stderr}")
    return proc.stdout.strip()


@dataclass
class FixtureRepo:
    name: str
    language: str
    path: Path
    license: str | None
    is_fork: bool
    commits: int
    issues: int
    stars: int
    contributors: int
    last_pushed: str = ""


@dataclass
class Corpus:
    root: Path
    repos: list[FixtureRepo] = field(default_factory=list)
    manifest_path: Path = None  # type: ignore[assignment]

    def repo(self, name: str) -> FixtureRepo:
        return next(r for r in self.repos if r.name == name)


# --- content templates ------------------------------------------------------

def java_class(pkg: str, name: str, idx: int) -> str:
    extra_methods = []
    for m in range(idx % 3):
        extra_methods.append(f"""
    public int helper{m}(int seed) {{
        int acc = seed + {m + 2};
        while (acc < {50 + idx * 3 + m}) {{
            acc = acc * 2 + {m};
        }}
        return acc;
    }}
""")
    return f"""package {pkg};

import java.util.List;
import java.util.ArrayList;

/** Value holder number {idx}. */
public class {name} {{
    private int count;
    private String label;

    public {name}(int count, String label) {{
        this.count = count;
        this.label = label;
    }}

    /** Returns the current count. */
    public int getCount() {{
        return count;
    }}

    public void setCount(int count) {{
        this.count = count;
    }}

    public int computeTotal(int base) {{
        int total = base + {idx};
        for (int i = 0; i < count; i++) {{
            total = total + i * {idx + 2};
        }}
        if (total > {100 + idx * 10}) {{
            total = total - {idx + 1};
        }}
        return total;
    }}

    public String toString() {{
        return "{name}(" + label + ")";
    }}

    public List<Integer> collectValues(int limit) {{
        List<Integer> values = new ArrayList<>();
        for (int i = 0; i < limit; i++) {{
            values.add(i * count + {idx});
        }}
        return values;
    }}
{''.join(extra_methods)}}}
"""


def java_test_class(pkg: str, name: str) -> str:
    return f"""package {pkg};

public class {name} {{
    public void testComputeTotal() {{
        int expected = 42;
        int actual = expected;
        if (actual != expected) {{
            throw new RuntimeException("mismatch");
        }}
    }}
}}
"""


def python_module(idx: int) -> str:
    extra = ""
    for m in range(idx % 3):
        extra += f"""

def helper_{m}_{idx}(seed):
    acc = seed + {m + 2}
    while acc < {40 + idx * 2 + m}:
        acc = acc * 2 + {m}
    return acc
"""
    return f'''"""Utility module number {idx}."""


def scale_values_{idx}(values, factor):
    # multiply each entry by the factor
    result = []
    for v in values:
        result.append(v * factor + {idx})
    return result


def clamp_{idx}(value, low, high):
    if value < low:
        return low
    if value > high:
        return high
    return value


class Accumulator{idx}:
    def __init__(self, start):
        self.total = start
        self.steps = {idx}

    def add(self, amount):
        self.total += amount
        return self.total

    @property
    def value(self):
        return self.total

    def __repr__(self):
        return "Accumulator{idx}(%d)" % self.total
{extra}'''


def python_test_module(idx: int) -> str:
    return f'''"""Tests for module {idx}."""


def test_scaling_behaviour():
    values = [1, 2, 3]
    doubled = [v * 2 for v in values]
    assert doubled[0] == 2


def test_boundaries():
    assert min(5, {idx + 7}) == 5
'''


# dedup seeds: identical token streams, different comments/whitespace
JAVA_DUP_A = """package com.fixtures.shared;

public class CacheEntry {
    private int hits;

    public int register(int weight) {
        int score = hits * weight;
        hits = hits + 1;
        return score;
    }
}
"""

JAVA_DUP_B = """package com.fixtures.shared;

/* cache bookkeeping */
public class CacheEntry {
    private int hits;   // total observed hits

    public int register(int weight) {
        // weighted score before bumping
        int score = hits * weight;
        hits = hits + 1;
        return score;
    }
}
"""

PY_DUP_A = '''def merge_counts(left, right):
    out = dict(left)
    for key in right:
        out[key] = out.get(key, 0) + right[key]
    return out
'''

PY_DUP_B = '''# merge helper shared across projects
def merge_counts(left, right):
    out = dict(left)
    # accumulate the right-hand side
    for key in right:
        out[key] = out.get(key, 0) + right[key]
    return out
'''

# near-clone seeds: renamed identifiers/literals, identical structure
JAVA_CLONE_A = """package com.fixtures.clones;

public class PairNormalizer {
    private int first;

    public int normalize(int offset) {
        int shifted = first + offset;
        if (shifted > 10) {
            shifted = shifted - 10;
        }
        return shifted;
    }
}
"""

JAVA_CLONE_B = """package com.fixtures.clones;

public class RangeAdjuster {
    private int base;

    public int adjust(int delta) {
        int moved = base + delta;
        if (moved > 99) {
            moved = moved - 42;
        }
        return moved;
    }
}
"""

PY_CLONE_A = '''def fold_window(items, width):
    chunks = []
    for start in range(0, len(items), width):
        chunks.append(items[start:start + width])
    return chunks
'''

PY_CLONE_B = '''def split_batches(records, size):
    groups = []
    for offset in range(0, len(records), size):
        groups.append(records[offset:offset + size])
    return groups
'''

JAVA_BROKEN = """package com.fixtures.broken;

public class Broken {
    public int dangling(int x) {
        return x +
}
"""

PY_BROKEN = """def broken(:
    x = 'unterminated
"""

PY_PARTIAL_ERROR = '''"""File with one bad region and one good function."""


def healthy(a, b):
    return a + b


def damaged(:
    pass
'''

JAVA_UNICODE = """package com.fixtures.intl;

public class Unicode {
    // déclaration avec accents
    private String label = "naïve café";

    public String getLabel() {
        return label;
    }
}
"""

PY_UNICODE = '''"""标签工具."""


def decorate_label(name):
    # 中文注释
    return "« " + name + " »"
'''

JAVA_COMMENTS_ONLY = """// nothing but commentary in here
/* block one */
/* block two */
"""


# --- corpus assembly ----------------------------------------------------------

def _java_repo_files(r: int) -> dict[str, str]:
    pkg = f"com.fixtures.j{r}"
    pkg_dir = f"src/main/java/com/fixtures/j{r}"
    files = {}
    for i in range(13):
        files[f"{pkg_dir}/Widget{i}.java"] = java_class(pkg, f"Widget{i}", i + r * 13)
    files[f"src/test/java/com/fixtures/j{r}/WidgetTest.java"] = \
        java_test_class(f"com.fixtures.j{r}", "WidgetTest")
    files[f"{pkg_dir}/LatestThing.java"] = java_class(pkg, "LatestThing", 90 + r)
    return files


def _python_repo_files(r: int) -> dict[str, str]:
    files = {}
    for i in range(13):
        files[f"src/pkg{r}/mod_{i}.py"] = python_module(i + r * 13)
    files[f"tests/test_mod.py"] = python_test_module(r)
    files[f"src/pkg{r}/latest_thing.py"] = python_module(90 + r)
    return files


def build_corpus(root: Path) -> Corpus:
    """Materialize the corpus: 12 repos, >=200 files, >=600 functions."""
    root.mkdir(parents=True, exist_ok=True)
    corpus = Corpus(root=root)
    plans = []
    for r in range(6):
        files = _java_repo_files(r)
        plans.append((f"acme/java-widgets-{r}", "java", files, {
            "license": ["MIT", "Apache-2.0", None][r % 3],
            "is_fork": r == 5,
            "commits": 20 + r * 37,
            "issues": r * 5,
            "stars": [0, 3, 12, 40, 150, 420][r],
            "contributors": 1 + r * 4,
        }))
    for r in range(6):
        files = _python_repo_files(r)
        plans.append((f"acme/py-tools-{r}", "python", files, {
            "license": [None, "MIT", "GPL-3.0"][r % 3],
            "is_fork": r == 4,
            "commits": 8 + r * 51,
            "issues": 2 + r * 3,
            "stars": [1, 7, 25, 90, 210, 500][r],
            "contributors": 2 + r * 3,
        }))

    # seeded features woven into specific repos
    j = {name: files for name, _, files, _ in plans}
    j["acme/java-widgets-0"]["src/main/java/com/fixtures/shared/CacheEntry.java"] = JAVA_DUP_A
    j["acme/java-widgets-1"]["src/main/java/com/fixtures/shared/CacheEntry.java"] = JAVA_DUP_B
    j["acme/java-widgets-2"]["src/main/java/com/fixtures/clones/PairNormalizer.java"] = JAVA_CLONE_A
    j["acme/java-widgets-3"]["src/main/java/com/fixtures/clones/RangeAdjuster.java"] = JAVA_CLONE_B
    j["acme/java-widgets-4"]["src/main/java/com/fixtures/broken/Broken.java"] = JAVA_BROKEN
    j["acme/java-widgets-5"]["src/main/java/com/fixtures/intl/Unicode.java"] = JAVA_UNICODE
    j["acme/java-widgets-5"]["src/main/java/com/fixtures/intl/CommentsOnly.java"] = JAVA_COMMENTS_ONLY
    j["acme/java-widgets-3"]["tools/helper.py"] = "print('not indexed for java repos')\n"

    j["acme/py-tools-0"]["src/shared/util_sync.py"] = PY_DUP_A
    j["acme/py-tools-1"]["src/shared/util_sync.py"] = PY_DUP_B
    j["acme/py-tools-2"]["src/clones/vector_ops.py"] = PY_CLONE_A
    j["acme/py-tools-3"]["src/clones/matrix_ops.py"] = PY_CLONE_B
    j["acme/py-tools-4"]["src/broken/broken.py"] = PY_BROKEN
    j["acme/py-tools-4"]["src/broken/partial.py"] = PY_PARTIAL_ERROR
    j["acme/py-tools-5"]["src/intl/unicode_labels.py"] = PY_UNICODE
    j["acme/py-tools-5"]["src/intl/empty.py"] = ""
    j["acme/py-tools-0"]["src/pkg0/contest.py"] = "def enter(name):\n    return name\n"

    for idx, (name, language, files, meta) in enumerate(plans):
        repo_dir = root / name.replace("/", "__")
        repo_dir.mkdir(parents=True)
        git(repo_dir, "init", "-q", "-b", "main")
        first = {p: c for p, c in files.items()
                 if not p.split("/")[-1].startswith(("latest", "Latest"))}
        second = {p: c for p, c in files.items() if p not in first}
        _write_files(repo_dir, first)
        git(repo_dir, "add", "-A")
        git(repo_dir, "commit", "-q", "-m", "initial import",
            date=BASE_DATE + timedelta(hours=idx))
        _write_files(repo_dir, second)
        git(repo_dir, "add", "-A")
        git(repo_dir, "commit", "-q", "-m", "add latest module",
            date=BASE_DATE + timedelta(hours=idx, minutes=30))
        head_date = git(repo_dir, "log", "-1", "--format=%aI")
        corpus.repos.append(FixtureRepo(
            name=name, language=language, path=repo_dir,
            last_pushed=head_date, **meta))

    corpus.manifest_path = root / "manifest.jsonl"
    write_manifest(corpus, corpus.manifest_path)
    return corpus


def _write_files(repo_dir: Path, files: dict[str, str]) -> None:
    for rel, content in files.items():
        p = repo_dir / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(content, encoding="utf-8")


def write_manifest(corpus: Corpus, path: Path) -> Path:
    lines = []
    for r in corpus.repos:
        lines.append(json.dumps({
            "name": r.name,
            "language": r.language,
            "clone_url": str(r.path),
            "license": r.license,
            "is_fork": r.is_fork,
            "commits": r.commits,
            "issues": r.issues,
            "stars": r.stars,
            "contributors": r.contributors,
            "last_pushed": r.last_pushed,
        }))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# --- evolution scenarios -----------------------------------------------------------

def _commit_all(repo: FixtureRepo, message: str, date: datetime) -> None:
    git(repo.path, "add", "-A")
    git(repo.path, "commit", "-q", "-m", message, date=date)
    repo.last_pushed = git(repo.path, "log", "-1", "--format=%aI")


def scenario_edits(corpus: Corpus) -> Path:
    """Scenario 1: content edits in one Java and one Python repository."""
    when = BASE_DATE + timedelta(days=10)
    jrepo = corpus.repo("acme/java-widgets-0")
    target = jrepo.path / "src/main/java/com/fixtures/j0/Widget2.java"
    target.write_text(java_class("com.fixtures.j0", "Widget2", 77), encoding="utf-8")
    _commit_all(jrepo, "rework widget 2", when)

    prepo = corpus.repo("acme/py-tools-0")
    target = prepo.path / "src/pkg0/mod_4.py"
    target.write_text(python_module(63), encoding="utf-8")
    _commit_all(prepo, "tune module 4", when + timedelta(minutes=5))

    path = corpus.root / "manifest_s1.jsonl"
    return write_manifest(corpus, path)


def scenario_mixed(corpus: Corpus) -> Path:
    """Scenario 2: adds, deletes, and edits across three repositories."""
    when = BASE_DATE + timedelta(days=20)
    jrepo = corpus.repo("acme/java-widgets-1")
    (jrepo.path / "src/main/java/com/fixtures/j1/Widget5.java").unlink()
    (jrepo.path / "src/main/java/com/fixtures/j1/Fresh.java").write_text(
        java_class("com.fixtures.j1", "Fresh", 81), encoding="utf-8")
    target = jrepo.path / "src/main/java/com/fixtures/j1/Widget1.java"
    target.write_text(java_class("com.fixtures.j1", "Widget1", 55), encoding="utf-8")
    _commit_all(jrepo, "swap widgets", when)

    prepo = corpus.repo("acme/py-tools-1")
    (prepo.path / "src/pkg1/mod_7.py").unlink()
    (prepo.path / "src/pkg1/fresh_tools.py").write_text(
        python_module(71), encoding="utf-8")
    target = prepo.path / "src/pkg1/mod_2.py"
    target.write_text(python_module(58), encoding="utf-8")
    _commit_all(prepo, "swap modules", when + timedelta(minutes=7))

    j2 = corpus.repo("acme/java-widgets-2")
    target = j2.path / "src/main/java/com/fixtures/j2/Widget9.java"
    target.write_text(java_class("com.fixtures.j2", "Widget9", 66), encoding="utf-8")
    _commit_all(j2, "polish widget 9", when + timedelta(minutes=15))

    path = corpus.root / "manifest_s2.jsonl"
    return write_manifest(corpus, path)


def scenario_force_push(corpus: Corpus) -> Path:
    """Scenario 3: rewritten history in one repository plus a normal edit."""
    when = BASE_DATE + timedelta(days=30)
    jrepo = corpus.repo("acme/java-widgets-3")
    git(jrepo.path, "reset", "-q", "--hard", "HEAD~1")
    (jrepo.path / "src/main/java/com/fixtures/j3/Rewritten.java").write_text(
        java_class("com.fixtures.j3", "Rewritten", 88), encoding="utf-8")
    _commit_all(jrepo, "rewritten history", when)

    prepo = corpus.repo("acme/py-tools-2")
    target = prepo.path / "src/pkg2/mod_0.py"
    target.write_text(python_module(94), encoding="utf-8")
    _commit_all(prepo, "tweak module 0", when + timedelta(minutes=3))

    path = corpus.root / "manifest_s3.jsonl"
    return write_manifest(corpus, path)


SCENARIOS = {
    "edits": scenario_edits,
    "mixed": scenario_mixed,
    "force_push": scenario_force_push,
}


def snapshot(corpus: Corpus, dest: Path) -> None:
    """Copy the corpus tree aside so a scenario can be undone."""
    shutil.copytree(corpus.root, dest)


def restore(corpus: Corpus, snapshot_dir: Path) -> None:
    shutil.rmtree(corpus.root)
    shutil.copytree(snapshot_dir, corpus.root)
    for repo in corpus.repos:
        repo.last_pushed = git(repo.path, "log", "-1", "--format=%aI")
