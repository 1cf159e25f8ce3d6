"""Repository ingestion and synchronization.

Manifests replace a live repository-search service: JSON Lines from a local
file or HTTP endpoint, one entry per repository. Crawling shallow-clones the
latest snapshot, fans per-file analysis out to a bounded worker pool
(default 8), and keeps stored code aligned with upstream by diffing the last
analyzed commit against the new head; force-pushed history falls back to a
full re-crawl.
"""

from __future__ import annotations

import json
import logging
import shutil
import subprocess
import tempfile
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import timedelta
from pathlib import Path
from typing import Optional

from .analyzer import DEFAULT_MAX_BYTES, analyze_source_file
from .model import (ChangeSet, Language, ManifestEntry, RepositoryMeta,
                    parse_timestamp)
from .store import StoreHandle

log = logging.getLogger(__name__)

EXTENSIONS = {Language.JAVA: ".java", Language.PYTHON: ".py"}

DEFAULT_POOL_SIZE = 8


class CrawlerError(Exception):
    code = "crawler-error"


class SourceUnreachableError(CrawlerError):
    code = "source-unreachable"


class MalformedManifestError(CrawlerError):
    code = "malformed-manifest"


class CloneError(CrawlerError):
    code = "clone-failed"


class EmptyRepositoryError(CrawlerError):
    code = "empty-repository"


class FetchError(CrawlerError):
    code = "fetch-failed"


@dataclass
class PassSummary:
    new_repos: int = 0
    updated: int = 0
    skipped: int = 0
    failures: list[tuple[str, str]] = field(default_factory=list)


@dataclass
class AnalysisResult:
    files: int = 0
    functions: int = 0
    skipped_files: list[str] = field(default_factory=list)


# --- manifests ----------------------------------------------------------------

def ingest_manifest(source: str) -> list[ManifestEntry]:
    """Parse a JSONL manifest from a file path or HTTP URL.

    Invalid lines are skipped with a logged count; more than 50% bad lines is
    a malformed manifest. Entries come back oldest-first by last_pushed.
    """
    if source.startswith(("http://", "https://")):
        try:
            with urllib.request.urlopen(source, timeout=30) as resp:
                raw = resp.read().decode("utf-8")
        except Exception as e:
            raise SourceUnreachableError(f"cannot fetch manifest {source}: {e}") from e
    else:
        try:
            raw = Path(source).read_text(encoding="utf-8")
        except OSError as e:
            raise SourceUnreachableError(f"cannot read manifest {source}: {e}") from e
    entries: list[ManifestEntry] = []
    bad = 0
    lines = [ln for ln in raw.splitlines() if ln.strip()]
    for ln in lines:
        try:
            obj = json.loads(ln)
            entries.append(ManifestEntry(
                name=obj["name"],
                language=Language(obj["language"]),
                clone_url=obj["clone_url"],
                last_pushed=parse_timestamp(obj["last_pushed"]),
                license=obj.get("license"),
                is_fork=bool(obj.get("is_fork", False)),
                commits=int(obj.get("commits", 0)),
                issues=int(obj.get("issues", 0)),
                stars=int(obj.get("stars", 0)),
                contributors=int(obj.get("contributors", 0)),
            ))
        except (KeyError, ValueError, TypeError) as e:
            bad += 1
            log.warning("skipping malformed manifest line: %s", e)
    if lines and bad * 2 > len(lines):
        raise MalformedManifestError(f"{bad}/{len(lines)} manifest lines failed to parse")
    if bad:
        log.info("manifest %s: skipped %d invalid lines", source, bad)
    entries.sort(key=lambda e: (e.last_pushed, e.name))
    return entries


# --- git plumbing ----------------------------------------------------------------

def _git(args: list[str], cwd: Optional[str] = None) -> str:
    proc = subprocess.run(["git", *args], cwd=cwd, capture_output=True,
                          text=True)
    if proc.returncode != 0:
        raise CrawlerError(f"git {' '.join(args[:2])} failed: {proc.stderr.strip()}")
    return proc.stdout.strip()


def _clone_url(url: str) -> str:
    # local paths go through the file transport so shallow options apply
    p = Path(url)
    if "://" not in url and p.is_absolute():
        return p.as_uri()
    return url


def _head_info(worktree: str) -> tuple[str, str]:
    sha = _git(["rev-parse", "HEAD"], cwd=worktree)
    date = _git(["log", "-1", "--format=%aI"], cwd=worktree)
    return sha, date


def clone_shallow(entry: ManifestEntry | RepositoryMeta,
                  workdir: str | Path) -> tuple[str, str, str]:
    """Shallow-clone only the latest snapshot; returns (worktree, sha, date)."""
    dest = tempfile.mkdtemp(prefix="clone-", dir=str(workdir))
    try:
        _git(["clone", "--quiet", "--depth", "1", _clone_url(entry.clone_url), dest])
    except CrawlerError as e:
        shutil.rmtree(dest, ignore_errors=True)
        raise CloneError(f"clone of {entry.name} failed: {e}") from e
    try:
        sha, date = _head_info(dest)
    except CrawlerError as e:
        shutil.rmtree(dest, ignore_errors=True)
        raise EmptyRepositoryError(f"{entry.name} has no commits") from e
    return dest, sha, date


def _clone_since(meta: RepositoryMeta, workdir: str | Path) -> str:
    """Clone history from the last recorded commit date up to the new head."""
    assert meta.last_commit_date is not None
    since = (meta.last_commit_date - timedelta(seconds=1)).isoformat()
    dest = tempfile.mkdtemp(prefix="update-", dir=str(workdir))
    try:
        _git(["clone", "--quiet", f"--shallow-since={since}",
              _clone_url(meta.clone_url), dest])
        return dest
    except CrawlerError:
        shutil.rmtree(dest, ignore_errors=True)
    # rewritten or sparse history: take the latest snapshot instead
    dest = tempfile.mkdtemp(prefix="update-", dir=str(workdir))
    try:
        _git(["clone", "--quiet", "--depth", "1", _clone_url(meta.clone_url), dest])
        return dest
    except CrawlerError as e:
        shutil.rmtree(dest, ignore_errors=True)
        raise FetchError(f"fetch for {meta.name} failed: {e}") from e


# --- analysis ----------------------------------------------------------------

def _code_files(worktree: str, language: Language) -> list[Path]:
    ext = EXTENSIONS[language]
    root = Path(worktree)
    out = []
    for p in sorted(root.rglob(f"*{ext}")):
        if ".git" in p.relative_to(root).parts:
            continue
        if p.is_file():
            out.append(p)
    return out


def _analyze_one(store: StoreHandle, meta: RepositoryMeta, root: Path,
                 path: Path, max_bytes: int) -> Optional[int]:
    """Analyze and upsert one file; returns its function count, None if skipped."""
    rel = path.relative_to(root).as_posix()
    try:
        if path.stat().st_size > max_bytes:
            log.info("skipping %s/%s: exceeds size cap", meta.name, rel)
            return None
        content = path.read_bytes().decode("utf-8")
    except (OSError, UnicodeDecodeError) as e:
        log.warning("skipping %s/%s: %s", meta.name, rel, e)
        return None
    try:
        file_inst, functions = analyze_source_file(
            meta.name, rel, content, meta.language, max_bytes=max_bytes)
        store.upsert_file(file_inst, functions)
        return len(functions)
    except Exception as e:
        log.warning("analysis failed for %s/%s: %s", meta.name, rel, e)
        return None


def analyze_repository(worktree: str, meta: RepositoryMeta, store: StoreHandle,
                       pool_size: int = DEFAULT_POOL_SIZE,
                       max_bytes: int = DEFAULT_MAX_BYTES,
                       paths: Optional[list[str]] = None) -> AnalysisResult:
    """Analyze every matching file (or just ``paths``) with a bounded pool.

    Per-file failures are logged and skipped; the stored result is identical
    for any pool size because instance identity is content-derived.
    """
    root = Path(worktree)
    if paths is None:
        files = _code_files(worktree, meta.language)
    else:
        ext = EXTENSIONS[meta.language]
        files = [root / p for p in paths if p.endswith(ext) and (root / p).is_file()]
    result = AnalysisResult()
    if not files:
        return result
    with ThreadPoolExecutor(max_workers=max(1, pool_size)) as pool:
        outcomes = list(pool.map(
            lambda p: (p, _analyze_one(store, meta, root, p, max_bytes)), files))
    for path, fn_count in outcomes:
        if fn_count is None:
            result.skipped_files.append(path.relative_to(root).as_posix())
        else:
            result.files += 1
            result.functions += fn_count
    return result


# --- incremental updates ----------------------------------------------------------

def update_repository(meta: RepositoryMeta, store: StoreHandle,
                      workdir: str | Path,
                      pool_size: int = DEFAULT_POOL_SIZE,
                      max_bytes: int = DEFAULT_MAX_BYTES) -> ChangeSet:
    """Advance a stored repository to the upstream head.

    Diffs old_sha..new head and applies deletions/re-analysis; if the old
    commit is gone (force push or shallow boundary) the repository is wiped
    and re-analyzed in full.
    """
    if not meta.last_commit_sha:
        raise ValueError("update requires a previously crawled repository")
    worktree = _clone_since(meta, workdir)
    try:
        new_sha, new_date = _head_info(worktree)
        if new_sha == meta.last_commit_sha:
            return ChangeSet(old_sha=meta.last_commit_sha, new_sha=new_sha)
        old_present = subprocess.run(
            ["git", "cat-file", "-e", f"{meta.last_commit_sha}^{{commit}}"],
            cwd=worktree, capture_output=True).returncode == 0
        ext = EXTENSIONS[meta.language]
        if not old_present:
            log.info("%s: old head %s unavailable, full re-crawl",
                     meta.name, meta.last_commit_sha[:12])
            store.delete_repository_instances(meta.name)
            analyze_repository(worktree, meta, store, pool_size, max_bytes)
            added = tuple(p.relative_to(worktree).as_posix()
                          for p in _code_files(worktree, meta.language))
            changes = ChangeSet(added=added, old_sha=meta.last_commit_sha,
                                new_sha=new_sha)
        else:
            diff = _git(["diff", "--name-status", "--no-renames",
                         meta.last_commit_sha, new_sha], cwd=worktree)
            added, modified, deleted = [], [], []
            for line in diff.splitlines():
                status, _, path = line.partition("\t")
                if status.startswith("A"):
                    added.append(path)
                elif status.startswith("M"):
                    modified.append(path)
                elif status.startswith("D"):
                    deleted.append(path)
            for path in deleted:
                if path.endswith(ext):
                    store.delete_file(meta.name, path)
            to_analyze = [p for p in added + modified if p.endswith(ext)]
            analyze_repository(worktree, meta, store, pool_size, max_bytes,
                               paths=to_analyze)
            changes = ChangeSet(added=tuple(added), modified=tuple(modified),
                                deleted=tuple(deleted),
                                old_sha=meta.last_commit_sha, new_sha=new_sha)
        store.upsert_repository(meta.with_sync(new_sha, parse_timestamp(new_date)))
        return changes
    finally:
        shutil.rmtree(worktree, ignore_errors=True)


def crawl_repository(entry: ManifestEntry, store: StoreHandle,
                     workdir: str | Path,
                     pool_size: int = DEFAULT_POOL_SIZE,
                     max_bytes: int = DEFAULT_MAX_BYTES) -> AnalysisResult:
    """First-time crawl: shallow clone, register, analyze."""
    worktree, sha, date = clone_shallow(entry, workdir)
    try:
        meta = entry.to_meta().with_sync(sha, parse_timestamp(date))
        store.upsert_repository(meta)
        return analyze_repository(worktree, meta, store, pool_size, max_bytes)
    finally:
        shutil.rmtree(worktree, ignore_errors=True)


def crawl_pass(manifest_source: str, store: StoreHandle, workdir: str | Path,
               pool_size: int = DEFAULT_POOL_SIZE,
               max_bytes: int = DEFAULT_MAX_BYTES,
               update_only: bool = False) -> PassSummary:
    """One pass over the manifest: new repositories are cloned and analyzed,
    stale ones updated, current ones skipped. Individual failures never abort
    the pass."""
    summary = PassSummary()
    entries = ingest_manifest(manifest_source)
    for entry in entries:
        try:
            stored = store.get_repository(entry.name)
            if stored is None:
                if update_only:
                    summary.skipped += 1
                    continue
                with store.repo_write_lock(entry.name):
                    crawl_repository(entry, store, workdir, pool_size, max_bytes)
                summary.new_repos += 1
            elif (stored.last_commit_date is None
                  or entry.last_pushed > stored.last_commit_date):
                merged = entry.to_meta().with_sync(
                    stored.last_commit_sha, stored.last_commit_date)
                with store.repo_write_lock(entry.name):
                    update_repository(merged, store, workdir, pool_size, max_bytes)
                summary.updated += 1
            else:
                summary.skipped += 1
        except Exception as e:
            log.error("crawl of %s failed: %s", entry.name, e)
            summary.failures.append((entry.name, str(e)))
    log.info("crawl pass: %d new, %d updated, %d skipped, %d failures",
             summary.new_repos, summary.updated, summary.skipped,
             len(summary.failures))
    return summary
