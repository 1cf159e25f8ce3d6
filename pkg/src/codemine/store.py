"""Persistent corpus store: repositories, file/function instances, tasks.

Reference embedded implementation on stdlib sqlite3 in WAL mode, which gives
the required read consistency: every streaming SELECT observes a stable
snapshot while writers proceed. Connections are per-thread; writers take
short per-file transactions, and per-repository write exclusivity is
enforced with in-process locks. AST and sexp strings are zlib-compressed at
rest and decompressed on read.
"""

from __future__ import annotations

import json
import logging
import sqlite3
import threading
import zlib
from datetime import datetime
from pathlib import Path
from typing import Iterator, Optional

from .model import (CodeInstance, FilterSpec, Granularity, Language,
                    RepositoryMeta, parse_timestamp)

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

_SCHEMA = """
CREATE TABLE IF NOT EXISTS meta (
    key TEXT PRIMARY KEY,
    value TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS repositories (
    name TEXT PRIMARY KEY,
    language TEXT NOT NULL,
    clone_url TEXT NOT NULL,
    license TEXT,
    is_fork INTEGER NOT NULL,
    commits INTEGER NOT NULL,
    issues INTEGER NOT NULL,
    stars INTEGER NOT NULL,
    contributors INTEGER NOT NULL,
    last_commit_date TEXT,
    last_commit_sha TEXT NOT NULL DEFAULT ''
);
CREATE TABLE IF NOT EXISTS instances (
    id TEXT PRIMARY KEY,
    repo_name TEXT NOT NULL,
    path TEXT NOT NULL,
    granularity TEXT NOT NULL,
    name TEXT,
    start_line INTEGER NOT NULL,
    end_line INTEGER NOT NULL,
    content TEXT NOT NULL,
    lines INTEGER NOT NULL,
    tokens INTEGER NOT NULL,
    characters INTEGER NOT NULL,
    has_syntax_errors INTEGER NOT NULL,
    has_non_ascii INTEGER NOT NULL,
    is_test INTEGER NOT NULL,
    is_boilerplate INTEGER NOT NULL,
    content_hash TEXT NOT NULL,
    structural_hash TEXT NOT NULL,
    ast_xml BLOB NOT NULL,
    sexp BLOB NOT NULL,
    parser_version TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS idx_instances_repo_path
    ON instances (repo_name, path);
CREATE INDEX IF NOT EXISTS idx_instances_stream
    ON instances (granularity, repo_name, path, start_line);
CREATE TABLE IF NOT EXISTS tasks (
    id TEXT PRIMARY KEY,
    seq INTEGER NOT NULL,
    spec_json TEXT NOT NULL,
    status TEXT NOT NULL,
    submitted_at TEXT NOT NULL,
    started_at TEXT,
    finished_at TEXT,
    estimated_total INTEGER,
    written INTEGER NOT NULL DEFAULT 0,
    output_path TEXT NOT NULL DEFAULT '',
    failure_reason TEXT
);
"""


class StoreError(Exception):
    pass


class SchemaMismatchError(StoreError):
    pass


class UnknownRepositoryError(StoreError):
    code = "unknown-repository"


class StoreHandle:
    """Thread-safe handle; one sqlite connection per thread, shared file."""

    def __init__(self, path: str | Path):
        self.path = str(path)
        self._local = threading.local()
        self._repo_locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self._seq_guard = threading.Lock()
        self._init_schema()

    # --- connection management -------------------------------------------
    def _conn(self) -> sqlite3.Connection:
        conn = getattr(self._local, "conn", None)
        if conn is None:
            conn = sqlite3.connect(self.path, timeout=30.0)
            conn.row_factory = sqlite3.Row
            conn.execute("PRAGMA journal_mode=WAL")
            conn.execute("PRAGMA synchronous=NORMAL")
            conn.execute("PRAGMA busy_timeout=30000")
            self._local.conn = conn
        return conn

    def _init_schema(self) -> None:
        conn = self._conn()
        row = conn.execute(
            "SELECT name FROM sqlite_master WHERE type='table' AND name='meta'"
        ).fetchone()
        if row is None:
            with conn:
                conn.executescript(_SCHEMA)
                conn.execute(
                    "INSERT OR REPLACE INTO meta (key, value) VALUES ('schema_version', ?)",
                    (str(SCHEMA_VERSION),))
            return
        stored = conn.execute(
            "SELECT value FROM meta WHERE key='schema_version'").fetchone()
        if stored is None or int(stored["value"]) != SCHEMA_VERSION:
            found = None if stored is None else stored["value"]
            raise SchemaMismatchError(
                f"store schema version {found} does not match {SCHEMA_VERSION}")

    def close(self) -> None:
        conn = getattr(self._local, "conn", None)
        if conn is not None:
            conn.close()
            self._local.conn = None

    def repo_write_lock(self, name: str) -> threading.Lock:
        """Per-repository write exclusivity."""
        with self._locks_guard:
            lock = self._repo_locks.get(name)
            if lock is None:
                lock = threading.Lock()
                self._repo_locks[name] = lock
            return lock

    # --- repositories ------------------------------------------------------
    def upsert_repository(self, meta: RepositoryMeta) -> None:
        date = meta.last_commit_date.isoformat() if meta.last_commit_date else None
        try:
            with self._conn() as conn:
                conn.execute(
                    """INSERT OR REPLACE INTO repositories
                       (name, language, clone_url, license, is_fork, commits,
                        issues, stars, contributors, last_commit_date, last_commit_sha)
                       VALUES (?,?,?,?,?,?,?,?,?,?,?)""",
                    (meta.name, meta.language.value, meta.clone_url, meta.license,
                     int(meta.is_fork), meta.commits, meta.issues, meta.stars,
                     meta.contributors, date, meta.last_commit_sha))
        except sqlite3.Error as e:
            raise StoreError(str(e)) from e

    def get_repository(self, name: str) -> Optional[RepositoryMeta]:
        row = self._conn().execute(
            "SELECT * FROM repositories WHERE name=?", (name,)).fetchone()
        return _row_to_meta(row) if row else None

    def list_repositories(self) -> list[RepositoryMeta]:
        rows = self._conn().execute(
            "SELECT * FROM repositories ORDER BY name").fetchall()
        return [_row_to_meta(r) for r in rows]

    def delete_repository_instances(self, name: str) -> int:
        with self._conn() as conn:
            cur = conn.execute("DELETE FROM instances WHERE repo_name=?", (name,))
            return cur.rowcount

    # --- instances -----------------------------------------------------------
    def upsert_file(self, file: CodeInstance, functions: list[CodeInstance]) -> None:
        """Atomic replacement of a file row and all its function rows."""
        if file.granularity is not Granularity.FILE:
            raise ValueError("upsert_file requires a File-granularity instance")
        for fn in functions:
            if (fn.repo_name, fn.path) != (file.repo_name, file.path):
                raise ValueError("function instance does not reference the file")
        conn = self._conn()
        try:
            with conn:
                present = conn.execute(
                    "SELECT 1 FROM repositories WHERE name=?",
                    (file.repo_name,)).fetchone()
                if present is None:
                    raise UnknownRepositoryError(file.repo_name)
                conn.execute(
                    "DELETE FROM instances WHERE repo_name=? AND path=?",
                    (file.repo_name, file.path))
                for inst in [file, *functions]:
                    conn.execute(
                        """INSERT INTO instances
                           (id, repo_name, path, granularity, name, start_line,
                            end_line, content, lines, tokens, characters,
                            has_syntax_errors, has_non_ascii, is_test,
                            is_boilerplate, content_hash, structural_hash,
                            ast_xml, sexp, parser_version)
                           VALUES (?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?)""",
                        (inst.id, inst.repo_name, inst.path,
                         inst.granularity.value, inst.name, inst.start_line,
                         inst.end_line, inst.content, inst.lines, inst.tokens,
                         inst.characters, int(inst.has_syntax_errors),
                         int(inst.has_non_ascii), int(inst.is_test),
                         int(inst.is_boilerplate), inst.content_hash,
                         inst.structural_hash, zlib.compress(inst.ast_xml.encode("utf-8")),
                         zlib.compress(inst.sexp.encode("utf-8")), inst.parser_version))
        except sqlite3.Error as e:
            raise StoreError(str(e)) from e

    def delete_file(self, repo_name: str, path: str) -> int:
        with self._conn() as conn:
            cur = conn.execute(
                "DELETE FROM instances WHERE repo_name=? AND path=?",
                (repo_name, path))
            return cur.rowcount

    def list_paths(self, repo_name: str) -> list[str]:
        rows = self._conn().execute(
            "SELECT DISTINCT path FROM instances WHERE repo_name=? ORDER BY path",
            (repo_name,)).fetchall()
        return [r["path"] for r in rows]

    # --- queries ------------------------------------------------------------
    def build_query(self, spec: FilterSpec, batch: int = 256) -> Iterator[CodeInstance]:
        """Stream instances matching the spec in (repo_name, path, start_line)
        order; deduplication is not applied here. Constant memory."""
        sql, params = _compile(spec)
        conn = self._conn()
        try:
            cur = conn.execute(sql, params)
            while True:
                rows = cur.fetchmany(batch)
                if not rows:
                    break
                for row in rows:
                    yield _row_to_instance(row)
        except sqlite3.Error as e:
            raise StoreError(f"query stream failed: {e}") from e

    def estimate_count(self, spec: FilterSpec) -> int:
        """Exact match count before deduplication."""
        sql, params = _compile(spec, count=True)
        try:
            row = self._conn().execute(sql, params).fetchone()
        except sqlite3.Error as e:
            raise StoreError(str(e)) from e
        return int(row[0])

    def stats(self) -> dict[str, int]:
        conn = self._conn()
        repos = conn.execute("SELECT COUNT(*) FROM repositories").fetchone()[0]
        files = conn.execute(
            "SELECT COUNT(*), COALESCE(SUM(LENGTH(CAST(content AS BLOB))),0)"
            " FROM instances WHERE granularity='file'").fetchone()
        functions = conn.execute(
            "SELECT COUNT(*) FROM instances WHERE granularity='function'").fetchone()[0]
        return {
            "repositories": repos,
            "files": files[0],
            "functions": functions,
            "content_bytes": files[1],
        }

    # --- tasks ----------------------------------------------------------------
    def insert_task(self, task_id: str, spec: FilterSpec, status: str,
                    submitted_at: str, output_path: str) -> None:
        with self._seq_guard, self._conn() as conn:
            seq = conn.execute("SELECT COALESCE(MAX(seq),0)+1 FROM tasks").fetchone()[0]
            conn.execute(
                """INSERT INTO tasks (id, seq, spec_json, status, submitted_at,
                                      written, output_path)
                   VALUES (?,?,?,?,?,0,?)""",
                (task_id, seq, json.dumps(spec.to_wire(), sort_keys=True),
                 status, submitted_at, output_path))

    def update_task(self, task_id: str, **fields) -> None:
        if not fields:
            return
        cols = ", ".join(f"{k}=?" for k in fields)
        with self._conn() as conn:
            conn.execute(f"UPDATE tasks SET {cols} WHERE id=?",
                         (*fields.values(), task_id))

    def load_tasks(self) -> list[sqlite3.Row]:
        return self._conn().execute("SELECT * FROM tasks ORDER BY seq").fetchall()


def _row_to_meta(row: sqlite3.Row) -> RepositoryMeta:
    return RepositoryMeta(
        name=row["name"],
        language=Language(row["language"]),
        clone_url=row["clone_url"],
        license=row["license"],
        is_fork=bool(row["is_fork"]),
        commits=row["commits"],
        issues=row["issues"],
        stars=row["stars"],
        contributors=row["contributors"],
        last_commit_date=parse_timestamp(row["last_commit_date"]) if row["last_commit_date"] else None,
        last_commit_sha=row["last_commit_sha"],
    )


def _row_to_instance(row: sqlite3.Row) -> CodeInstance:
    return CodeInstance(
        id=row["id"],
        repo_name=row["repo_name"],
        path=row["path"],
        granularity=Granularity(row["granularity"]),
        name=row["name"],
        start_line=row["start_line"],
        end_line=row["end_line"],
        content=row["content"],
        lines=row["lines"],
        tokens=row["tokens"],
        characters=row["characters"],
        has_syntax_errors=bool(row["has_syntax_errors"]),
        has_non_ascii=bool(row["has_non_ascii"]),
        is_test=bool(row["is_test"]),
        is_boilerplate=bool(row["is_boilerplate"]),
        content_hash=row["content_hash"],
        structural_hash=row["structural_hash"],
        ast_xml=zlib.decompress(row["ast_xml"]).decode("utf-8"),
        sexp=zlib.decompress(row["sexp"]).decode("utf-8"),
        parser_version=row["parser_version"],
    )


def _compile(spec: FilterSpec, count: bool = False) -> tuple[str, list]:
    """Compile a validated FilterSpec into SQL; bounds are inclusive."""
    select = "SELECT COUNT(*)" if count else "SELECT i.*"
    sql = [f"{select} FROM instances i JOIN repositories r ON i.repo_name = r.name"]
    where = ["r.language = ?", "i.granularity = ?"]
    params: list = [spec.language.value if spec.language else "",
                    spec.granularity.value]
    for metric in ("commits", "issues", "stars", "contributors"):
        lo = getattr(spec, f"repo_min_{metric}")
        hi = getattr(spec, f"repo_max_{metric}")
        if lo is not None:
            where.append(f"r.{metric} >= ?")
            params.append(lo)
        if hi is not None:
            where.append(f"r.{metric} <= ?")
            params.append(hi)
    if spec.require_license:
        where.append("r.license IS NOT NULL")
    if spec.exclude_forks:
        where.append("r.is_fork = 0")
    for metric in ("characters", "tokens", "lines"):
        lo = getattr(spec, f"instance_min_{metric}")
        hi = getattr(spec, f"instance_max_{metric}")
        if lo is not None:
            where.append(f"i.{metric} >= ?")
            params.append(lo)
        if hi is not None:
            where.append(f"i.{metric} <= ?")
            params.append(hi)
    if spec.exclude_test:
        where.append("i.is_test = 0")
    if spec.exclude_syntax_errors:
        where.append("i.has_syntax_errors = 0")
    if spec.exclude_non_ascii:
        where.append("i.has_non_ascii = 0")
    if spec.exclude_boilerplate:
        where.append("i.is_boilerplate = 0")
    sql.append("WHERE " + " AND ".join(where))
    if not count:
        sql.append("ORDER BY i.repo_name, i.path, i.start_line, i.id")
    return " ".join(sql), params
