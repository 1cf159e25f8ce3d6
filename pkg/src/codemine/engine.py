"""Dataset-construction task lifecycle: FIFO queue, executor pool, streaming
export with dedup/transform/compress, progress, cancellation, notification.

One scheduler condition variable dispatches; each task runs on exactly one
executor thread from claim to terminal state. The count query and the read
stream run in parallel. Progress reads are plain snapshots of integers and
are safe from any thread.
"""

from __future__ import annotations

import gzip
import json
import logging
import threading
import urllib.request
import uuid
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

from .analyzer import TransformOnErrorTreeError, parse_source, strip_comments
from .model import (CodeInstance, FilterSpec, Granularity, StripMode,
                    Violation, spec_from_wire, utc_now, validate_filter_spec)
from .store import StoreHandle

log = logging.getLogger(__name__)

PROGRESS_PERSIST_EVERY = 200


class TaskStatus(Enum):
    QUEUED = "queued"
    RUNNING = "running"
    COMPLETED = "completed"
    CANCELLED = "cancelled"
    FAILED = "failed"

    @property
    def terminal(self) -> bool:
        return self in (TaskStatus.COMPLETED, TaskStatus.CANCELLED, TaskStatus.FAILED)


class EngineError(Exception):
    pass


class InvalidSpecError(EngineError):
    code = "invalid-spec"

    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(v.message for v in violations))
        self.violations = violations


class UnknownTaskError(EngineError):
    code = "unknown-task"


class InvalidCountError(EngineError):
    code = "invalid-count"


class _Cancelled(Exception):
    pass


@dataclass
class ExportTask:
    id: str
    spec: FilterSpec
    status: TaskStatus
    submitted_at: str
    output_path: str
    started_at: Optional[str] = None
    finished_at: Optional[str] = None
    estimated_total: Optional[int] = None
    written: int = 0
    skipped_duplicates: int = 0
    failure_reason: Optional[str] = None
    cancel_event: threading.Event = field(default_factory=threading.Event)
    done_event: threading.Event = field(default_factory=threading.Event)

    def progress(self) -> dict:
        out = {
            "id": self.id,
            "status": self.status.value,
            "written": self.written,
            "estimated_total": self.estimated_total,
            "percent": self.percent(),
            "submitted_at": self.submitted_at,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "failure_reason": self.failure_reason,
        }
        return out

    def percent(self) -> Optional[int]:
        if self.status is TaskStatus.COMPLETED:
            return 100
        if self.estimated_total is None:
            return None
        if self.estimated_total <= 0:
            return 99
        return min(99, (100 * self.written) // self.estimated_total)


class Notifier:
    def notify(self, task: ExportTask) -> None:  # pragma: no cover - interface
        raise NotImplementedError


class LogNotifier(Notifier):
    def notify(self, task: ExportTask) -> None:
        log.info("task %s finished: status=%s written=%d output=%s",
                 task.id, task.status.value, task.written, task.output_path)


class WebhookNotifier(Notifier):
    """POSTs terminal task state as JSON; delivery failures are logged only."""

    def __init__(self, url: str, fallback: Optional[Notifier] = None):
        self.url = url
        self.fallback = fallback or LogNotifier()

    def notify(self, task: ExportTask) -> None:
        self.fallback.notify(task)
        body = json.dumps(task.progress()).encode("utf-8")
        req = urllib.request.Request(
            self.url, data=body, headers={"Content-Type": "application/json"})
        try:
            urllib.request.urlopen(req, timeout=10).close()
        except Exception as e:
            log.warning("webhook notification for %s failed: %s", task.id, e)


class DatasetEngine:
    def __init__(self, store: StoreHandle, output_dir: str | Path,
                 executor_count: int = 2, notifier: Optional[Notifier] = None,
                 gzip_level: int = 6):
        if executor_count < 1:
            raise InvalidCountError("executor count must be >= 1")
        self.store = store
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.notifier = notifier or LogNotifier()
        self.gzip_level = gzip_level
        self._lock = threading.Lock()
        self._cv = threading.Condition(self._lock)
        self._queue: deque[str] = deque()
        self._tasks: dict[str, ExportTask] = {}
        self._target = executor_count
        self._alive = 0
        self._shutdown = False
        self._recover()
        self._spawn_locked_to(executor_count)

    # --- lifecycle -------------------------------------------------------
    def _recover(self) -> None:
        """Tasks persisted as Queued survive restart; Running ones were
        interrupted and fail loudly instead of silently resurrecting."""
        for row in self.store.load_tasks():
            spec = spec_from_wire(json.loads(row["spec_json"]))
            task = ExportTask(
                id=row["id"], spec=spec, status=TaskStatus(row["status"]),
                submitted_at=row["submitted_at"], output_path=row["output_path"],
                started_at=row["started_at"], finished_at=row["finished_at"],
                estimated_total=row["estimated_total"], written=row["written"],
                failure_reason=row["failure_reason"])
            if task.status is TaskStatus.RUNNING:
                task.status = TaskStatus.FAILED
                task.failure_reason = "interrupted"
                task.finished_at = utc_now().isoformat()
                self.store.update_task(task.id, status=task.status.value,
                                       failure_reason="interrupted",
                                       finished_at=task.finished_at)
            if task.status is TaskStatus.QUEUED:
                self._queue.append(task.id)
            if task.status.terminal:
                task.done_event.set()
            self._tasks[task.id] = task

    def _spawn_locked_to(self, target: int) -> None:
        with self._cv:
            while self._alive < target:
                self._alive += 1
                threading.Thread(target=self._worker, daemon=True).start()

    def shutdown(self) -> None:
        with self._cv:
            self._shutdown = True
            self._cv.notify_all()

    # --- operations ----------------------------------------------------------
    def submit(self, spec: FilterSpec) -> str:
        violations = validate_filter_spec(spec)
        if violations:
            raise InvalidSpecError(violations)
        task_id = uuid.uuid4().hex
        output_path = str(self.output_dir / f"{task_id}.jsonl.gz")
        task = ExportTask(id=task_id, spec=spec, status=TaskStatus.QUEUED,
                          submitted_at=utc_now().isoformat(),
                          output_path=output_path)
        self.store.insert_task(task_id, spec, TaskStatus.QUEUED.value,
                               task.submitted_at, output_path)
        with self._cv:
            self._tasks[task_id] = task
            self._queue.append(task_id)
            self._cv.notify()
        return task_id

    def get_task(self, task_id: str) -> ExportTask:
        task = self._tasks.get(task_id)
        if task is None:
            raise UnknownTaskError(task_id)
        return task

    def list_tasks(self) -> list[ExportTask]:
        with self._lock:
            return list(self._tasks.values())

    def progress(self, task_id: str) -> dict:
        return self.get_task(task_id).progress()

    def cancel(self, task_id: str) -> bool:
        task = self.get_task(task_id)
        with self._cv:
            if task.status is TaskStatus.QUEUED:
                try:
                    self._queue.remove(task_id)
                except ValueError:
                    pass
                self._finalize(task, TaskStatus.CANCELLED)
                return True
            if task.status is TaskStatus.RUNNING:
                task.cancel_event.set()
                return True
            return False

    def set_executor_count(self, n: int) -> int:
        if n < 1:
            raise InvalidCountError(f"executor count must be >= 1, got {n}")
        with self._cv:
            self._target = n
            self._cv.notify_all()
        self._spawn_locked_to(n)
        return n

    @property
    def executor_count(self) -> int:
        return self._target

    def wait(self, task_id: str, timeout: Optional[float] = None) -> TaskStatus:
        task = self.get_task(task_id)
        task.done_event.wait(timeout)
        return task.status

    # --- worker loop -------------------------------------------------------------
    def _worker(self) -> None:
        while True:
            with self._cv:
                while True:
                    if self._shutdown or self._alive > self._target:
                        self._alive -= 1
                        return
                    if self._queue:
                        task = self._tasks[self._queue.popleft()]
                        task.status = TaskStatus.RUNNING
                        task.started_at = utc_now().isoformat()
                        break
                    self._cv.wait()
            self.store.update_task(task.id, status=task.status.value,
                                   started_at=task.started_at)
            try:
                self._run_task(task)
            except Exception as e:  # defensive: executor must never die
                log.exception("task %s crashed", task.id)
                self._finalize(task, TaskStatus.FAILED, reason=str(e))

    def _run_task(self, task: ExportTask) -> None:
        spec = task.spec
        estimator = threading.Thread(target=self._estimate, args=(task,),
                                     daemon=True)
        estimator.start()
        part = Path(task.output_path + ".part")
        seen: set[str] = set()
        try:
            with open(part, "wb") as fh:
                gz = gzip.GzipFile(filename="", mode="wb",
                                   compresslevel=self.gzip_level,
                                   fileobj=fh, mtime=0)
                try:
                    for inst in self.store.build_query(spec):
                        if task.cancel_event.is_set():
                            raise _Cancelled()
                        if spec.dedup.value != "none":
                            key = (inst.content_hash if spec.dedup.value == "exact"
                                   else inst.structural_hash)
                            if key in seen:
                                task.skipped_duplicates += 1
                                continue
                            seen.add(key)
                        record = self._record(inst, spec)
                        gz.write(json.dumps(record, ensure_ascii=False).encode("utf-8"))
                        gz.write(b"\n")
                        task.written += 1
                        if task.written % PROGRESS_PERSIST_EVERY == 0:
                            self.store.update_task(task.id, written=task.written)
                finally:
                    gz.close()
        except _Cancelled:
            part.unlink(missing_ok=True)
            self._finalize(task, TaskStatus.CANCELLED)
            return
        except Exception as e:
            part.unlink(missing_ok=True)
            log.error("task %s failed: %s", task.id, e)
            self._finalize(task, TaskStatus.FAILED, reason=str(e))
            return
        estimator.join(timeout=30)
        part.replace(task.output_path)
        self._write_sidecar(task)
        self._finalize(task, TaskStatus.COMPLETED)

    def _estimate(self, task: ExportTask) -> None:
        try:
            task.estimated_total = self.store.estimate_count(task.spec)
            self.store.update_task(task.id, estimated_total=task.estimated_total)
        except Exception as e:
            # progress simply reports no percent
            log.warning("estimate for task %s failed: %s", task.id, e)

    def _record(self, inst: CodeInstance, spec: FilterSpec) -> dict:
        content = inst.content
        if spec.strip_comments is not StripMode.NONE and spec.language is not None:
            try:
                tree = parse_source(content, spec.language)
                content = strip_comments(tree, content, spec.language,
                                         spec.strip_comments)
            except TransformOnErrorTreeError:
                log.info("transform-on-error-tree: exporting %s:%s@%d unmodified",
                         inst.repo_name, inst.path, inst.start_line)
            except Exception as e:
                log.warning("comment strip failed for %s:%s@%d (%s); exporting unmodified",
                            inst.repo_name, inst.path, inst.start_line, e)
        record = {
            "id": inst.id,
            "repo_name": inst.repo_name,
            "path": inst.path,
            "granularity": inst.granularity.value,
            "start_line": inst.start_line,
            "end_line": inst.end_line,
            "lines": inst.lines,
            "tokens": inst.tokens,
            "characters": inst.characters,
            "has_syntax_errors": inst.has_syntax_errors,
            "has_non_ascii": inst.has_non_ascii,
            "is_test": inst.is_test,
            "content": content,
            "content_hash": inst.content_hash,
            "structural_hash": inst.structural_hash,
        }
        if inst.granularity is Granularity.FUNCTION:
            record["name"] = inst.name
            record["is_boilerplate"] = inst.is_boilerplate
        if spec.include_ast:
            record["ast_xml"] = inst.ast_xml
        if spec.include_sexp:
            record["sexp"] = inst.sexp
        if spec.include_parser_version:
            record["parser_version"] = inst.parser_version
        return record

    def _write_sidecar(self, task: ExportTask) -> None:
        sidecar = {
            "task_id": task.id,
            "spec": task.spec.to_wire(),
            "written": task.written,
            "skipped_duplicates": task.skipped_duplicates,
            "estimated_total": task.estimated_total,
            "submitted_at": task.submitted_at,
            "started_at": task.started_at,
            "finished_at": utc_now().isoformat(),
        }
        path = self.output_dir / f"{task.id}.manifest.json"
        path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")

    def _finalize(self, task: ExportTask, status: TaskStatus,
                  reason: Optional[str] = None) -> None:
        task.status = status
        task.failure_reason = reason
        task.finished_at = utc_now().isoformat()
        self.store.update_task(task.id, status=status.value,
                               failure_reason=reason,
                               finished_at=task.finished_at,
                               written=task.written,
                               estimated_total=task.estimated_total)
        task.done_event.set()
        if status in (TaskStatus.COMPLETED, TaskStatus.FAILED):
            try:
                self.notifier.notify(task)
            except Exception as e:  # notifier must never sink a task
                log.warning("notifier failed for %s: %s", task.id, e)
