"""Command-line interface: headless equivalent of the web flow.

Exit codes: 0 success, 2 configuration error, 3 store error, 4 task failure,
1 unexpected error.
"""

from __future__ import annotations

import argparse
import json
import logging
import shutil
import sys
import time
from pathlib import Path

from .config import ConfigError, ServiceConfig, load_config
from .crawler import crawl_pass
from .engine import DatasetEngine, InvalidSpecError, TaskStatus
from .model import SpecParseError, spec_from_wire
from .store import StoreError, StoreHandle

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_STORE = 3
EXIT_TASK = 4

log = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codemine",
        description="Mine git repositories and export filtered code datasets.")
    parser.add_argument("--config", help="path to key=value config file")
    parser.add_argument("--store", help="override store path")
    parser.add_argument("--workdir", help="override clone workdir")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    crawl = sub.add_parser("crawl", help="run one crawl pass over a manifest")
    crawl.add_argument("--manifest", required=True,
                       help="manifest JSONL file path or HTTP URL")
    crawl.add_argument("--pool-size", type=int, default=None,
                       help="per-repository analysis worker count")

    update = sub.add_parser("update", help="update-only pass (no new repositories)")
    update.add_argument("--manifest", required=True)
    update.add_argument("--pool-size", type=int, default=None)

    export = sub.add_parser("export", help="run one export task synchronously")
    export.add_argument("--spec", required=True, help="FilterSpec JSON file")
    export.add_argument("--out", required=True, help="output .jsonl.gz path")

    sub.add_parser("stats", help="print store counts")

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)

    return parser


def _load_config(args: argparse.Namespace) -> ServiceConfig:
    overrides: dict[str, object] = {}
    if args.store:
        overrides["store_path"] = args.store
    if args.workdir:
        overrides["workdir"] = args.workdir
    if getattr(args, "pool_size", None):
        overrides["pool_size"] = args.pool_size
    if getattr(args, "host", None):
        overrides["listen_host"] = args.host
    if getattr(args, "port", None):
        overrides["listen_port"] = args.port
    return load_config(args.config, overrides=overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        config = _load_config(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        config.ensure_dirs()
        store = StoreHandle(config.store_path)
    except StoreError as e:
        print(f"store error: {e}", file=sys.stderr)
        return EXIT_STORE
    try:
        if args.command in ("crawl", "update"):
            return _cmd_crawl(args, config, store, update_only=args.command == "update")
        if args.command == "export":
            return _cmd_export(args, config, store)
        if args.command == "stats":
            return _cmd_stats(store)
        if args.command == "serve":
            return _cmd_serve(config, store)
        return EXIT_ERROR
    except StoreError as e:
        print(f"store error: {e}", file=sys.stderr)
        return EXIT_STORE


def _cmd_crawl(args, config: ServiceConfig, store: StoreHandle,
               update_only: bool) -> int:
    summary = crawl_pass(args.manifest, store, config.workdir,
                         pool_size=config.pool_size,
                         max_bytes=config.file_size_cap,
                         update_only=update_only)
    print(f"crawl pass complete: {summary.new_repos} new, {summary.updated} updated, "
          f"{summary.skipped} skipped, {len(summary.failures)} failures")
    for name, reason in summary.failures:
        print(f"  failed: {name}: {reason}")
    return EXIT_OK if not summary.failures else EXIT_TASK


def _cmd_export(args, config: ServiceConfig, store: StoreHandle) -> int:
    try:
        payload = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        print(f"cannot read spec file: {e}", file=sys.stderr)
        return EXIT_CONFIG
    engine = DatasetEngine(store, config.output_dir, executor_count=1)
    try:
        try:
            spec = spec_from_wire(payload)
            task_id = engine.submit(spec)
        except (SpecParseError, InvalidSpecError) as e:
            print("invalid spec:", file=sys.stderr)
            for v in e.violations:
                print(f"  {v.code} ({v.field}): {v.message}", file=sys.stderr)
            return EXIT_TASK
        task = engine.get_task(task_id)
        while not task.done_event.wait(timeout=0.2):
            _print_progress(task)
        _print_progress(task, final=True)
        if task.status is not TaskStatus.COMPLETED:
            print(f"export {task.status.value}: {task.failure_reason or ''}",
                  file=sys.stderr)
            return EXIT_TASK
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        shutil.move(task.output_path, out)
        sidecar = Path(task.output_path).with_name(f"{task_id}.manifest.json")
        if sidecar.exists():
            shutil.move(str(sidecar), out.with_suffix(".manifest.json"))
        print(f"exported {task.written} instances to {out}")
        return EXIT_OK
    finally:
        engine.shutdown()


def _print_progress(task, final: bool = False) -> None:
    pct = task.percent()
    shown = f"{pct}%" if pct is not None else "n/a"
    end = "\n" if final else "\r"
    total = task.estimated_total if task.estimated_total is not None else "?"
    print(f"[{task.status.value}] written={task.written}/{total} ({shown})",
          end=end, flush=True)


def _cmd_stats(store: StoreHandle) -> int:
    for key, value in store.stats().items():
        print(f"{key}: {value}")
    return EXIT_OK


def _cmd_serve(config: ServiceConfig, store: StoreHandle) -> int:
    import uvicorn

    from .service import create_app
    app = create_app(config, store=store)
    uvicorn.run(app, host=config.listen_host, port=config.listen_port,
                log_level="info")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
