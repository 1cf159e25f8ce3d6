"""HTTP API backing the dashboard: submit, monitor, cancel, download.

Request handlers are stateless; all mutable state lives behind the store and
engine contracts. Bearer-token auth replaces any account system; an empty
token list means open single-tenant mode.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from .config import ServiceConfig
from .engine import (DatasetEngine, InvalidCountError, InvalidSpecError,
                     TaskStatus, UnknownTaskError, WebhookNotifier)
from .model import SpecParseError, spec_from_wire
from .store import StoreHandle

log = logging.getLogger(__name__)


def create_app(config: ServiceConfig, store: Optional[StoreHandle] = None,
               engine: Optional[DatasetEngine] = None) -> FastAPI:
    config.ensure_dirs()
    store = store or StoreHandle(config.store_path)
    if engine is None:
        notifier = WebhookNotifier(config.webhook_url) if config.webhook_url else None
        engine = DatasetEngine(store, config.output_dir,
                               executor_count=config.executor_count,
                               notifier=notifier)
    app = FastAPI(title="codemine", docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.engine = engine
    tokens = set(config.api_tokens)

    def unauthorized(request: Request) -> Optional[JSONResponse]:
        if not tokens:
            return None
        header = request.headers.get("authorization", "")
        if header.startswith("Bearer ") and header[7:] in tokens:
            return None
        return JSONResponse({"error": "bad-token"}, status_code=401)

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/api/requests")
    async def submit(request: Request) -> Response:
        denied = unauthorized(request)
        if denied:
            return denied
        try:
            payload = await request.json()
        except json.JSONDecodeError:
            return JSONResponse(
                {"error": "invalid-spec",
                 "violations": [{"code": "invalid-json", "field": "",
                                 "message": "request body is not valid JSON"}]},
                status_code=400)
        try:
            spec = spec_from_wire(payload)
            task_id = engine.submit(spec)
        except (SpecParseError, InvalidSpecError) as e:
            return JSONResponse(
                {"error": "invalid-spec",
                 "violations": [v.to_wire() for v in e.violations]},
                status_code=400)
        return JSONResponse({"id": task_id}, status_code=202)

    @app.get("/api/requests")
    def list_requests(request: Request) -> Response:
        denied = unauthorized(request)
        if denied:
            return denied
        tasks = sorted(engine.list_tasks(), key=lambda t: t.submitted_at)
        return JSONResponse([t.progress() for t in tasks])

    @app.get("/api/requests/{task_id}")
    def get_request(task_id: str, request: Request) -> Response:
        denied = unauthorized(request)
        if denied:
            return denied
        try:
            task = engine.get_task(task_id)
        except UnknownTaskError:
            return JSONResponse({"error": "unknown-task"}, status_code=404)
        detail = task.progress()
        detail["spec"] = task.spec.to_wire()
        detail["output_available"] = task.status is TaskStatus.COMPLETED
        return JSONResponse(detail)

    @app.delete("/api/requests/{task_id}")
    def cancel_request(task_id: str, request: Request) -> Response:
        denied = unauthorized(request)
        if denied:
            return denied
        try:
            acknowledged = engine.cancel(task_id)
        except UnknownTaskError:
            return JSONResponse({"error": "unknown-task"}, status_code=404)
        return JSONResponse({"acknowledged": acknowledged})

    @app.get("/api/requests/{task_id}/download")
    def download(task_id: str, request: Request):
        denied = unauthorized(request)
        if denied:
            return denied
        try:
            task = engine.get_task(task_id)
        except UnknownTaskError:
            return JSONResponse({"error": "unknown-task"}, status_code=404)
        if task.status is not TaskStatus.COMPLETED:
            return JSONResponse({"error": "not-downloadable",
                                 "status": task.status.value}, status_code=409)
        return FileResponse(task.output_path, media_type="application/gzip",
                            filename=f"{task_id}.jsonl.gz")

    @app.get("/api/stats")
    def stats(request: Request) -> Response:
        denied = unauthorized(request)
        if denied:
            return denied
        return JSONResponse(store.stats())

    @app.get("/api/admin/executors")
    def get_executors(request: Request) -> Response:
        denied = unauthorized(request)
        if denied:
            return denied
        return JSONResponse({"count": engine.executor_count})

    @app.put("/api/admin/executors")
    async def set_executors(request: Request) -> Response:
        denied = unauthorized(request)
        if denied:
            return denied
        try:
            payload = await request.json()
            count = payload["count"]
            if not isinstance(count, int) or isinstance(count, bool):
                raise InvalidCountError(f"count must be an integer, got {count!r}")
            engine.set_executor_count(count)
        except (json.JSONDecodeError, KeyError, TypeError):
            return JSONResponse({"error": "invalid-count"}, status_code=400)
        except InvalidCountError:
            return JSONResponse({"error": "invalid-count"}, status_code=400)
        return JSONResponse({"count": engine.executor_count})

    dashboard = config.dashboard_dir
    if dashboard and Path(dashboard).is_dir():
        app.mount("/", StaticFiles(directory=dashboard, html=True), name="dashboard")

    return app
