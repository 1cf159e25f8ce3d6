"""Service configuration: flat key=value file with CODEMINE_* env overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Mapping, Optional

ENV_PREFIX = "CODEMINE_"


class ConfigError(Exception):
    pass


@dataclass
class ServiceConfig:
    listen_host: str = "127.0.0.1"
    listen_port: int = 8000
    store_path: str = "codemine.db"
    workdir: str = "workdir"
    output_dir: str = "exports"
    manifest_source: str = ""
    executor_count: int = 2
    pool_size: int = 8
    file_size_cap: int = 10 * 1024 * 1024
    api_tokens: tuple[str, ...] = ()
    webhook_url: Optional[str] = None
    dashboard_dir: Optional[str] = None

    def __post_init__(self) -> None:
        if self.executor_count < 1:
            raise ConfigError("executor_count must be >= 1")
        if self.pool_size < 1:
            raise ConfigError("pool_size must be >= 1")

    def ensure_dirs(self) -> None:
        Path(self.workdir).mkdir(parents=True, exist_ok=True)
        Path(self.output_dir).mkdir(parents=True, exist_ok=True)


_INT_KEYS = {"listen_port", "executor_count", "pool_size", "file_size_cap"}
_LIST_KEYS = {"api_tokens"}


def load_config(path: Optional[str] = None,
                env: Optional[Mapping[str, str]] = None,
                overrides: Optional[Mapping[str, object]] = None) -> ServiceConfig:
    """Layered: file values, then CODEMINE_* environment, then overrides."""
    values: dict[str, object] = {}
    if path:
        values.update(_read_file(path))
    env = os.environ if env is None else env
    known = {f.name for f in fields(ServiceConfig)}
    for key in known:
        env_key = ENV_PREFIX + key.upper()
        if env_key in env:
            values[key] = env[env_key]
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    kwargs: dict[str, object] = {}
    for key, raw in values.items():
        if key not in known:
            raise ConfigError(f"unknown config key: {key}")
        if key in _INT_KEYS and isinstance(raw, str):
            try:
                kwargs[key] = int(raw)
            except ValueError as e:
                raise ConfigError(f"{key} must be an integer: {raw!r}") from e
        elif key in _LIST_KEYS and isinstance(raw, str):
            kwargs[key] = tuple(t.strip() for t in raw.split(",") if t.strip())
        else:
            kwargs[key] = raw
    try:
        return ServiceConfig(**kwargs)  # type: ignore[arg-type]
    except TypeError as e:
        raise ConfigError(str(e)) from e


def _read_file(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, _, value = stripped.partition("=")
        out[key.strip()] = value.strip()
    return out
