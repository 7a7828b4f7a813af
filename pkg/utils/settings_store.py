"""In-memory cache for simulator settings."""

from __future__ import annotations

import os
import threading
from pathlib import Path
from typing import Any

from utils.file_utils import load_json
from utils.log_utils import tprint

_lock = threading.Lock()
_settings_cache: dict[str, Any] = {}

_DEFAULT_PATH = Path(__file__).resolve().parents[1] / "config" / "app_settings.json"

DEFAULTS: dict[str, Any] = {
    "log_level": "INFO",
    "lambda_floor": 1e-12,
    "default_chi": 8,
    "default_delta": 0.125,
    "default_observable_stride": 8,
    "argmax_dense_max_qubits": 16,
    "default_t_ladder_start": 100.0,
    "default_t_ladder_multiplier": 2.0,
    "default_t_ladder_max": 1600.0,
    "generator_max_rejections": 20000,
    "generator_max_restarts": 5,
    "oracle_tolerance": 1e-8,
    "default_workers": 1,
}


def settings_path() -> Path:
    override = os.getenv("MPS_SIM_SETTINGS")
    return Path(override).expanduser() if override else _DEFAULT_PATH


def refresh_settings() -> dict[str, Any]:
    """Reload settings from disk and replace the cache."""
    path = settings_path()
    problem: str | None = None
    try:
        data = load_json(path)
    except ValueError as exc:
        problem = str(exc)
        data = {}
    if not isinstance(data, dict):
        data = {}
    merged = dict(DEFAULTS)
    merged.update({key: value for key, value in data.items() if not key.endswith("_hint")})
    with _lock:
        _settings_cache.clear()
        _settings_cache.update(merged)
        snapshot = dict(_settings_cache)
    # Warn only after the cache is filled; tprint consults it for the log level.
    if problem:
        tprint(f"[SETTINGS][WARN] Ignoring unreadable settings file: {problem}")
    return snapshot


def get_settings() -> dict[str, Any]:
    """Return a copy of the cached settings."""
    with _lock:
        if _settings_cache:
            return dict(_settings_cache)
    refresh_settings()
    with _lock:
        return dict(_settings_cache)


def get_setting(key: str) -> Any:
    return get_settings().get(key, DEFAULTS.get(key))


def is_deep_logging() -> bool:
    """Return True when the effective log level requests deep tracing."""
    from utils.log_utils import current_log_level

    return current_log_level() == "DEEP"


def deep_log(message: str) -> None:
    """Log a deep-trace message with a timestamp when enabled."""
    if not is_deep_logging():
        return
    tprint(message)
