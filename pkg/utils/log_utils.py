"""Timestamped logging helpers with level filtering."""

from __future__ import annotations

import builtins
import os
import sys
import time
from typing import Any


LEVELS = ("DEEP", "DEBUG", "INFO", "WARN", "ERROR")
_RANK = {name: rank for rank, name in enumerate(LEVELS)}

_threshold: str | None = None


def set_log_level(level: str | None) -> None:
    """Force a log level, overriding settings and environment."""
    global _threshold
    if level is None:
        _threshold = None
        return
    name = str(level).strip().upper()
    if name not in _RANK:
        raise ValueError(f"Unknown log level '{level}' (expected one of {', '.join(LEVELS)})")
    _threshold = name


def current_log_level() -> str:
    if _threshold:
        return _threshold
    env_level = os.getenv("MPS_SIM_LOG_LEVEL", "").strip().upper()
    if env_level in _RANK:
        return env_level
    # Imported lazily: settings_store itself logs through this module.
    from utils.settings_store import get_settings

    configured = str(get_settings().get("log_level", "INFO")).strip().upper()
    return configured if configured in _RANK else "INFO"


def level_enabled(level: str) -> bool:
    return _RANK.get(level.upper(), _RANK["INFO"]) >= _RANK[current_log_level()]


def _split_tags(message: str) -> tuple[list[str], str]:
    tags: list[str] = []
    remaining = message.lstrip()
    while remaining.startswith("["):
        end = remaining.find("]")
        if end == -1:
            break
        tag = remaining[1:end].strip()
        if not tag:
            break
        tags.append(tag)
        remaining = remaining[end + 1 :].lstrip()
    return tags, remaining


def _format_message(message: str) -> tuple[str, str]:
    tags, remaining = _split_tags(message)
    system = "APP"
    variant = None
    extra_tags: list[str] = []
    if tags:
        first = tags[0].upper()
        if first in _RANK:
            variant = first
            system = tags[1] if len(tags) > 1 else "APP"
            extra_tags = tags[2:]
        else:
            system = tags[0]
            variant = tags[1].upper() if len(tags) > 1 else None
            extra_tags = tags[2:]
    extra = f" [{' '.join(extra_tags)}]" if extra_tags else ""
    suffix = f" {remaining}" if remaining else ""
    level = variant if variant in _RANK else "INFO"
    if variant:
        return level, f"[{system}][{variant}]{extra}{suffix}"
    return level, f"[{system}]{extra}{suffix}"


def tprint(*args: Any, **kwargs: Any) -> None:
    """Print to stderr with a timestamp prefix and normalized tag order."""
    message = " ".join(str(arg) for arg in args)
    level, formatted = _format_message(message)
    if not level_enabled(level):
        return
    timestamp = time.strftime("%Y-%m-%d %H:%M:%S")
    kwargs.setdefault("file", sys.stderr)
    builtins.print(f"[{timestamp}]{formatted}", **kwargs)


def log(system: str, message: str, variant: str | None = None) -> None:
    """Log with explicit system and optional variant."""
    if variant:
        tprint(f"[{system}][{variant}] {message}")
    else:
        tprint(f"[{system}] {message}")
