"""Line-based key=value config files whose keys mirror the long CLI flags."""

from __future__ import annotations

from pathlib import Path


class ConfigFileError(ValueError):
    def __init__(self, path: str | Path, line: int, message: str) -> None:
        super().__init__(f"{path}:{line}: {message}")
        self.code = "config_file"
        self.line = line


def parse_config_text(text: str, source: str | Path = "<config>") -> dict[str, str]:
    values: dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigFileError(source, number, f"expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lstrip("-")
        if not key:
            raise ConfigFileError(source, number, "empty key")
        values[key] = value
    return values


def load_config_file(path: str | Path) -> dict[str, str]:
    p = Path(path)
    if not p.exists():
        raise ConfigFileError(p, 0, "config file not found")
    return parse_config_text(p.read_text(encoding="utf-8"), p)


def parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")
