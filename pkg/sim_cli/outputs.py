"""CSV and JSON artifacts written by the CLI."""

from __future__ import annotations

import csv
import platform
from pathlib import Path
from typing import IO, Any

import numpy as np
import scipy

from adiabatic_module.engine import SAMPLE_TOPIC, RunRecord, SampleRow
from utils.event_bus import EventBus
from utils.file_utils import save_json

RUN_COLUMNS = (
    "s",
    "energy_norm",
    "energy_raw",
    "norm2",
    "entropy_halfcut",
    "p_success_norm",
    "p_success_raw",
    "discarded_cum",
)
SUMMARY_COLUMNS = (
    "instance",
    "n",
    "m",
    "chi",
    "T",
    "solved",
    "p_success",
    "norm2",
    "discarded",
    "seconds",
)
MIN_T_COLUMNS = ("instance", "n", "m", "chi", "T_min", "attempts")
MIN_T_STATS_COLUMNS = ("n", "instances", "solved", "exhausted", "mean", "worst", "ci95_half_width")
EXHAUSTED = "exhausted"


def _format(value: float) -> str:
    return repr(float(value))


class RunCsvWriter:
    """Streams sample rows to a run CSV as they are published on the bus."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self.rows = 0
        self._fh: IO[str] | None = None
        self._writer: csv.DictWriter | None = None
        self._unsubscribe = None

    def __enter__(self) -> RunCsvWriter:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = self.path.open("w", newline="", encoding="utf-8")
        self._writer = csv.DictWriter(self._fh, fieldnames=list(RUN_COLUMNS), extrasaction="ignore")
        self._writer.writeheader()
        return self

    def attach(self, bus: EventBus) -> RunCsvWriter:
        self._unsubscribe = bus.subscribe(SAMPLE_TOPIC, self.write)
        return self

    def write(self, row: SampleRow) -> None:
        if self._writer is None or self._fh is None:
            raise RuntimeError("RunCsvWriter used outside its context")
        self._writer.writerow({column: _format(getattr(row, column)) for column in RUN_COLUMNS})
        self._fh.flush()
        self.rows += 1

    def __exit__(self, *exc_info: Any) -> None:
        if self._unsubscribe is not None:
            self._unsubscribe()
        if self._fh is not None:
            self._fh.close()
        self._fh = None
        self._writer = None


def versions() -> dict[str, str]:
    return {"python": platform.python_version(), "numpy": np.__version__, "scipy": scipy.__version__}


def write_run_manifest(path: str | Path, record: RunRecord, extra: dict[str, Any] | None = None) -> None:
    payload: dict[str, Any] = {
        "schedule": record.schedule,
        "config": record.config,
        "outcome": record.summary(),
        "sample_wall_clock": [row.wall_clock for row in record.rows],
        "versions": versions(),
    }
    if extra:
        payload.update(extra)
    save_json(path, payload)


def write_spectra(path: str | Path, record: RunRecord) -> None:
    cut = record.spectra[0]["cut"] if record.spectra else None
    save_json(path, {"n": record.n, "cut": cut, "samples": record.spectra})


def manifest_path(csv_path: str | Path) -> Path:
    p = Path(csv_path)
    return p.with_suffix(".json")


def spectra_path(csv_path: str | Path) -> Path:
    p = Path(csv_path)
    return p.with_name(f"{p.stem}_spectra.json")
