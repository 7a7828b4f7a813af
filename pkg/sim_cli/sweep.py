"""χ/T sweeps and the minimal-T search, fanned out over a bounded worker pool."""

from __future__ import annotations

import math
import time
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from sklearn.linear_model import LinearRegression

from adiabatic_module.engine import AdiabaticEngine, NumericalAbortError
from adiabatic_module.schedule import RunConfig, Schedule
from exact_cover.instance_io import load_instance
from sim_cli.outputs import (
    EXHAUSTED,
    MIN_T_COLUMNS,
    MIN_T_STATS_COLUMNS,
    SUMMARY_COLUMNS,
    RunCsvWriter,
    manifest_path,
    write_run_manifest,
)
from utils.file_utils import write_csv
from utils.log_utils import tprint
from utils.worker_pool import run_bounded

CONFIDENCE_Z = 1.96


def t_ladder(start: float, multiplier: float, maximum: float) -> list[float]:
    """start, start·multiplier, ... while ≤ maximum."""
    if start <= 0:
        raise ValueError(f"ladder start must be positive (got {start})")
    if multiplier <= 1:
        raise ValueError(f"ladder multiplier must exceed 1 (got {multiplier})")
    if maximum < start:
        raise ValueError(f"ladder max {maximum} is below its start {start}")
    values = [float(start)]
    while values[-1] * multiplier <= maximum * (1 + 1e-12):
        values.append(values[-1] * multiplier)
    return values


@dataclass(frozen=True)
class SweepSpec:
    instances: list[Path]
    chis: list[int]
    t_values: list[float]
    delta: float
    inner_delta: float | None
    out_dir: Path
    workers: int = 1
    stride: int = 1
    sign: int = -1
    renormalize: bool = False

    def __post_init__(self) -> None:
        if not self.instances:
            raise ValueError("sweep needs at least one instance")
        if not self.chis or any(chi < 1 for chi in self.chis):
            raise ValueError(f"chi list must be non-empty and positive (got {self.chis})")
        if not self.t_values or any(b <= a for a, b in zip(self.t_values, self.t_values[1:])):
            raise ValueError(f"T values must be non-empty and increasing (got {self.t_values})")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1 (got {self.workers})")


@dataclass(frozen=True)
class RunJob:
    instance_path: Path
    chi: int
    T: float
    delta: float
    inner_delta: float | None
    stride: int
    sign: int
    renormalize: bool
    out_csv: Path | None


def _config(job: RunJob) -> RunConfig:
    return RunConfig(
        chi_cap=job.chi,
        renormalize_after_truncation=job.renormalize,
        observable_stride=job.stride,
        evolution_sign=job.sign,
    )


def execute_run_job(job: RunJob) -> dict[str, Any]:
    """Run one (instance, χ, T) point; returns a summary row. Worker-safe (no shared state)."""
    instance = load_instance(job.instance_path)
    schedule = Schedule(job.T, job.delta, job.inner_delta)
    started = time.perf_counter()
    row: dict[str, Any] = {"instance": job.instance_path.name, "n": instance.n, "m": instance.m, "chi": job.chi, "T": job.T}
    try:
        engine = AdiabaticEngine(instance, schedule, _config(job))
        if job.out_csv is not None:
            with RunCsvWriter(job.out_csv) as writer:
                writer.attach(engine.bus)
                record = engine.run()
            write_run_manifest(manifest_path(job.out_csv), record, {"instance": str(job.instance_path)})
        else:
            record = engine.run()
    except NumericalAbortError as exc:
        tprint(f"[SWEEP][WARN] {job.instance_path.name} chi={job.chi} T={job.T}: {exc}")
        row.update(solved=False, p_success=0.0, norm2=exc.norm_squared, discarded=float("nan"))
    else:
        final = record.final_row
        row.update(solved=record.solved, p_success=final.p_success_norm, norm2=final.norm2, discarded=final.discarded_cum)
    row["seconds"] = round(time.perf_counter() - started, 3)
    return row


def run_sweep(spec: SweepSpec) -> list[dict[str, Any]]:
    jobs = [
        RunJob(
            instance_path=path,
            chi=chi,
            T=T,
            delta=spec.delta,
            inner_delta=spec.inner_delta,
            stride=spec.stride,
            sign=spec.sign,
            renormalize=spec.renormalize,
            out_csv=spec.out_dir / "runs" / f"{path.stem}_chi{chi}_T{T:g}.csv",
        )
        for path in spec.instances
        for chi in spec.chis
        for T in spec.t_values
    ]
    tprint(f"[SWEEP][INFO] {len(jobs)} runs on {spec.workers} worker(s)")
    rows = run_bounded(execute_run_job, jobs, workers=spec.workers)
    write_csv(spec.out_dir / "summary.csv", SUMMARY_COLUMNS, rows)
    return rows


@dataclass(frozen=True)
class MinTJob:
    instance_path: Path
    chi: int
    ladder: tuple[float, ...]
    delta: float
    inner_delta: float | None
    sign: int = -1
    renormalize: bool = False


def execute_min_t_job(job: MinTJob) -> dict[str, Any]:
    """Walk the ladder until a run solves the instance; T_min is that rung or 'exhausted'."""
    attempts = 0
    row: dict[str, Any] = {"instance": job.instance_path.name, "chi": job.chi, "T_min": EXHAUSTED}
    for T in job.ladder:
        attempts += 1
        outcome = execute_run_job(
            RunJob(job.instance_path, job.chi, T, job.delta, job.inner_delta, 10**9, job.sign, job.renormalize, None)
        )
        row.update(n=outcome["n"], m=outcome["m"])
        if outcome["solved"]:
            row["T_min"] = T
            break
    row["attempts"] = attempts
    tprint(f"[SWEEP][DEBUG] {job.instance_path.name}: T_min={row['T_min']} after {attempts} run(s)")
    return row


@dataclass
class MinTStats:
    n: int
    instances: int
    solved: int
    exhausted: int
    mean: float
    worst: float
    ci95_half_width: float
    t_values: list[float] = field(default_factory=list, repr=False)

    def to_row(self) -> dict[str, Any]:
        return {column: getattr(self, column) for column in MIN_T_STATS_COLUMNS}


def aggregate_min_t(rows: list[dict[str, Any]]) -> list[MinTStats]:
    """Per-n mean, worst case and normal-approximation 95% half width over solved instances."""
    grouped: dict[int, list[dict[str, Any]]] = defaultdict(list)
    for row in rows:
        grouped[int(row["n"])].append(row)
    stats: list[MinTStats] = []
    for n in sorted(grouped):
        group = grouped[n]
        solved = [float(row["T_min"]) for row in group if row["T_min"] != EXHAUSTED]
        if solved:
            values = np.asarray(solved)
            mean = float(values.mean())
            worst = float(values.max())
            spread = float(values.std(ddof=1)) if values.size > 1 else 0.0
            half_width = CONFIDENCE_Z * spread / math.sqrt(values.size)
        else:
            mean = worst = half_width = float("nan")
        stats.append(
            MinTStats(
                n=n,
                instances=len(group),
                solved=len(solved),
                exhausted=len(group) - len(solved),
                mean=mean,
                worst=worst,
                ci95_half_width=half_width,
                t_values=solved,
            )
        )
    return stats


@dataclass(frozen=True)
class GrowthComparison:
    """Residual sums of squares of log T_min against n, fitted linear and quadratic in n."""

    points: int
    linear_rss: float
    quadratic_rss: float

    @property
    def sub_exponential(self) -> bool:
        return self.quadratic_rss < self.linear_rss


def _rss(design: np.ndarray, target: np.ndarray) -> float:
    model = LinearRegression().fit(design, target)
    residual = target - model.predict(design)
    return float(residual @ residual)


def compare_growth(stats: list[MinTStats]) -> GrowthComparison | None:
    """None until at least three sizes have a solved mean."""
    usable = [entry for entry in stats if entry.solved and math.isfinite(entry.mean)]
    if len({entry.n for entry in usable}) < 3:
        return None
    n = np.array([entry.n for entry in usable], dtype=np.float64)
    target = np.log(np.array([entry.mean for entry in usable], dtype=np.float64))
    return GrowthComparison(
        points=len(usable),
        linear_rss=_rss(n[:, None], target),
        quadratic_rss=_rss(np.column_stack([n, n * n]), target),
    )


def run_min_t(
    instances: list[Path],
    chi: int,
    ladder: list[float],
    delta: float,
    inner_delta: float | None,
    out_dir: Path,
    *,
    workers: int = 1,
    sign: int = -1,
    renormalize: bool = False,
) -> tuple[list[dict[str, Any]], list[MinTStats]]:
    if not instances:
        raise ValueError("min-t needs at least one instance")
    if any(b <= a for a, b in zip(ladder, ladder[1:])) or not ladder:
        raise ValueError(f"T ladder must be non-empty and increasing (got {ladder})")
    jobs = [MinTJob(path, chi, tuple(ladder), delta, inner_delta, sign, renormalize) for path in instances]
    rows = run_bounded(execute_min_t_job, jobs, workers=workers)
    stats = aggregate_min_t(rows)
    write_csv(out_dir / "min_t.csv", MIN_T_COLUMNS, rows)
    write_csv(out_dir / "min_t_stats.csv", MIN_T_STATS_COLUMNS, [s.to_row() for s in stats])
    growth = compare_growth(stats)
    if growth is not None:
        tprint(
            f"[SWEEP][INFO] log T_min over {growth.points} sizes: linear rss={growth.linear_rss:.4g} "
            f"quadratic rss={growth.quadratic_rss:.4g} sub_exponential={growth.sub_exponential}"
        )
    exhausted = sum(s.exhausted for s in stats)
    if exhausted:
        tprint(f"[SWEEP][WARN] {exhausted} instance(s) exhausted the ladder up to T={ladder[-1]:g}")
    return rows, stats
