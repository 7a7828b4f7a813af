"""Subcommand implementations; cli.py only parses arguments and maps outcomes to exit codes."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any

from adiabatic_module.engine import AdiabaticEngine, RunRecord
from adiabatic_module.schedule import RunConfig, Schedule
from exact_cover.generator import GenerationError, generate_hard_instance, generate_with_clause_count
from exact_cover.instance import classical_energy, count_solutions
from exact_cover.instance_io import load_instance, save_instance
from oracle_module.checks import OracleReport, run_oracle_check
from sim_cli.fit import FitResult, fit_schmidt_decay, load_spectrum_file, spectrum_near
from sim_cli.outputs import RunCsvWriter, manifest_path, spectra_path, write_run_manifest, write_spectra
from sim_cli.sweep import MinTStats, SweepSpec, run_min_t, run_sweep
from utils.file_utils import save_json
from utils.log_utils import log, tprint


def instance_filename(n: int, seed: int) -> str:
    return f"ec_n{n}_seed{seed}.txt"


def cmd_generate(
    n: int, count: int, seed: int, out_dir: str | Path, *, m_target: int | None = None
) -> list[Path]:
    """Write `count` hard instances for seeds seed, seed+1, ... plus manifest.json."""
    if count < 1:
        raise ValueError(f"count must be >= 1 (got {count})")
    directory = Path(out_dir)
    paths: list[Path] = []
    entries: list[dict[str, Any]] = []
    next_seed = seed
    for _ in range(count):
        if m_target is None:
            instance = generate_hard_instance(n, next_seed)
        else:
            instance = generate_with_clause_count(n, m_target, next_seed)
        used_seed = int(instance.metadata["seed"])
        next_seed = used_seed + 1
        if count_solutions(instance) != 1 or classical_energy(instance, instance.known_solution or "") != 0:
            raise GenerationError(n, used_seed, f"generated instance for seed {used_seed} failed re-verification")
        path = directory / instance_filename(n, used_seed)
        save_instance(path, instance)
        paths.append(path)
        entries.append(
            {
                "file": path.name,
                "seed": used_seed,
                "n": instance.n,
                "m": instance.m,
                "solution": instance.known_solution,
                "generation": instance.metadata.get("generation", {}),
            }
        )
        tprint(f"[CLI][INFO] wrote {path} (m={instance.m}, m/n={instance.clause_density:.3f})")
    save_json(directory / "manifest.json", {"n": n, "count": count, "seed": seed, "instances": entries})
    return paths


def default_run_csv(instance_path: str | Path, chi: int, T: float) -> Path:
    p = Path(instance_path)
    return Path("runs") / f"{p.stem}_chi{chi}_T{T:g}.csv"


def cmd_run(
    instance_path: str | Path, schedule: Schedule, config: RunConfig, out_path: str | Path
) -> RunRecord:
    instance = load_instance(instance_path)
    engine = AdiabaticEngine(instance, schedule, config)
    with RunCsvWriter(out_path) as writer:
        writer.attach(engine.bus)
        record = engine.run()
    write_run_manifest(manifest_path(out_path), record, {"instance": str(instance_path)})
    if config.record_spectra:
        write_spectra(spectra_path(out_path), record)
    tprint(f"[CLI][INFO] wrote {writer.rows} rows to {out_path}")
    return record


def cmd_sweep(spec: SweepSpec) -> list[dict[str, Any]]:
    return run_sweep(spec)


def cmd_min_t(
    instances: list[Path],
    chi: int,
    ladder: list[float],
    delta: float,
    inner_delta: float | None,
    out_dir: str | Path,
    *,
    workers: int = 1,
    sign: int = -1,
    renormalize: bool = False,
) -> tuple[list[dict[str, Any]], list[MinTStats]]:
    return run_min_t(
        instances, chi, ladder, delta, inner_delta, Path(out_dir), workers=workers, sign=sign, renormalize=renormalize
    )


@dataclass(frozen=True)
class FitOutcome:
    result: FitResult
    source: str
    s: float | None

    def to_dict(self) -> dict[str, Any]:
        payload = self.result.to_dict()
        payload.update(source=self.source, s=self.s)
        return payload


def cmd_fit_schmidt(
    *,
    spectra: str | Path | None = None,
    spectrum: str | Path | None = None,
    s_point: float = 0.69,
    cut: int | None = None,
) -> FitOutcome:
    if (spectra is None) == (spectrum is None):
        raise ValueError("give exactly one of a spectra JSON or a raw spectrum file")
    if spectrum is not None:
        outcome = FitOutcome(fit_schmidt_decay(load_spectrum_file(spectrum)), str(spectrum), None)
    else:
        s, values = spectrum_near(spectra, s_point, cut)  # type: ignore[arg-type]
        outcome = FitOutcome(fit_schmidt_decay(values), str(spectra), s)
    fit = outcome.result
    log("FIT", f"b={fit.b:.4f} c={fit.c:.4f} d={fit.d:.4f} rms={fit.residual:.3e} over {fit.points} values", "INFO")
    return outcome


def cmd_oracle_check(
    n_max: int, seed: int, *, chi: int | None = None, tamper: float | None = None
) -> OracleReport:
    report = run_oracle_check(n_max, seed, chi=chi, tamper=tamper)
    for failure in report.failures():
        tprint(
            f"[ORACLE][ERROR] {failure.name} n={failure.n} seed={failure.seed} "
            f"deviation={failure.max_deviation:.3e} trace={' '.join(failure.trace[:12])}"
        )
    return report
