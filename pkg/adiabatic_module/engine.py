"""Trotterized adiabatic evolution of an MPS register from |+…+⟩ toward the H_P ground state."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from adiabatic_module.hamiltonian import ClauseBundle, clause_gate_bundle, mixer_gate
from adiabatic_module.observables import energy_reading, most_probable_bitstring, success_reading
from adiabatic_module.schedule import RunConfig, Schedule
from exact_cover.instance import MAX_EXHAUSTIVE_QUBITS, ExactCoverInstance, count_solutions, solve_exhaustive
from mps_module.contraction import TransferEnvironment
from mps_module.gate_engine import GateEngine, SwapTally, TruncationReport, order_clauses
from mps_module.gates import OneQubitGate
from mps_module.state import MpsState, product_state
from utils.event_bus import EventBus
from utils.log_utils import tprint
from utils.rate_meter import RateMeter
from utils.settings_store import deep_log, is_deep_logging

NORM_COLLAPSE_THRESHOLD = 1e-12
SAMPLE_TOPIC = "sample"

SAMPLE_COLUMNS = (
    "s",
    "energy_norm",
    "energy_raw",
    "norm2",
    "entropy_halfcut",
    "p_success_norm",
    "p_success_raw",
    "discarded_cum",
    "wall_clock",
)


class NumericalAbortError(RuntimeError):
    """The register lost (almost) all of its norm to truncation."""

    def __init__(self, step: int, s: float, norm_squared: float) -> None:
        super().__init__(
            f"norm collapse at step {step} (s={s:.6f}): norm^2={norm_squared:.3e} < {NORM_COLLAPSE_THRESHOLD:g}"
        )
        self.code = "norm_collapse"
        self.step = step
        self.s = s
        self.norm_squared = norm_squared


@dataclass(frozen=True)
class StepDiagnostics:
    s: float
    substeps: int
    max_pre_rank: int
    max_post_rank: int
    truncations: int
    discarded_weight: float
    swaps: int
    naive_swaps: int
    phase_angle: float


@dataclass(frozen=True)
class SampleRow:
    s: float
    energy_norm: float
    energy_raw: float
    norm2: float
    entropy_halfcut: float
    p_success_norm: float
    p_success_raw: float
    discarded_cum: float
    wall_clock: float

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass
class RunRecord:
    n: int
    m: int
    schedule: dict[str, Any]
    config: dict[str, Any]
    rows: list[SampleRow] = field(default_factory=list)
    target_solution: str | None = None
    argmax_bitstring: str = ""
    argmax_probability: float = 0.0
    solved: bool = False
    global_phase_angle: float = 0.0
    swap_tally: SwapTally = field(default_factory=SwapTally)
    spectra: list[dict[str, Any]] = field(default_factory=list)
    steps_completed: int = 0
    wall_seconds: float = 0.0
    steps_per_second: float = 0.0
    seconds_per_step: float = 0.0
    bond_dimensions: list[int] = field(default_factory=list)

    @property
    def final_row(self) -> SampleRow:
        return self.rows[-1]

    def summary(self) -> dict[str, Any]:
        final = self.rows[-1] if self.rows else None
        return {
            "n": self.n,
            "m": self.m,
            "solved": self.solved,
            "argmax_bitstring": self.argmax_bitstring,
            "argmax_probability": self.argmax_probability,
            "target_solution": self.target_solution,
            "final_p_success": final.p_success_norm if final else None,
            "final_norm2": final.norm2 if final else None,
            "discarded_cum": final.discarded_cum if final else None,
            "global_phase_angle": self.global_phase_angle,
            "swap_tally": self.swap_tally.to_dict(),
            "steps_completed": self.steps_completed,
            "wall_seconds": round(self.wall_seconds, 6),
            "steps_per_second": self.steps_per_second,
            "seconds_per_step": self.seconds_per_step,
            "bond_dimensions": list(self.bond_dimensions),
        }


def _summarize(s: float, substeps: int, reports: list[TruncationReport], tally: SwapTally, phase: float) -> StepDiagnostics:
    return StepDiagnostics(
        s=s,
        substeps=substeps,
        max_pre_rank=max((r.pre_rank for r in reports), default=1),
        max_post_rank=max((r.post_rank for r in reports), default=1),
        truncations=sum(1 for r in reports if r.truncated),
        discarded_weight=float(sum(r.discarded_weight for r in reports)),
        swaps=tally.achieved,
        naive_swaps=tally.naive,
        phase_angle=phase,
    )


def trotter_step(
    state: MpsState | GateEngine,
    instance: ExactCoverInstance,
    s: float,
    schedule: Schedule,
    config: RunConfig,
    *,
    clauses: list[tuple[int, int, int]] | None = None,
) -> StepDiagnostics:
    """One Δ step at fixed s: Δ/δ repetitions of half-mixer, clause sweep, half-mixer."""
    engine = state if isinstance(state, GateEngine) else GateEngine(
        state,
        decomposition=config.decomposition,  # type: ignore[arg-type]
        renormalize=config.renormalize_after_truncation,
        defer_returns=config.defer_returns,
    )
    if engine.state.n != instance.n:
        raise ValueError(f"state has {engine.state.n} qubits but the instance has {instance.n}")
    ordered = clauses if clauses is not None else order_clauses([c.as_tuple() for c in instance.clauses])
    delta = schedule.inner_delta
    sign = config.evolution_sign
    mixers: list[tuple[int, OneQubitGate]] = [
        (q, mixer_gate(d, s, delta, sign)) for q, d in enumerate(instance.degrees(), start=1) if d > 0
    ]
    bundles: list[ClauseBundle] = [
        clause_gate_bundle(clause, s, delta, sign, literal=config.literal_clause_phases) for clause in ordered
    ]
    gate_bundles = [(b.two_qubit, b.one_qubit) for b in bundles]

    reports: list[TruncationReport] = []
    tally = SwapTally()
    phase = 0.0
    for _ in range(schedule.substeps):
        for qubit, gate in mixers:
            engine.apply_one_qubit(qubit, gate)
        sweep_reports, sweep_tally = engine.clause_sweep(ordered, gate_bundles)
        reports.extend(sweep_reports)
        tally.merge(sweep_tally)
        phase += sum(b.phase_angle for b in bundles)
        for qubit, gate in mixers:
            engine.apply_one_qubit(qubit, gate)
    diagnostics = _summarize(s, schedule.substeps, reports, tally, phase)
    if is_deep_logging():
        deep_log(
            f"[DEEP][ADIABATIC] step s={s:.5f} max_rank={diagnostics.max_pre_rank} "
            f"discarded={diagnostics.discarded_weight:.3e} swaps={tally.achieved}/{tally.naive}"
        )
    return diagnostics


def _target_solution(instance: ExactCoverInstance) -> str | None:
    if instance.known_solution is not None:
        return instance.known_solution
    if instance.n > MAX_EXHAUSTIVE_QUBITS:
        return None
    if count_solutions(instance) != 1:
        return None
    return solve_exhaustive(instance, limit=1)[0]


class AdiabaticEngine:
    """Owns one register and walks it through the schedule, sampling observables on the way."""

    def __init__(
        self,
        instance: ExactCoverInstance,
        schedule: Schedule,
        config: RunConfig,
        bus: EventBus | None = None,
    ) -> None:
        if instance.n < 2:
            raise ValueError(f"an adiabatic run needs at least 2 qubits (got {instance.n})")
        self.instance = instance
        self.schedule = schedule
        self.config = config
        self.bus = bus or EventBus()
        self.clauses = order_clauses([c.as_tuple() for c in instance.clauses])
        self.state = product_state(instance.n, plus=True, chi_cap=config.chi_cap)
        self.engine = GateEngine(
            self.state,
            decomposition=config.decomposition,  # type: ignore[arg-type]
            renormalize=config.renormalize_after_truncation,
            defer_returns=config.defer_returns,
        )
        cut = config.entropy_cut if config.entropy_cut is not None else self.state.half_cut()
        if not 1 <= cut <= instance.n - 1:
            raise ValueError(f"entropy cut must be in [1, {instance.n - 1}] (got {cut})")
        self.entropy_cut = cut
        self.target = _target_solution(instance)
        self._started = 0.0

    def step(self, s: float) -> StepDiagnostics:
        return trotter_step(self.engine, self.instance, s, self.schedule, self.config, clauses=self.clauses)

    def sample(self, s: float, record: RunRecord) -> SampleRow:
        env = TransferEnvironment(self.state)
        energy = energy_reading(self.state, self.instance, s, env)
        if self.target is not None:
            success = success_reading(self.state, self.target, energy.norm_squared)
            p_norm, p_raw = success.normalized, success.raw
        else:
            p_norm = p_raw = float("nan")
        row = SampleRow(
            s=s,
            energy_norm=energy.normalized,
            energy_raw=energy.raw,
            norm2=energy.norm_squared,
            entropy_halfcut=self.state.entanglement_entropy(self.entropy_cut),
            p_success_norm=p_norm,
            p_success_raw=p_raw,
            discarded_cum=float(sum(self.state.discarded_weights)),
            wall_clock=time.perf_counter() - self._started,
        )
        record.rows.append(row)
        if self.config.record_spectra:
            spectrum = self.state.schmidt_spectrum(self.entropy_cut)
            record.spectra.append({"s": s, "cut": spectrum.cut, "values": list(spectrum.values)})
        self.bus.publish(SAMPLE_TOPIC, row)
        tprint(
            f"[ADIABATIC][DEBUG] s={s:.4f} E={row.energy_norm:.6f} norm2={row.norm2:.9f} "
            f"S={row.entropy_halfcut:.4f} p={row.p_success_norm:.6f} chi_max={max(self.state.bond_dimensions())}"
        )
        return row

    def run(self) -> RunRecord:
        instance, schedule, config = self.instance, self.schedule, self.config
        record = RunRecord(
            n=instance.n,
            m=instance.m,
            schedule=schedule.to_dict(),
            config=config.to_dict(),
            target_solution=self.target,
        )
        meter = RateMeter()
        self._started = time.perf_counter()
        total_steps = schedule.M
        tprint(
            f"[ADIABATIC][INFO] run n={instance.n} m={instance.m} T={schedule.T} M={total_steps} "
            f"chi={config.chi_cap} sign={config.evolution_sign:+d}"
        )
        for step_index in range(total_steps):
            s = schedule.s_at(step_index)
            if step_index % config.observable_stride == 0:
                self.sample(s, record)
            diagnostics = self.step(s)
            meter.tick()
            record.steps_completed = step_index + 1
            record.global_phase_angle += diagnostics.phase_angle
            record.swap_tally.merge(
                SwapTally(diagnostics.swaps, diagnostics.naive_swaps, len(self.clauses) * schedule.substeps)
            )
            norm2 = self.state.norm_squared()
            if not np.isfinite(norm2) or norm2 < NORM_COLLAPSE_THRESHOLD:
                tprint(f"[ADIABATIC][ERROR] norm collapse at step {step_index} (s={s:.5f}, norm^2={norm2:.3e})")
                raise NumericalAbortError(step_index, s, norm2)
        self.sample(schedule.s_at(total_steps), record)

        bits, probability = most_probable_bitstring(self.state)
        record.argmax_bitstring = bits
        record.argmax_probability = probability
        if instance.known_solution is not None:
            record.solved = bits == instance.known_solution
        else:
            record.solved = instance.is_satisfied_by(bits)
        record.wall_seconds = time.perf_counter() - self._started
        record.steps_per_second = meter.rate()
        record.seconds_per_step = meter.seconds_per_step()
        record.bond_dimensions = self.state.bond_dimensions()
        tprint(
            f"[ADIABATIC][INFO] done solved={record.solved} argmax={bits} p={probability:.6f} "
            f"norm2={record.final_row.norm2:.9f} swaps={record.swap_tally.achieved}/{record.swap_tally.naive} "
            f"({record.steps_per_second} steps/s)"
        )
        return record


def run(
    instance: ExactCoverInstance,
    schedule: Schedule,
    config: RunConfig,
    bus: EventBus | None = None,
) -> RunRecord:
    return AdiabaticEngine(instance, schedule, config, bus).run()
