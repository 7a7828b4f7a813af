"""Bundled MPS-versus-dense equivalence corpus used by the oracle-check command."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from adiabatic_module.engine import trotter_step
from adiabatic_module.hamiltonian import clause_gate_bundle
from adiabatic_module.observables import energy_reading, success_reading
from adiabatic_module.schedule import RunConfig, Schedule
from exact_cover.instance import Clause, ExactCoverInstance
from mps_module.gate_engine import GateEngine, order_clauses
from mps_module.gates import OneQubitGate, TwoQubitGate, random_unitary, unitarity_defect
from mps_module.state import product_state
from oracle_module.dense import (
    EXPONENTIAL_MAX_QUBITS,
    DenseHamiltonian,
    dense_apply_gate,
    dense_entropy,
    dense_product_state,
    dense_schmidt,
    dense_success_probability,
    dense_trotter_step,
    problem_diagonal,
)
from utils.log_utils import tprint
from utils.settings_store import get_setting

MIN_CHECK_QUBITS = 4
UNITARITY_TOLERANCE = 1e-12


@dataclass
class CheckResult:
    name: str
    n: int
    max_deviation: float
    passed: bool
    seed: int
    trace: list[str] = field(default_factory=list)


@dataclass
class OracleReport:
    n_max: int
    seed: int
    chi: int | None
    tolerance: float
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(check.passed for check in self.checks)

    @property
    def max_deviation(self) -> float:
        return max((check.max_deviation for check in self.checks), default=0.0)

    def failures(self) -> list[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["passed"] = self.passed
        data["max_deviation"] = self.max_deviation
        return data


@dataclass(frozen=True)
class _GateOp:
    sites: tuple[int, ...]
    matrix: np.ndarray
    label: str


def _random_program(n: int, rng: np.random.Generator, depth: int) -> list[_GateOp]:
    program: list[_GateOp] = []
    for index in range(depth):
        if rng.random() < 0.4:
            q = int(rng.integers(1, n + 1))
            program.append(_GateOp((q,), random_unitary(2, rng), f"U1#{index}@{q}"))
        else:
            a, b = (int(v) for v in rng.choice(np.arange(1, n + 1), size=2, replace=False))
            program.append(_GateOp((a, b), random_unitary(4, rng), f"U2#{index}@{a},{b}"))
    return program


def _random_instance(n: int, rng: np.random.Generator) -> ExactCoverInstance:
    m = max(1, int(round(0.8 * n)))
    clauses = [Clause(*(int(v) for v in rng.choice(np.arange(1, n + 1), size=3, replace=False))) for _ in range(m)]
    return ExactCoverInstance(n, tuple(clauses))


def _check_program(n: int, seed: int, chi: int, tolerance: float, program: list[_GateOp]) -> CheckResult:
    state = product_state(n, "0" * n, chi_cap=chi)
    engine = GateEngine(state)
    dense = dense_product_state(n, "0" * n)
    for op in program:
        if len(op.sites) == 1:
            engine.apply_one_qubit(op.sites[0], OneQubitGate(op.matrix, label=op.label))
        else:
            engine.apply_two_qubit(op.sites[0], op.sites[1], TwoQubitGate(op.matrix, label=op.label))
        dense_apply_gate(dense, op.sites, op.matrix)

    vector = state.to_statevector()
    deviations = [float(np.max(np.abs(vector - dense.amplitudes)))]
    deviations.append(abs(state.norm_squared() - dense.norm_squared()))
    cut = state.half_cut()
    deviations.append(abs(state.entanglement_entropy(cut) - dense_entropy(dense, cut)))
    stored = np.array(state.schmidt_spectrum(cut).values)
    exact = dense_schmidt(dense, cut)[: stored.shape[0]]
    deviations.append(float(np.max(np.abs(stored - exact))))
    bits = "".join("1" if (q % 2) else "0" for q in range(n))
    deviations.append(abs(abs(state.amplitude(bits)) ** 2 - abs(dense.amplitude(bits)) ** 2))
    worst = max(deviations)
    return CheckResult("gate_program", n, worst, worst <= tolerance, seed, [op.label for op in program])


def _check_observables(n: int, seed: int, chi: int, tolerance: float, rng: np.random.Generator) -> CheckResult:
    instance = _random_instance(n, rng)
    program = _random_program(n, rng, 2 * n)
    state = product_state(n, plus=True, chi_cap=chi)
    engine = GateEngine(state)
    dense = dense_product_state(n, plus=True)
    for op in program:
        if len(op.sites) == 1:
            engine.apply_one_qubit(op.sites[0], OneQubitGate(op.matrix))
        else:
            engine.apply_two_qubit(op.sites[0], op.sites[1], TwoQubitGate(op.matrix))
        dense_apply_gate(dense, op.sites, op.matrix)
    s = float(rng.uniform(0.05, 0.95))
    target = "".join(str(int(b)) for b in rng.integers(0, 2, size=n))
    energy = energy_reading(state, instance, s)
    deviations = [
        abs(energy.normalized - DenseHamiltonian(instance, s).expectation(dense.amplitudes)),
        abs(success_reading(state, target).normalized - dense_success_probability(dense, target)),
    ]
    worst = max(deviations)
    trace = [f"s={s:.6f}", f"target={target}"] + [op.label for op in program]
    return CheckResult("observables", n, worst, worst <= tolerance, seed, trace)


def _check_clause_sweep(n: int, seed: int, chi: int, tolerance: float, rng: np.random.Generator) -> CheckResult:
    instance = _random_instance(n, rng)
    s, delta, sign = float(rng.uniform(0.1, 0.9)), 0.125, -1
    ordered = order_clauses([c.as_tuple() for c in instance.clauses])
    bundles = [clause_gate_bundle(clause, s, delta, sign) for clause in ordered]

    state = product_state(n, plus=True, chi_cap=chi)
    engine = GateEngine(state)
    _, tally = engine.clause_sweep(ordered, [(b.two_qubit, b.one_qubit) for b in bundles])
    phase = np.exp(1j * sum(b.phase_angle for b in bundles))

    dense = dense_product_state(n, plus=True)
    dense.amplitudes = np.exp(sign * 1j * delta * s * problem_diagonal(instance)) * dense.amplitudes
    worst = float(np.max(np.abs(state.to_statevector() * phase - dense.amplitudes)))
    if not engine.layout.is_identity():
        worst = max(worst, 1.0)
    trace = [f"s={s:.6f}", f"swaps={tally.achieved}/{tally.naive}"] + [str(c) for c in ordered]
    return CheckResult("clause_sweep", n, worst, worst <= tolerance, seed, trace)


def _check_trotter_step(n: int, seed: int, chi: int, tolerance: float, rng: np.random.Generator) -> CheckResult:
    instance = _random_instance(n, rng)
    schedule = Schedule(T=1.0, delta_cap=0.25, inner_delta=0.125)
    config = RunConfig(chi_cap=chi)
    s = float(rng.uniform(0.1, 0.9))
    state = product_state(n, plus=True, chi_cap=chi)
    diagnostics = trotter_step(state, instance, s, schedule, config)
    dense = dense_product_state(n, plus=True)
    dense_trotter_step(dense, instance, s, schedule, config.evolution_sign)
    vector = state.to_statevector() * np.exp(1j * diagnostics.phase_angle)
    worst = float(np.max(np.abs(vector - dense.amplitudes)))
    return CheckResult("trotter_step", n, worst, worst <= tolerance, seed, [f"s={s:.6f}"])


def _unitarity_precheck(programs: dict[int, list[_GateOp]], seed: int) -> CheckResult | None:
    for n, program in programs.items():
        for op in program:
            defect = unitarity_defect(op.matrix)
            if defect > UNITARITY_TOLERANCE:
                return CheckResult("unitarity", n, defect, False, seed, [op.label])
    return None


def run_oracle_check(
    n_max: int,
    seed: int,
    chi: int | None = None,
    tamper: float | None = None,
    tolerance: float | None = None,
) -> OracleReport:
    """Run the corpus for n = 4..n_max.

    chi=None gives every register enough bond dimension to be exact. tamper adds the given
    amount to one entry of the first gate, which the unitarity pre-check must catch before
    any equivalence comparison runs.
    """
    if not MIN_CHECK_QUBITS <= n_max <= EXPONENTIAL_MAX_QUBITS:
        raise ValueError(f"n_max must be in [{MIN_CHECK_QUBITS}, {EXPONENTIAL_MAX_QUBITS}] (got {n_max})")
    if chi is not None and chi < 1:
        raise ValueError(f"chi must be >= 1 (got {chi})")
    limit = float(tolerance if tolerance is not None else get_setting("oracle_tolerance"))
    report = OracleReport(n_max=n_max, seed=seed, chi=chi, tolerance=limit)

    sizes = list(range(MIN_CHECK_QUBITS, n_max + 1))
    programs = {n: _random_program(n, np.random.default_rng([seed, n, 0]), 3 * n) for n in sizes}
    if tamper:
        first = programs[sizes[0]][0]
        broken = np.array(first.matrix, copy=True)
        broken[0, 0] += tamper
        programs[sizes[0]][0] = _GateOp(first.sites, broken, f"{first.label}(tampered)")
    failure = _unitarity_precheck(programs, seed)
    if failure is not None:
        report.checks.append(failure)
        tprint(f"[ORACLE][ERROR] unitarity pre-check failed for {failure.trace[0]} (defect {failure.max_deviation:.3e})")
        return report

    for n in sizes:
        cap = chi if chi is not None else 2 ** (n // 2)
        rng = np.random.default_rng([seed, n, 1])
        report.checks.append(_check_program(n, seed, cap, limit, programs[n]))
        report.checks.append(_check_observables(n, seed, cap, limit, rng))
        report.checks.append(_check_clause_sweep(n, seed, cap, limit, rng))
        report.checks.append(_check_trotter_step(n, seed, cap, limit, rng))
    for check in report.checks:
        level = "DEBUG" if check.passed else "WARN"
        tprint(f"[ORACLE][{level}] {check.name} n={check.n} max_dev={check.max_deviation:.3e}")
    tprint(f"[ORACLE][INFO] {len(report.checks)} checks, passed={report.passed}, max_dev={report.max_deviation:.3e}")
    return report
