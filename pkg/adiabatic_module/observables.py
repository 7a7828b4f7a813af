"""Energy, success probability and most-probable bitstring of an MPS register.

All observables come in a normalized form (divided by ⟨ψ|ψ⟩) and a raw form, since truncation
lets the norm drift below one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from exact_cover.instance import ExactCoverInstance
from mps_module.contraction import TransferEnvironment
from mps_module.gates import PAULI_X_MATRIX, Z_PROJECTOR
from mps_module.state import MpsState, parse_bits
from utils.settings_store import get_setting


@dataclass(frozen=True)
class EnergyReading:
    normalized: float
    raw: float
    norm_squared: float
    mixer_part: float
    problem_part: float


def _check_dims(state: MpsState, instance: ExactCoverInstance) -> None:
    if state.n != instance.n:
        raise ValueError(f"state has {state.n} qubits but the instance has {instance.n}")


def energy_reading(
    state: MpsState,
    instance: ExactCoverInstance,
    s: float,
    env: TransferEnvironment | None = None,
) -> EnergyReading:
    """⟨H(s)⟩ from one- and two-point functions.

    H_P uses Σ_clauses [1 − Σz + 2Σzz] (exact on z ∈ {0,1}); H₀ uses Σ d_q (1 − σˣ_q)/2.
    """
    _check_dims(state, instance)
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must be in [0, 1] (got {s})")
    env = env or TransferEnvironment(state)
    norm2 = env.norm_squared()
    degrees = instance.degrees()

    mixer = 0.0
    if s < 1.0:
        for q, d in enumerate(degrees):
            if d:
                mixer += d * (norm2 - env.one_point(q, PAULI_X_MATRIX).real) / 2.0

    problem = 0.0
    if s > 0.0:
        singles: dict[int, float] = {}
        pairs: dict[tuple[int, int], float] = {}

        def z(q: int) -> float:
            if q not in singles:
                singles[q] = env.one_point(q, Z_PROJECTOR).real
            return singles[q]

        def zz(a: int, b: int) -> float:
            if (a, b) not in pairs:
                pairs[(a, b)] = env.two_point(a, Z_PROJECTOR, b, Z_PROJECTOR).real
            return pairs[(a, b)]

        for clause in instance.clauses:
            i, j, k = (q - 1 for q in clause)
            problem += norm2 - z(i) - z(j) - z(k) + 2.0 * (zz(i, j) + zz(i, k) + zz(j, k))

    raw = (1.0 - s) * mixer + s * problem
    normalized = raw / norm2 if norm2 > 0 else float("nan")
    return EnergyReading(normalized, raw, norm2, mixer, problem)


def energy_expectation(state: MpsState, instance: ExactCoverInstance, s: float) -> float:
    """⟨ψ|H(s)|ψ⟩ / ⟨ψ|ψ⟩."""
    return energy_reading(state, instance, s).normalized


@dataclass(frozen=True)
class SuccessReading:
    normalized: float
    raw: float


def success_reading(state: MpsState, solution: str, norm_squared: float | None = None) -> SuccessReading:
    parse_bits(solution, state.n)
    raw = abs(state.amplitude(solution)) ** 2
    norm2 = state.norm_squared() if norm_squared is None else norm_squared
    return SuccessReading(raw / norm2 if norm2 > 0 else float("nan"), raw)


def success_probability(state: MpsState, solution: str) -> float:
    """|⟨solution|ψ⟩|² / ⟨ψ|ψ⟩."""
    return success_reading(state, solution).normalized


def most_probable_bitstring(
    state: MpsState, env: TransferEnvironment | None = None
) -> tuple[str, float]:
    """(bitstring, normalized probability) of the largest amplitude.

    Exact by dense enumeration up to argmax_dense_max_qubits; above that, each bit is fixed
    in turn by its larger conditional marginal.
    """
    limit = int(get_setting("argmax_dense_max_qubits"))
    if state.n <= limit:
        probabilities = np.abs(state.to_statevector()) ** 2
        total = float(probabilities.sum())
        best = int(np.argmax(probabilities))
        bits = format(best, f"0{state.n}b")
        return bits, float(probabilities[best]) / total if total > 0 else float("nan")
    env = env or TransferEnvironment(state)
    bits, weight = env.greedy_bitstring()
    norm2 = env.norm_squared()
    return bits, weight / norm2 if norm2 > 0 else float("nan")
