"""Gate factors of the split e^{±iδ/2(1−s)H₀} e^{±iδsH_P} e^{±iδ/2(1−s)H₀}.

H₀ = Σ_q d_q/2 (1 − σˣ_q) and H_P = Σ_clauses (z_i + z_j + z_k − 1)² with z = (1 − σᶻ)/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from mps_module.gates import (
    PAULI_X_MATRIX,
    Z_PROJECTOR,
    OneQubitGate,
    TwoQubitGate,
    controlled_phase_gate,
    phase_gate,
)


@dataclass(frozen=True)
class ClauseBundle:
    """Factors of e^{±iδs(z_i+z_j+z_k−1)²}; the scalar e^{i·phase_angle} is never applied."""

    clause: tuple[int, int, int]
    one_qubit: tuple[OneQubitGate, OneQubitGate, OneQubitGate]
    two_qubit: tuple[TwoQubitGate, TwoQubitGate, TwoQubitGate]
    phase_angle: float

    @property
    def global_phase(self) -> complex:
        return complex(np.exp(1j * self.phase_angle))


def _check_inputs(s: float, delta: float, sign: int) -> None:
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must be in [0, 1] (got {s})")
    if delta < 0:
        raise ValueError(f"delta must be non-negative (got {delta})")
    if sign not in (-1, 1):
        raise ValueError(f"sign must be +1 or -1 (got {sign})")


def mixer_gate(d_i: int, s: float, delta: float, sign: int = -1) -> OneQubitGate:
    """exp(sign·i·(δ/4)(1−s)d_i(1−σˣ)): 1 on |+>, exp(sign·i·(δ/2)(1−s)d_i) on |->."""
    if d_i < 0:
        raise ValueError(f"degree must be non-negative (got {d_i})")
    _check_inputs(s, delta, sign)
    minus = np.exp(sign * 1j * (delta / 2.0) * (1.0 - s) * d_i)
    entries = 0.5 * np.array([[1 + minus, 1 - minus], [1 - minus, 1 + minus]], dtype=np.complex128)
    return OneQubitGate(entries, label=f"MIX(d={d_i})")


def literal_mixer_gate(d_i: int, s: float, delta: float, sign: int = -1) -> OneQubitGate:
    """Same factor by explicit matrix exponential, for cross-checks."""
    _check_inputs(s, delta, sign)
    generator = (delta / 4.0) * (1.0 - s) * d_i * (np.eye(2) - PAULI_X_MATRIX)
    return OneQubitGate(scipy.linalg.expm(sign * 1j * generator), label=f"MIX*(d={d_i})")


def clause_gate_bundle(
    clause: tuple[int, int, int], s: float, delta: float, sign: int = -1, *, literal: bool = False
) -> ClauseBundle:
    """Expand (z_i+z_j+z_k−1)² = 1 − Σz + 2Σzz on {0,1} into one- and two-qubit phases.

    With literal=True the one-qubit factors are built as expm(sign·i·δs(z²−2z)) instead of
    the simplified diag(1, e^{−sign·iδs}); both agree to machine precision.
    """
    _check_inputs(s, delta, sign)
    angle = sign * delta * s
    if literal:
        generator = Z_PROJECTOR @ Z_PROJECTOR - 2.0 * Z_PROJECTOR
        single = OneQubitGate(scipy.linalg.expm(1j * angle * generator), label="ZPHASE*")
    else:
        single = phase_gate(-angle, label="ZPHASE")
    pair = controlled_phase_gate(2.0 * angle, label="ZZPHASE")
    i, j, k = sorted(int(q) for q in clause)
    return ClauseBundle(
        clause=(i, j, k),
        one_qubit=(single, single, single),
        two_qubit=(pair, pair, pair),
        phase_angle=angle,
    )
