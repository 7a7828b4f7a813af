"""Dense one- and two-qubit gate matrices with unitarity validation."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np

UNITARY_TOLERANCE = 1e-12


class GateValidationError(ValueError):
    """Gate matrix rejected before it touches a state."""

    def __init__(self, code: str, message: str) -> None:
        super().__init__(message)
        self.code = code


def _frozen_matrix(entries: np.ndarray | list, dim: int) -> np.ndarray:
    matrix = np.array(entries, dtype=np.complex128)
    if matrix.shape != (dim, dim):
        raise GateValidationError("gate_shape", f"expected a {dim}x{dim} matrix, got shape {matrix.shape}")
    matrix.setflags(write=False)
    return matrix


def unitarity_defect(matrix: np.ndarray) -> float:
    """Largest entry of |U†U − I|."""
    product = matrix.conj().T @ matrix
    return float(np.max(np.abs(product - np.eye(matrix.shape[0]))))


def _check_unitary(matrix: np.ndarray, label: str) -> None:
    defect = unitarity_defect(matrix)
    if defect > UNITARY_TOLERANCE:
        raise GateValidationError(
            "gate_not_unitary", f"{label} is not unitary (|U^dag U - I| = {defect:.3e})"
        )


@dataclass(frozen=True, eq=False)
class OneQubitGate:
    """2x2 matrix U acting as A'^{i'} = sum_i U_{i' i} A^{i}."""

    entries: np.ndarray
    unitary: bool = True
    label: str = field(default="U1", compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", _frozen_matrix(self.entries, 2))
        if self.unitary:
            _check_unitary(self.entries, self.label)

    @property
    def is_diagonal(self) -> bool:
        return bool(self.entries[0, 1] == 0 and self.entries[1, 0] == 0)


@dataclass(frozen=True, eq=False)
class TwoQubitGate:
    """4x4 matrix; row/column index is 2*(first qubit bit) + (second qubit bit)."""

    entries: np.ndarray
    unitary: bool = True
    label: str = field(default="U2", compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", _frozen_matrix(self.entries, 4))
        if self.unitary:
            _check_unitary(self.entries, self.label)

    @property
    def is_diagonal(self) -> bool:
        return bool(np.count_nonzero(self.entries - np.diag(np.diag(self.entries))) == 0)

    def tensor(self) -> np.ndarray:
        """Entries reshaped to [i'_a, i'_b, i_a, i_b]."""
        return self.entries.reshape(2, 2, 2, 2)

    def reversed(self) -> TwoQubitGate:
        """Same operation with the roles of the two qubits exchanged."""
        swapped = SWAP_MATRIX @ self.entries @ SWAP_MATRIX
        return TwoQubitGate(swapped, unitary=self.unitary, label=f"{self.label}~")


IDENTITY_MATRIX = np.eye(2, dtype=np.complex128)
PAULI_X_MATRIX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
HADAMARD_MATRIX = np.array([[1, 1], [1, -1]], dtype=np.complex128) / sqrt(2)
# z = (1 - sigma_z) / 2 with eigenvalues 0, 1.
Z_PROJECTOR = np.array([[0, 0], [0, 1]], dtype=np.complex128)
SWAP_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)
# Maps |00> to (|00> + |11>)/sqrt(2).
BELL_ENTANGLER_MATRIX = np.array(
    [
        [1 / sqrt(2), 0, 0, 1 / sqrt(2)],
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [1 / sqrt(2), 0, 0, -1 / sqrt(2)],
    ],
    dtype=np.complex128,
)

IDENTITY = OneQubitGate(IDENTITY_MATRIX, label="I")
HADAMARD = OneQubitGate(HADAMARD_MATRIX, label="H")
SWAP = TwoQubitGate(SWAP_MATRIX, label="SWAP")
IDENTITY_2 = TwoQubitGate(np.eye(4), label="I2")
BELL_ENTANGLER = TwoQubitGate(BELL_ENTANGLER_MATRIX, label="BELL")


def phase_gate(phase: float, label: str = "P") -> OneQubitGate:
    """diag(1, e^{i phase})."""
    return OneQubitGate(np.diag([1.0, np.exp(1j * phase)]), label=label)


def controlled_phase_gate(phase: float, label: str = "CP") -> TwoQubitGate:
    """diag(1, 1, 1, e^{i phase})."""
    return TwoQubitGate(np.diag([1.0, 1.0, 1.0, np.exp(1j * phase)]), label=label)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a complex Gaussian."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_one_qubit_gate(rng: np.random.Generator) -> OneQubitGate:
    return OneQubitGate(random_unitary(2, rng), label="R1")


def random_two_qubit_gate(rng: np.random.Generator) -> TwoQubitGate:
    return TwoQubitGate(random_unitary(4, rng), label="R2")
