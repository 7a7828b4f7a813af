"""Dense 2ⁿ state-vector reference for small registers.

Amplitudes are in lexicographic bitstring order with qubit 1 as the most significant bit,
the same convention as MpsState.to_statevector.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from adiabatic_module.schedule import Schedule
from exact_cover.instance import ExactCoverInstance
from mps_module.state import parse_bits

DENSE_MAX_QUBITS = 14
EXPONENTIAL_MAX_QUBITS = 12
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)


class OracleLimitError(ValueError):
    def __init__(self, n: int, limit: int, what: str) -> None:
        super().__init__(f"{what} refuses n={n} > {limit}")
        self.code = "oracle_limit"
        self.n = n
        self.limit = limit


def _guard(n: int, limit: int, what: str) -> None:
    if n > limit:
        raise OracleLimitError(n, limit, what)


@dataclass
class DenseState:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        _guard(self.n, DENSE_MAX_QUBITS, "dense state")
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if self.amplitudes.shape[0] != 2**self.n:
            raise ValueError(f"expected {2 ** self.n} amplitudes, got {self.amplitudes.shape[0]}")

    def copy(self) -> DenseState:
        return DenseState(self.n, self.amplitudes.copy())

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def amplitude(self, bits: str) -> complex:
        values = parse_bits(bits, self.n)
        return complex(self.amplitudes[int("".join(map(str, values)), 2)])


def dense_product_state(n: int, bits: str | None = None, *, plus: bool = False) -> DenseState:
    if (bits is None) == (not plus):
        raise ValueError("give exactly one of bits or plus=True")
    _guard(n, DENSE_MAX_QUBITS, "dense state")
    if plus:
        return DenseState(n, np.full(2**n, 2 ** (-n / 2), dtype=np.complex128))
    amplitudes = np.zeros(2**n, dtype=np.complex128)
    amplitudes[int("".join(map(str, parse_bits(bits, n))), 2)] = 1.0
    return DenseState(n, amplitudes)


def dense_apply_gate(state: DenseState, sites: Sequence[int], matrix: np.ndarray) -> None:
    """Apply a 2x2 (one site) or 4x4 (two sites, first site is the high bit) matrix in place."""
    targets = [int(q) for q in sites]
    if len(targets) not in (1, 2) or len(set(targets)) != len(targets):
        raise ValueError(f"need one or two distinct sites (got {sites!r})")
    if any(not 1 <= q <= state.n for q in targets):
        raise ValueError(f"sites must be in [1, {state.n}] (got {sites!r})")
    k = len(targets)
    gate = np.asarray(matrix, dtype=np.complex128)
    if gate.shape != (2**k, 2**k):
        raise ValueError(f"expected a {2 ** k}x{2 ** k} matrix for {k} site(s), got {gate.shape}")
    axes = [q - 1 for q in targets]
    tensor = state.amplitudes.reshape([2] * state.n)
    moved = np.moveaxis(tensor, axes, list(range(k)))
    shape = moved.shape
    updated = (gate @ moved.reshape(2**k, -1)).reshape(shape)
    state.amplitudes = np.moveaxis(updated, list(range(k)), axes).reshape(-1)


def _bit_table(n: int) -> np.ndarray:
    """bits[index, q] for q = 0..n-1 (qubit 1 first)."""
    index = np.arange(2**n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((index[:, None] >> shifts[None, :]) & 1).astype(np.int8)


def problem_diagonal(instance: ExactCoverInstance) -> np.ndarray:
    """Classical energy of every bitstring, lexicographic order."""
    _guard(instance.n, DENSE_MAX_QUBITS, "dense H_P")
    bits = _bit_table(instance.n)
    energies = np.zeros(2**instance.n, dtype=np.float64)
    for clause in instance.clauses:
        total = bits[:, clause.i - 1] + bits[:, clause.j - 1] + bits[:, clause.k - 1]
        energies += (total.astype(np.float64) - 1.0) ** 2
    return energies


@dataclass
class DenseHamiltonian:
    """H(s) = (1−s) Σ d_q (1 − σˣ_q)/2 + s·diag(H_P), kept as a diagonal plus degrees."""

    instance: ExactCoverInstance
    s: float
    diagonal: np.ndarray = field(init=False, repr=False)
    degrees: list[int] = field(init=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.s <= 1.0:
            raise ValueError(f"s must be in [0, 1] (got {self.s})")
        self.diagonal = problem_diagonal(self.instance)
        self.degrees = self.instance.degrees()

    @property
    def n(self) -> int:
        return self.instance.n

    def _flip(self, vec: np.ndarray, q: int) -> np.ndarray:
        tensor = vec.reshape([2] * self.n)
        return np.flip(tensor, axis=q).reshape(-1)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        out = self.s * self.diagonal * vec
        if self.s < 1.0:
            for q, d in enumerate(self.degrees):
                if d:
                    out = out + (1.0 - self.s) * d / 2.0 * (vec - self._flip(vec, q))
        return out

    def expectation(self, vec: np.ndarray, *, normalized: bool = True) -> float:
        raw = float(np.vdot(vec, self.apply(vec)).real)
        if not normalized:
            return raw
        return raw / float(np.vdot(vec, vec).real)

    def to_matrix(self) -> np.ndarray:
        _guard(self.n, EXPONENTIAL_MAX_QUBITS, "dense H(s) matrix")
        dim = 2**self.n
        index = np.arange(dim)
        matrix = np.zeros((dim, dim), dtype=np.float64)
        matrix[index, index] = self.s * self.diagonal + (1.0 - self.s) * sum(self.degrees) / 2.0
        for q, d in enumerate(self.degrees):
            if d:
                partner = index ^ (1 << (self.n - 1 - q))
                matrix[index, partner] -= (1.0 - self.s) * d / 2.0
        return matrix

    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.to_matrix())

    def spectral_gap(self) -> float:
        values = self.spectrum()
        return float(values[1] - values[0])


def dense_hamiltonian(instance: ExactCoverInstance, s: float) -> DenseHamiltonian:
    return DenseHamiltonian(instance, s)


def dense_exact_step(state: DenseState, instance: ExactCoverInstance, s: float, delta: float, sign: int = -1) -> None:
    """state ← exp(sign·iΔH(s)) state via the Hermitian eigendecomposition."""
    _guard(state.n, EXPONENTIAL_MAX_QUBITS, "dense exponential")
    if state.n != instance.n:
        raise ValueError(f"state has {state.n} qubits but the instance has {instance.n}")
    values, vectors = np.linalg.eigh(dense_hamiltonian(instance, s).to_matrix())
    coefficients = vectors.T @ state.amplitudes
    state.amplitudes = vectors @ (np.exp(sign * 1j * delta * values) * coefficients)


def _mixer_factor(d: int, s: float, delta: float, sign: int) -> np.ndarray:
    """exp(sign·i·(δ/4)(1−s)d(1−σˣ)) by direct exponentiation."""
    return scipy.linalg.expm(sign * 1j * (delta / 4.0) * (1.0 - s) * d * (np.eye(2) - PAULI_X))


def dense_trotter_step(
    state: DenseState, instance: ExactCoverInstance, s: float, schedule: Schedule, sign: int = -1
) -> None:
    """The same split as the MPS step, with the H_P factor applied as one diagonal (global phases included)."""
    if state.n != instance.n:
        raise ValueError(f"state has {state.n} qubits but the instance has {instance.n}")
    delta = schedule.inner_delta
    mixers = [(q, _mixer_factor(d, s, delta, sign)) for q, d in enumerate(instance.degrees(), start=1) if d]
    phases = np.exp(sign * 1j * delta * s * problem_diagonal(instance))
    for _ in range(schedule.substeps):
        for q, matrix in mixers:
            dense_apply_gate(state, (q,), matrix)
        state.amplitudes = phases * state.amplitudes
        for q, matrix in mixers:
            dense_apply_gate(state, (q,), matrix)


def dense_schmidt(state: DenseState, cut: int) -> np.ndarray:
    if not 1 <= cut <= state.n - 1:
        raise ValueError(f"cut must be in [1, {state.n - 1}] (got {cut})")
    matrix = state.amplitudes.reshape(2**cut, 2 ** (state.n - cut))
    values = np.linalg.svd(matrix, compute_uv=False)
    return np.sort(values)[::-1]


def dense_entropy(state: DenseState, cut: int, floor: float = 1e-12) -> float:
    values = dense_schmidt(state, cut)
    weights = values[values > floor] ** 2
    probs = weights / weights.sum()
    return max(0.0, -float(np.sum(probs * np.log2(probs))))


def dense_success_probability(state: DenseState, bits: str) -> float:
    return abs(state.amplitude(bits)) ** 2 / state.norm_squared()


@dataclass(frozen=True)
class DenseSample:
    s: float
    energy: float
    p_success: float
    entropy: float


@dataclass
class DenseRun:
    state: DenseState
    samples: list[DenseSample]


def dense_trotter_run(
    instance: ExactCoverInstance,
    schedule: Schedule,
    sign: int = -1,
    *,
    stride: int = 1,
    solution: str | None = None,
    entropy_cut: int | None = None,
) -> DenseRun:
    """Dense replay of the MPS run loop, sampling at the same s values."""
    state = dense_product_state(instance.n, plus=True)
    target = solution or instance.known_solution
    cut = entropy_cut if entropy_cut is not None else max(1, instance.n // 2)
    samples: list[DenseSample] = []

    def sample(s: float) -> None:
        energy = dense_hamiltonian(instance, s).expectation(state.amplitudes)
        p = dense_success_probability(state, target) if target else float("nan")
        samples.append(DenseSample(s, energy, p, dense_entropy(state, cut)))

    total = schedule.M
    for step in range(total):
        s = step / total
        if step % stride == 0:
            sample(s)
        dense_trotter_step(state, instance, s, schedule, sign)
    sample(1.0)
    return DenseRun(state, samples)
