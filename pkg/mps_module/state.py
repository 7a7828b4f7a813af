"""Vidal-form matrix product state register and its read-only queries."""

from __future__ import annotations

from dataclasses import dataclass
from math import log2

import numpy as np

from utils.settings_store import get_setting

MAX_STATEVECTOR_QUBITS = 20
NORMALIZATION_TOLERANCE = 1e-10


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Stored Schmidt coefficients at one cut plus the weight truncated there so far."""

    cut: int
    values: tuple[float, ...]
    discarded_weight: float

    @property
    def rank(self) -> int:
        return len(self.values)

    @property
    def weight(self) -> float:
        return float(sum(v * v for v in self.values))


def parse_bits(bits: str | list[int] | tuple[int, ...], n: int) -> list[int]:
    """Bitstring (qubit 1 leftmost) -> list of ints, validating length and alphabet."""
    if isinstance(bits, str):
        if any(ch not in "01" for ch in bits):
            raise ValueError(f"bitstring may only contain 0 and 1: {bits!r}")
        values = [int(ch) for ch in bits]
    else:
        values = [int(b) for b in bits]
        if any(b not in (0, 1) for b in values):
            raise ValueError(f"bits must be 0 or 1: {bits!r}")
    if len(values) != n:
        raise ValueError(f"bitstring length {len(values)} does not match n={n}")
    return values


class MpsState:
    """n-qubit open chain in Γ–λ form.

    site_tensors[a] has layout [physical i][left bond][right bond]; boundary bonds are 1.
    schmidt_vectors[a] holds λ for the cut between sites a and a+1 (0-based), so there
    are n-1 of them. Public cut numbers are 1-based: cut c sits between qubits c and c+1.
    """

    def __init__(
        self,
        site_tensors: list[np.ndarray],
        schmidt_vectors: list[np.ndarray],
        chi_cap: int,
        lambda_floor: float | None = None,
    ) -> None:
        n = len(site_tensors)
        if n < 1:
            raise ValueError("an MPS needs at least one site")
        if chi_cap < 1:
            raise ValueError(f"chi_cap must be >= 1 (got {chi_cap})")
        if len(schmidt_vectors) != n - 1:
            raise ValueError(f"expected {n - 1} Schmidt vectors, got {len(schmidt_vectors)}")
        self.n = n
        self.chi_cap = int(chi_cap)
        self.lambda_floor = float(lambda_floor if lambda_floor is not None else get_setting("lambda_floor"))
        if self.lambda_floor <= 0:
            raise ValueError("lambda_floor must be positive")
        self.site_tensors = [np.asarray(t, dtype=np.complex128) for t in site_tensors]
        self.schmidt_vectors = [np.asarray(v, dtype=np.float64) for v in schmidt_vectors]
        self.discarded_weights = [0.0] * (n - 1)
        self._check_shapes()

    def _check_shapes(self) -> None:
        for a, gamma in enumerate(self.site_tensors):
            if gamma.ndim != 3 or gamma.shape[0] != 2:
                raise ValueError(f"site {a + 1}: tensor must have shape (2, left, right), got {gamma.shape}")
        if self.site_tensors[0].shape[1] != 1 or self.site_tensors[-1].shape[2] != 1:
            raise ValueError("boundary bonds must have dimension 1")
        for a, lam in enumerate(self.schmidt_vectors):
            left = self.site_tensors[a].shape[2]
            right = self.site_tensors[a + 1].shape[1]
            if not (left == right == lam.shape[0]):
                raise ValueError(
                    f"cut {a + 1}: bond mismatch (left tensor {left}, λ {lam.shape[0]}, right tensor {right})"
                )

    # -- construction -------------------------------------------------

    def copy(self) -> MpsState:
        clone = MpsState(
            [t.copy() for t in self.site_tensors],
            [v.copy() for v in self.schmidt_vectors],
            self.chi_cap,
            self.lambda_floor,
        )
        clone.discarded_weights = list(self.discarded_weights)
        return clone

    # -- bookkeeping helpers -------------------------------------------

    def _cut_index(self, cut: int) -> int:
        if not isinstance(cut, (int, np.integer)) or not 1 <= cut <= self.n - 1:
            raise ValueError(f"cut must be in [1, {self.n - 1}] (got {cut})")
        return int(cut) - 1

    def left_lambda(self, site: int) -> np.ndarray:
        """λ on the bond left of 0-based site (ones at the boundary)."""
        return self.schmidt_vectors[site - 1] if site > 0 else np.ones(1)

    def right_lambda(self, site: int) -> np.ndarray:
        """λ on the bond right of 0-based site (ones at the boundary)."""
        return self.schmidt_vectors[site] if site < self.n - 1 else np.ones(1)

    def weighted_tensor(self, site: int) -> np.ndarray:
        """A = Γ λ for 0-based site: the right-weighted tensor used in contractions."""
        return self.site_tensors[site] * self.right_lambda(site)[None, None, :]

    def bond_dimensions(self) -> list[int]:
        return [int(v.shape[0]) for v in self.schmidt_vectors]

    # -- queries ------------------------------------------------------

    def amplitude(self, bits: str | list[int]) -> complex:
        """<bits|ψ> by left-to-right contraction at fixed physical indices."""
        values = parse_bits(bits, self.n)
        row = self.site_tensors[0][values[0], 0, :]
        for a in range(1, self.n):
            row = (row * self.schmidt_vectors[a - 1]) @ self.site_tensors[a][values[a]]
        return complex(row[0])

    def norm_squared(self) -> float:
        """<ψ|ψ> by full transfer-matrix contraction; canonical form is not assumed."""
        env = np.ones((1, 1), dtype=np.complex128)
        for a in range(self.n):
            tensor = self.weighted_tensor(a)
            env = np.einsum("ilr,lm,imq->rq", tensor.conj(), env, tensor, optimize=True)
        return float(env[0, 0].real)

    def schmidt_weight(self, cut: int) -> float:
        """Raw Σλ² at a cut."""
        lam = self.schmidt_vectors[self._cut_index(cut)]
        return float(np.dot(lam, lam))

    def entanglement_entropy(self, cut: int) -> float:
        """Von Neumann entropy in bits of the normalized spectrum p = λ²/Σλ²."""
        lam = self.schmidt_vectors[self._cut_index(cut)]
        weights = lam * lam
        total = float(weights.sum())
        if total <= 0.0:
            return 0.0
        probs = weights[weights > 0.0] / total
        entropy = -float(np.sum(probs * np.log2(probs)))
        return max(entropy, 0.0)

    def schmidt_spectrum(self, cut: int) -> SchmidtSpectrum:
        index = self._cut_index(cut)
        values = tuple(float(v) for v in self.schmidt_vectors[index])
        return SchmidtSpectrum(cut=index + 1, values=values, discarded_weight=float(self.discarded_weights[index]))

    def half_cut(self) -> int:
        return max(1, self.n // 2)

    def max_entropy_bound(self, cut: int) -> float:
        index = self._cut_index(cut)
        rank = min(2 ** min(cut, 60), 2 ** min(self.n - cut, 60), self.schmidt_vectors[index].shape[0])
        return log2(rank)

    def to_statevector(self) -> np.ndarray:
        """Dense amplitudes in lexicographic order (qubit 1 most significant)."""
        if self.n > MAX_STATEVECTOR_QUBITS:
            raise ValueError(f"to_statevector refuses n={self.n} > {MAX_STATEVECTOR_QUBITS}")
        psi = self.site_tensors[0][:, 0, :]
        for a in range(1, self.n):
            psi = psi * self.schmidt_vectors[a - 1][None, :]
            gamma = self.site_tensors[a]
            psi = np.einsum("pl,ilr->pir", psi, gamma).reshape(-1, gamma.shape[2])
        return psi[:, 0].copy()

    def __repr__(self) -> str:
        return f"MpsState(n={self.n}, chi_cap={self.chi_cap}, bonds={self.bond_dimensions()})"


def product_state(
    n: int,
    bits: str | list[int] | None = None,
    *,
    plus: bool = False,
    chi_cap: int = 1,
    lambda_floor: float | None = None,
) -> MpsState:
    """χ=1 product state: a computational basis state or the uniform |+...+> state."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer (got {n})")
    if (bits is None) == (not plus):
        raise ValueError("give exactly one of bits or plus=True")
    tensors: list[np.ndarray] = []
    if plus:
        amp = 1.0 / np.sqrt(2.0)
        for _ in range(n):
            tensors.append(np.full((2, 1, 1), amp, dtype=np.complex128))
    else:
        for b in parse_bits(bits, n):
            gamma = np.zeros((2, 1, 1), dtype=np.complex128)
            gamma[b, 0, 0] = 1.0
            tensors.append(gamma)
    lambdas = [np.ones(1) for _ in range(n - 1)]
    return MpsState(tensors, lambdas, chi_cap=chi_cap, lambda_floor=lambda_floor)
