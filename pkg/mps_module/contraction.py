"""Transfer-matrix environments for expectation values on an MpsState."""

from __future__ import annotations

import numpy as np

from mps_module.state import MpsState


def transfer_left(env: np.ndarray, tensor: np.ndarray, op: np.ndarray | None = None) -> np.ndarray:
    """Absorb one site into a left environment E[bra, ket]; op acts on the ket index."""
    ket = tensor if op is None else np.einsum("ij,jlr->ilr", op, tensor)
    return np.einsum("ilr,lm,imq->rq", tensor.conj(), env, ket, optimize=True)


def transfer_right(env: np.ndarray, tensor: np.ndarray, op: np.ndarray | None = None) -> np.ndarray:
    """Absorb one site into a right environment E[bra, ket]."""
    ket = tensor if op is None else np.einsum("ij,jlr->ilr", op, tensor)
    return np.einsum("ilr,rq,imq->lm", tensor.conj(), env, ket, optimize=True)


class TransferEnvironment:
    """Cached left/right environments of <ψ|ψ> for O(n χ³) local expectation values.

    Site arguments are 0-based. All returned values are raw (not divided by the norm).
    """

    def __init__(self, state: MpsState) -> None:
        self.n = state.n
        self._tensors = [state.weighted_tensor(a) for a in range(state.n)]
        unit = np.ones((1, 1), dtype=np.complex128)
        self._left: list[np.ndarray] = [unit]
        for tensor in self._tensors:
            self._left.append(transfer_left(self._left[-1], tensor))
        right: list[np.ndarray] = [unit]
        for tensor in reversed(self._tensors):
            right.append(transfer_right(right[-1], tensor))
        self._right = list(reversed(right))

    def norm_squared(self) -> float:
        return float(self._left[self.n][0, 0].real)

    def one_point(self, site: int, op: np.ndarray) -> complex:
        env = transfer_left(self._left[site], self._tensors[site], op)
        return complex(np.sum(env * self._right[site + 1]))

    def two_point(self, site_a: int, op_a: np.ndarray, site_b: int, op_b: np.ndarray) -> complex:
        if site_a == site_b:
            return self.one_point(site_a, op_a @ op_b)
        if site_a > site_b:
            site_a, op_a, site_b, op_b = site_b, op_b, site_a, op_a
        env = transfer_left(self._left[site_a], self._tensors[site_a], op_a)
        for c in range(site_a + 1, site_b):
            env = transfer_left(env, self._tensors[c])
        env = transfer_left(env, self._tensors[site_b], op_b)
        return complex(np.sum(env * self._right[site_b + 1]))

    def greedy_bitstring(self) -> tuple[str, float]:
        """Pick each bit in turn by its larger conditional marginal; returns (bits, raw probability)."""
        projectors = (np.diag([1.0, 0.0]).astype(np.complex128), np.diag([0.0, 1.0]).astype(np.complex128))
        env = self._left[0]
        bits: list[str] = []
        weight = self.norm_squared()
        for a in range(self.n):
            candidates = []
            for bit in (0, 1):
                branch = transfer_left(env, self._tensors[a], projectors[bit])
                candidates.append((float(np.sum(branch * self._right[a + 1]).real), branch))
            pick = 0 if candidates[0][0] >= candidates[1][0] else 1
            weight, env = candidates[pick]
            bits.append(str(pick))
        return "".join(bits), max(weight, 0.0)
