"""Logical-to-physical qubit placement on the chain."""

from __future__ import annotations


class SiteLayout:
    """Permutation map between logical qubits and physical chain positions (both 0-based)."""

    def __init__(self, n: int) -> None:
        if n < 1:
            raise ValueError(f"layout needs n >= 1 (got {n})")
        self.n = n
        self._position = list(range(n))
        self._qubit = list(range(n))

    def copy(self) -> SiteLayout:
        clone = SiteLayout(self.n)
        clone._position = list(self._position)
        clone._qubit = list(self._qubit)
        return clone

    def position(self, qubit: int) -> int:
        return self._position[qubit]

    def qubit_at(self, position: int) -> int:
        return self._qubit[position]

    def swap(self, left_position: int) -> None:
        """Record a physical SWAP between positions left_position and left_position + 1."""
        a, b = self._qubit[left_position], self._qubit[left_position + 1]
        self._qubit[left_position], self._qubit[left_position + 1] = b, a
        self._position[a], self._position[b] = left_position + 1, left_position

    def is_identity(self) -> bool:
        return all(p == q for q, p in enumerate(self._position))

    def inversions(self) -> int:
        """Adjacent SWAPs needed to restore the identity placement."""
        order = self._qubit
        return sum(1 for i in range(self.n) for j in range(i + 1, self.n) if order[i] > order[j])

    def as_tuple(self) -> tuple[int, ...]:
        """Logical qubit sitting at each physical position."""
        return tuple(self._qubit)

    def __repr__(self) -> str:
        return f"SiteLayout({list(self._qubit)})"
