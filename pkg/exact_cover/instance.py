"""Exact Cover instances, classical energy and exhaustive solution counting."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from mps_module.state import parse_bits

MAX_EXHAUSTIVE_QUBITS = 32
MAX_LISTED_SOLUTIONS = 1 << 22


@dataclass(frozen=True, order=True)
class Clause:
    """Three distinct 1-based qubit indices, stored sorted."""

    i: int
    j: int
    k: int

    def __post_init__(self) -> None:
        members = (int(self.i), int(self.j), int(self.k))
        if len(set(members)) != 3:
            raise ValueError(f"clause members must be distinct (got {members})")
        i, j, k = sorted(members)
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "k", k)

    @classmethod
    def of(cls, members: Iterable[int]) -> Clause:
        values = tuple(members)
        if len(values) != 3:
            raise ValueError(f"a clause needs exactly three qubits (got {values})")
        return cls(*values)

    def as_tuple(self) -> tuple[int, int, int]:
        return self.i, self.j, self.k

    def __iter__(self):
        return iter(self.as_tuple())

    def energy(self, values: Sequence[int]) -> int:
        """(b_i + b_j + b_k - 1)^2 for 0-indexed bit values."""
        total = values[self.i - 1] + values[self.j - 1] + values[self.k - 1]
        return (total - 1) ** 2


@dataclass(frozen=True)
class ExactCoverInstance:
    n: int
    clauses: tuple[Clause, ...]
    known_solution: str | None = None
    metadata: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"n must be a positive integer (got {self.n})")
        clauses = tuple(c if isinstance(c, Clause) else Clause.of(c) for c in self.clauses)
        for clause in clauses:
            if clause.k > self.n or clause.i < 1:
                raise ValueError(f"clause {clause.as_tuple()} has a qubit outside [1, {self.n}]")
        object.__setattr__(self, "clauses", clauses)
        if self.known_solution is not None:
            parse_bits(self.known_solution, self.n)

    @property
    def m(self) -> int:
        return len(self.clauses)

    @property
    def clause_density(self) -> float:
        return self.m / self.n

    def degrees(self) -> list[int]:
        """d_q for q = 1..n (returned 0-indexed)."""
        counts = [0] * self.n
        for clause in self.clauses:
            for q in clause:
                counts[q - 1] += 1
        return counts

    def is_satisfied_by(self, bits: str | Sequence[int]) -> bool:
        return classical_energy(self, bits) == 0


def classical_energy(instance: ExactCoverInstance, bits: str | Sequence[int]) -> int:
    """Σ over clauses of (b_i + b_j + b_k − 1)²; zero iff bits satisfy every clause."""
    values = parse_bits(bits if isinstance(bits, str) else list(bits), instance.n)
    return sum(clause.energy(values) for clause in instance.clauses)


def degree(instance: ExactCoverInstance, qubit: int) -> int:
    if not 1 <= qubit <= instance.n:
        raise ValueError(f"qubit must be in [1, {instance.n}] (got {qubit})")
    return sum(1 for clause in instance.clauses if qubit in clause.as_tuple())


class SolutionSet:
    """Satisfying assignments of the clauses seen so far, kept only over covered qubits.

    Assignments are bit masks where qubit q (1-based) is bit n - q, so a mask read as a
    binary number is the bitstring with qubit 1 leftmost. Uncovered qubits are free, so
    the solution count is len(survivors) * 2**uncovered.
    """

    def __init__(self, n: int) -> None:
        if not 1 <= n <= MAX_EXHAUSTIVE_QUBITS:
            raise ValueError(f"exhaustive counting supports 1 <= n <= {MAX_EXHAUSTIVE_QUBITS} (got {n})")
        self.n = n
        self.covered: set[int] = set()
        self.survivors = np.zeros(1, dtype=np.uint64)

    def _bit(self, qubit: int) -> np.uint64:
        return np.uint64(1) << np.uint64(self.n - qubit)

    def count(self) -> int:
        return int(self.survivors.size) << (self.n - len(self.covered))

    def filtered(self, clause: Clause) -> tuple[np.ndarray, set[int]]:
        """Survivors after adding clause, without mutating the set."""
        survivors = self.survivors
        covered = set(self.covered)
        for q in clause:
            if q in covered:
                continue
            survivors = np.concatenate([survivors, survivors | self._bit(q)])
            covered.add(q)
        ones = np.zeros(survivors.shape, dtype=np.uint8)
        for q in clause:
            ones += ((survivors & self._bit(q)) != 0).astype(np.uint8)
        return survivors[ones == 1], covered

    def count_with(self, clause: Clause) -> int:
        survivors, covered = self.filtered(clause)
        return int(survivors.size) << (self.n - len(covered))

    def add(self, clause: Clause) -> int:
        self.survivors, self.covered = self.filtered(clause)
        return self.count()

    def bitstrings(self, limit: int | None = None) -> list[str]:
        """Expand survivors over the free qubits, in lexicographic order."""
        free = [q for q in range(1, self.n + 1) if q not in self.covered]
        if self.count() > MAX_LISTED_SOLUTIONS:
            raise ValueError(f"refusing to list {self.count()} solutions (limit {MAX_LISTED_SOLUTIONS})")
        masks = self.survivors
        for q in free:
            masks = np.concatenate([masks, masks | self._bit(q)])
        masks = np.sort(masks)
        if limit is not None:
            masks = masks[:limit]
        return [format(int(mask), f"0{self.n}b") for mask in masks]


def _solution_set(instance: ExactCoverInstance) -> SolutionSet:
    if instance.n > MAX_EXHAUSTIVE_QUBITS:
        raise ValueError(f"exhaustive counting refuses n={instance.n} > {MAX_EXHAUSTIVE_QUBITS}")
    solutions = SolutionSet(instance.n)
    for clause in instance.clauses:
        if solutions.add(clause) == 0:
            break
    return solutions


def count_solutions(instance: ExactCoverInstance) -> int:
    return _solution_set(instance).count()


def solve_exhaustive(instance: ExactCoverInstance, limit: int | None = None) -> list[str]:
    """Satisfying bitstrings in lexicographic order, at most `limit` of them."""
    solutions = _solution_set(instance)
    if solutions.count() == 0:
        return []
    return solutions.bitstrings(limit)
