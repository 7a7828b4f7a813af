"""Gate application, Schmidt truncation and SWAP routing on an MpsState."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from itertools import combinations
from typing import Literal

import numpy as np
import scipy.linalg

from mps_module.gates import SWAP_MATRIX, OneQubitGate, TwoQubitGate
from mps_module.layout import SiteLayout
from mps_module.state import MpsState
from utils.log_utils import tprint
from utils.settings_store import deep_log, is_deep_logging

Decomposition = Literal["svd", "density"]
ClauseTriple = tuple[int, int, int]


@dataclass(frozen=True)
class TruncationReport:
    """Outcome of re-splitting one bond after a two-qubit update (cut is 1-based)."""

    cut: int
    pre_rank: int
    post_rank: int
    discarded_weight: float

    @property
    def truncated(self) -> bool:
        return self.post_rank < self.pre_rank or self.discarded_weight > 0.0


@dataclass
class SwapTally:
    """Routing cost of a clause sweep against independent per-pair routing."""

    achieved: int = 0
    naive: int = 0
    clauses: int = 0
    deferred_keeps: int = 0

    @property
    def saving_fraction(self) -> float:
        if self.naive == 0:
            return 0.0
        return 1.0 - self.achieved / self.naive

    def merge(self, other: SwapTally) -> None:
        self.achieved += other.achieved
        self.naive += other.naive
        self.clauses += other.clauses
        self.deferred_keeps += other.deferred_keeps

    def to_dict(self) -> dict[str, float]:
        return {
            "achieved_swaps": self.achieved,
            "naive_swaps": self.naive,
            "clauses": self.clauses,
            "deferred_keeps": self.deferred_keeps,
            "saving_fraction": round(self.saving_fraction, 6),
        }


def normalize_clause(clause: Sequence[int], n: int) -> ClauseTriple:
    """Sorted, validated 1-based triple."""
    members = tuple(int(q) for q in clause)
    if len(members) != 3:
        raise ValueError(f"a clause needs exactly three qubits (got {clause!r})")
    if len(set(members)) != 3:
        raise ValueError(f"clause members must be distinct (got {clause!r})")
    if any(not 1 <= q <= n for q in members):
        raise ValueError(f"clause {clause!r} has a qubit outside [1, {n}]")
    i, j, k = sorted(members)
    return i, j, k


def naive_clause_swaps(clause: ClauseTriple) -> int:
    """SWAPs used by three independent apply_two_qubit calls from home positions."""
    return sum(2 * (b - a - 1) for a, b in combinations(clause, 2))


def order_clauses(clauses: Sequence[Sequence[int]]) -> list[ClauseTriple]:
    """Deterministic sweep order: by lowest qubit, then by span."""
    triples = [tuple(sorted(int(q) for q in clause)) for clause in clauses]
    return sorted(triples, key=lambda c: (c[0], c[2] - c[0], c))  # type: ignore[return-value]


def _unitary_sqrt(matrix: np.ndarray) -> np.ndarray:
    diagonal = np.diag(np.diag(matrix))
    if np.array_equal(diagonal, matrix):
        return np.diag(np.sqrt(np.diag(matrix).astype(np.complex128)))
    return scipy.linalg.sqrtm(matrix).astype(np.complex128)


def _fix_phases(left: np.ndarray, right: np.ndarray) -> None:
    """Make the largest entry of every left singular vector real and positive (in place)."""
    if left.shape[1] == 0:
        return
    pivots = np.argmax(np.abs(left), axis=0)
    pivot_values = left[pivots, np.arange(left.shape[1])]
    magnitudes = np.abs(pivot_values)
    phases = np.where(magnitudes > 0, pivot_values / np.where(magnitudes > 0, magnitudes, 1.0), 1.0)
    left *= phases.conj()[None, :]
    right *= phases[:, None]


class GateEngine:
    """Applies gates to one exclusively owned MpsState.

    Sites passed to apply_one_qubit / apply_two_qubit / apply_clause are logical qubits
    (1-based) resolved through the layout; apply_two_qubit_adjacent and apply_swap act on
    physical positions (1-based) and leave the layout untouched.
    """

    def __init__(
        self,
        state: MpsState,
        *,
        decomposition: Decomposition = "svd",
        renormalize: bool = False,
        defer_returns: bool = True,
    ) -> None:
        if decomposition not in ("svd", "density"):
            raise ValueError(f"unknown decomposition '{decomposition}'")
        self.state = state
        self.decomposition: Decomposition = decomposition
        self.renormalize = renormalize
        self.defer_returns = defer_returns
        self.layout = SiteLayout(state.n)
        self.swap_count = 0
        self.one_qubit_count = 0
        self.two_qubit_count = 0
        self.discarded_total = 0.0

    # -- validation ---------------------------------------------------

    def _check_site(self, site: int, upper: int, label: str = "site") -> int:
        if not isinstance(site, (int, np.integer)) or not 1 <= site <= upper:
            raise ValueError(f"{label} must be in [1, {upper}] (got {site})")
        return int(site) - 1

    # -- one-qubit gates ----------------------------------------------

    def apply_one_qubit(self, site: int, gate: OneQubitGate) -> None:
        """Local update A'^{i'} = Σ_i U_{i'i} A^{i}; only Γ at the qubit's position changes."""
        qubit = self._check_site(site, self.state.n)
        position = self.layout.position(qubit)
        gamma = self.state.site_tensors[position]
        if gate.is_diagonal:
            updated = gamma * np.diag(gate.entries)[:, None, None]
        else:
            updated = np.einsum("ij,jlr->ilr", gate.entries, gamma)
        self.state.site_tensors[position] = updated
        self.one_qubit_count += 1

    # -- adjacent two-qubit gates ---------------------------------------

    def apply_two_qubit_adjacent(self, left_site: int, gate: TwoQubitGate) -> TruncationReport:
        position = self._check_site(left_site, self.state.n - 1, "left_site")
        report = self._apply_adjacent(position, gate.entries)
        self.two_qubit_count += 1
        return report

    def apply_swap(self, left_site: int) -> TruncationReport:
        position = self._check_site(left_site, self.state.n - 1, "left_site")
        report = self._apply_adjacent(position, SWAP_MATRIX)
        self.swap_count += 1
        return report

    def _decompose(self, matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if self.decomposition == "density":
            return self._decompose_density(matrix)
        try:
            left, values, right = scipy.linalg.svd(matrix, full_matrices=False, lapack_driver="gesdd")
        except np.linalg.LinAlgError:
            tprint("[GATES][WARN] gesdd did not converge, retrying with gesvd")
            left, values, right = scipy.linalg.svd(matrix, full_matrices=False, lapack_driver="gesvd")
        order = np.argsort(-values, kind="stable")
        return left[:, order], values[order], right[order, :]

    def _decompose_density(self, matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Schmidt data from the reduced density matrix of the right block, restricted to its support."""
        rho = matrix.conj().T @ matrix
        rho = 0.5 * (rho + rho.conj().T)
        weights, vectors = np.linalg.eigh(rho)
        order = np.argsort(-weights, kind="stable")
        weights = np.clip(weights[order], 0.0, None)
        vectors = vectors[:, order]
        values = np.sqrt(weights)
        support = max(1, int(np.count_nonzero(values > self.state.lambda_floor)))
        values = values[:support]
        vectors = vectors[:, :support]
        safe = np.where(values > 0, values, 1.0)
        left = (matrix @ vectors) / safe[None, :]
        return left, values, vectors.conj().T

    def _apply_adjacent(self, position: int, matrix: np.ndarray) -> TruncationReport:
        state = self.state
        lam_left = state.left_lambda(position)
        lam_mid = state.schmidt_vectors[position]
        lam_right = state.right_lambda(position + 1)
        weighted_a = state.site_tensors[position] * lam_left[None, :, None] * lam_mid[None, None, :]
        weighted_b = state.site_tensors[position + 1] * lam_right[None, None, :]
        dim_left, dim_right = weighted_a.shape[1], weighted_b.shape[2]

        theta = np.einsum("kam,lmg->klag", weighted_a, weighted_b, optimize=True)
        theta = np.einsum("ijkl,klag->iajg", matrix.reshape(2, 2, 2, 2), theta, optimize=True)
        left, values, right = self._decompose(theta.reshape(2 * dim_left, 2 * dim_right))
        _fix_phases(left, right)

        pre_rank = max(1, int(np.count_nonzero(values > state.lambda_floor)))
        post_rank = min(pre_rank, state.chi_cap)
        discarded = float(np.sum(values[post_rank:] ** 2))
        kept = values[:post_rank].astype(np.float64)
        if self.renormalize and discarded > 0.0:
            kept = kept / np.linalg.norm(kept)

        new_a = left[:, :post_rank].reshape(2, dim_left, post_rank) / lam_left[None, :, None]
        new_b = right[:post_rank, :].reshape(post_rank, 2, dim_right).transpose(1, 0, 2)
        new_b = new_b / lam_right[None, None, :]

        state.site_tensors[position] = new_a
        state.site_tensors[position + 1] = new_b
        state.schmidt_vectors[position] = kept
        state.discarded_weights[position] += discarded
        self.discarded_total += discarded

        report = TruncationReport(
            cut=position + 1, pre_rank=pre_rank, post_rank=post_rank, discarded_weight=discarded
        )
        if report.truncated and is_deep_logging():
            deep_log(
                f"[DEEP][GATES] truncate cut={report.cut} rank {pre_rank}->{post_rank} "
                f"discarded={discarded:.3e}"
            )
        return report

    # -- routed gates ---------------------------------------------------

    def _route_swap(self, position: int) -> TruncationReport:
        report = self._apply_adjacent(position, SWAP_MATRIX)
        self.layout.swap(position)
        self.swap_count += 1
        return report

    def _oriented(self, first: int, second: int, gate: TwoQubitGate) -> np.ndarray:
        """Gate matrix for logical (first, second) placed on physically adjacent positions."""
        return gate.entries if self.layout.position(first) < self.layout.position(second) else gate.reversed().entries

    def _apply_pair(self, first: int, second: int, gate: TwoQubitGate) -> TruncationReport:
        pa, pb = self.layout.position(first), self.layout.position(second)
        if abs(pa - pb) != 1:
            raise RuntimeError(f"qubits {first + 1} and {second + 1} are not adjacent (positions {pa}, {pb})")
        report = self._apply_adjacent(min(pa, pb), self._oriented(first, second, gate))
        self.two_qubit_count += 1
        return report

    def apply_two_qubit(
        self, site_i: int, site_j: int, gate: TwoQubitGate, *, return_home: bool = True
    ) -> list[TruncationReport]:
        """Route site_i next to site_j with SWAPs, apply the gate (site_i is its first qubit), route back."""
        qi = self._check_site(site_i, self.state.n, "site_i")
        qj = self._check_site(site_j, self.state.n, "site_j")
        if qi == qj:
            raise ValueError(f"two-qubit gate needs distinct sites (got {site_i} twice)")
        reports: list[TruncationReport] = []
        moves: list[int] = []
        if self.layout.position(qi) < self.layout.position(qj):
            while self.layout.position(qi) < self.layout.position(qj) - 1:
                moves.append(self.layout.position(qi))
                reports.append(self._route_swap(moves[-1]))
        else:
            while self.layout.position(qi) > self.layout.position(qj) + 1:
                moves.append(self.layout.position(qi) - 1)
                reports.append(self._route_swap(moves[-1]))
        reports.append(self._apply_pair(qi, qj, gate))
        if return_home:
            for position in reversed(moves):
                reports.append(self._route_swap(position))
        return reports

    # -- clause routing -------------------------------------------------

    @staticmethod
    def _plan_gather(layout: SiteLayout, members: Sequence[int]) -> list[int]:
        """Swaps that bring the outer members next to the physically central one (mutates layout)."""
        x, y, z = sorted(members, key=layout.position)
        swaps: list[int] = []
        while layout.position(x) < layout.position(y) - 1:
            swaps.append(layout.position(x))
            layout.swap(swaps[-1])
        while layout.position(z) > layout.position(y) + 1:
            swaps.append(layout.position(z) - 1)
            layout.swap(swaps[-1])
        return swaps

    @staticmethod
    def _plan_settle(layout: SiteLayout, keep: frozenset[int]) -> list[int]:
        """Bubble non-kept qubits toward home; kept qubits stay put (mutates layout)."""
        swaps: list[int] = []
        changed = True
        while changed:
            changed = False
            for position in range(layout.n - 1):
                a, b = layout.qubit_at(position), layout.qubit_at(position + 1)
                if a in keep or b in keep or a < b:
                    continue
                layout.swap(position)
                swaps.append(position)
                changed = True
        return swaps

    def _choose_keep(self, members: Sequence[int], next_members: Sequence[int] | None) -> frozenset[int]:
        """Shared qubits worth leaving in place: the subset minimizing settle + next gather SWAPs."""
        if not self.defer_returns or next_members is None:
            return frozenset()
        shared = sorted(set(members) & set(next_members))
        best: frozenset[int] = frozenset()
        best_cost: int | None = None
        for size in range(len(shared) + 1):
            for subset in combinations(shared, size):
                trial = self.layout.copy()
                cost = len(self._plan_settle(trial, frozenset(subset)))
                cost += len(self._plan_gather(trial, next_members))
                if best_cost is None or cost < best_cost:
                    best, best_cost = frozenset(subset), cost
        return best

    def restore_layout(self) -> list[TruncationReport]:
        """Return every qubit home using exactly layout.inversions() SWAPs."""
        plan = self._plan_settle(self.layout.copy(), frozenset())
        return [self._route_swap(position) for position in plan]

    def apply_clause(
        self,
        clause: Sequence[int],
        two_qubit_gates: Mapping[tuple[int, int], TwoQubitGate] | Sequence[TwoQubitGate],
        one_qubit_gates: Sequence[OneQubitGate],
        next_clause: Sequence[int] | None = None,
    ) -> list[TruncationReport]:
        """Gather a clause around its central qubit, apply its phase gates, then settle.

        two_qubit_gates are for the pairs (i,j), (i,k), (j,k) of the sorted clause, each with
        the lower qubit first; one_qubit_gates are for i, j, k. Qubits shared with next_clause
        may be left displaced when that saves SWAPs; with no next_clause the layout is
        restored to identity.
        """
        i, j, k = normalize_clause(clause, self.state.n)
        pair_gates = self._pair_gate_map((i, j, k), two_qubit_gates)
        if len(one_qubit_gates) != 3:
            raise ValueError("apply_clause needs one one-qubit gate per clause member")
        members = (i - 1, j - 1, k - 1)
        upcoming = None
        if next_clause is not None:
            upcoming = tuple(q - 1 for q in normalize_clause(next_clause, self.state.n))

        reports = [self._route_swap(p) for p in self._plan_gather(self.layout.copy(), members)]
        for qubit, gate in zip((i, j, k), one_qubit_gates):
            self.apply_one_qubit(qubit, gate)
        reports.extend(self._apply_triple(members, pair_gates))

        keep = self._choose_keep(members, upcoming)
        if keep and is_deep_logging():
            deep_log(f"[DEEP][GATES] clause {(i, j, k)} defers return of {sorted(q + 1 for q in keep)}")
        reports.extend(self._route_swap(p) for p in self._plan_settle(self.layout.copy(), keep))
        return reports

    def _pair_gate_map(
        self,
        clause: ClauseTriple,
        gates: Mapping[tuple[int, int], TwoQubitGate] | Sequence[TwoQubitGate],
    ) -> dict[tuple[int, int], TwoQubitGate]:
        i, j, k = clause
        pairs = [(i, j), (i, k), (j, k)]
        if isinstance(gates, Mapping):
            missing = [pair for pair in pairs if pair not in gates]
            if missing:
                raise ValueError(f"missing two-qubit gates for pairs {missing}")
            return {(a - 1, b - 1): gates[(a, b)] for a, b in pairs}
        if len(gates) != 3:
            raise ValueError("apply_clause needs three two-qubit gates")
        return {(a - 1, b - 1): gate for (a, b), gate in zip(pairs, gates)}

    def _apply_triple(
        self, members: Sequence[int], pair_gates: Mapping[tuple[int, int], TwoQubitGate]
    ) -> list[TruncationReport]:
        """Three pair gates on a contiguous triple x-y-z with no net permutation.

        For commuting (diagonal) gates the x-z interaction is bridged by splitting the x-y gate
        into two square-root halves, each fused with an exchange:
        (SWAP·√G_xy) on x,y; G_xz on x,z; (SWAP·√G_xy) on y,x; G_yz. No plain SWAP is used.
        Non-commuting gates keep the product order G_yz·G_xz·G_xy and pay one plain SWAP.
        """
        x, y, z = sorted(members, key=self.layout.position)

        def gate_for(a: int, b: int) -> tuple[TwoQubitGate, bool]:
            return (pair_gates[(a, b)], False) if (a, b) in pair_gates else (pair_gates[(b, a)], True)

        def oriented(a: int, b: int) -> np.ndarray:
            gate, flipped = gate_for(a, b)
            matrix = gate.reversed().entries if flipped else gate.entries
            # matrix now has a as its first qubit
            return matrix if self.layout.position(a) < self.layout.position(b) else SWAP_MATRIX @ matrix @ SWAP_MATRIX

        reports: list[TruncationReport] = []
        base = self.layout.position(x)
        if not all(gate.is_diagonal for gate in pair_gates.values()):
            reports.append(self._apply_adjacent(base, SWAP_MATRIX @ oriented(x, y)))
            self.layout.swap(base)
            reports.append(self._apply_adjacent(base + 1, oriented(x, z)))
            reports.append(self._route_swap(base))
            reports.append(self._apply_adjacent(base + 1, oriented(y, z)))
            self.two_qubit_count += 3
            return reports

        half_xy = _unitary_sqrt(oriented(x, y))
        reports.append(self._apply_adjacent(base, SWAP_MATRIX @ half_xy))
        self.layout.swap(base)
        reports.append(self._apply_adjacent(base + 1, oriented(x, z)))
        # positions now hold y, x: the same half gate seen from y's side, then exchanged back
        reports.append(self._apply_adjacent(base, SWAP_MATRIX @ (SWAP_MATRIX @ half_xy @ SWAP_MATRIX)))
        self.layout.swap(base)
        reports.append(self._apply_adjacent(base + 1, oriented(y, z)))
        self.two_qubit_count += 4
        return reports

    def clause_sweep(
        self,
        clauses: Sequence[ClauseTriple],
        bundles: Sequence[tuple[Sequence[TwoQubitGate], Sequence[OneQubitGate]]],
    ) -> tuple[list[TruncationReport], SwapTally]:
        """apply_clause over an ordered list with next-clause lookahead; ends in identity layout."""
        if len(clauses) != len(bundles):
            raise ValueError("one gate bundle per clause is required")
        start = self.swap_count
        tally = SwapTally(clauses=len(clauses))
        reports: list[TruncationReport] = []
        for index, clause in enumerate(clauses):
            upcoming = clauses[index + 1] if index + 1 < len(clauses) else None
            two_qubit, one_qubit = bundles[index]
            reports.extend(self.apply_clause(clause, two_qubit, one_qubit, upcoming))
            if not self.layout.is_identity():
                tally.deferred_keeps += 1
            tally.naive += naive_clause_swaps(tuple(sorted(clause)))  # type: ignore[arg-type]
        reports.extend(self.restore_layout())
        tally.achieved = self.swap_count - start
        return reports, tally
