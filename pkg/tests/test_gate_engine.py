"""Tests for GateEngine: local updates, truncation, SWAP routing and clause sweeps."""

from math import sqrt

import numpy as np
import pytest

from adiabatic_module.hamiltonian import clause_gate_bundle
from exact_cover.instance import ExactCoverInstance
from mps_module.gate_engine import GateEngine, SwapTally, naive_clause_swaps, order_clauses
from mps_module.gates import (
    BELL_ENTANGLER,
    HADAMARD,
    IDENTITY,
    IDENTITY_2,
    SWAP,
    GateValidationError,
    OneQubitGate,
    TwoQubitGate,
    controlled_phase_gate,
    random_one_qubit_gate,
    random_two_qubit_gate,
)
from mps_module.state import MpsState, product_state
from oracle_module.dense import dense_apply_gate, dense_product_state, dense_schmidt, problem_diagonal


def _scrambled(n: int, seed: int, chi_cap: int | None = None) -> tuple[MpsState, GateEngine]:
    rng = np.random.default_rng(seed)
    state = product_state(n, "0" * n, chi_cap=chi_cap or 2 ** (n // 2))
    engine = GateEngine(state)
    for _ in range(2 * n):
        engine.apply_one_qubit(int(rng.integers(1, n + 1)), random_one_qubit_gate(rng))
        engine.apply_two_qubit_adjacent(int(rng.integers(1, n)), random_two_qubit_gate(rng))
    return state, engine


class TestGates:
    """Test suite for gate validation."""

    def test_non_unitary_rejected(self):
        """Test a non-unitary matrix is refused at construction."""
        with pytest.raises(GateValidationError) as excinfo:
            OneQubitGate(np.array([[1.0, 0.0], [0.0, 2.0]]))
        assert excinfo.value.code == "gate_not_unitary"

    def test_wrong_shape_rejected(self):
        """Test a 3x3 matrix is not a one-qubit gate."""
        with pytest.raises(GateValidationError):
            OneQubitGate(np.eye(3))

    def test_reversed_controlled_phase_is_symmetric(self):
        """Test a controlled phase is unchanged by exchanging its qubits."""
        gate = controlled_phase_gate(0.3)
        np.testing.assert_allclose(gate.reversed().entries, gate.entries, atol=0)
        assert gate.is_diagonal

    def test_swap_not_diagonal(self):
        """Test SWAP is reported as non-diagonal."""
        assert not SWAP.is_diagonal


class TestLocalUpdates:
    """Test suite for one-qubit and adjacent two-qubit updates."""

    def test_worked_entangler_example(self):
        """Test |00> becomes (|00> + |11>)/√2 with λ = [1/√2, 1/√2] and unit Γ entries."""
        state = product_state(2, "00", chi_cap=2)
        report = GateEngine(state).apply_two_qubit_adjacent(1, BELL_ENTANGLER)
        np.testing.assert_allclose(state.to_statevector(), [1 / sqrt(2), 0, 0, 1 / sqrt(2)], atol=1e-12)
        np.testing.assert_allclose(state.schmidt_vectors[0], [1 / sqrt(2), 1 / sqrt(2)], atol=1e-12)
        expected_first = np.zeros((2, 1, 2))
        expected_first[0, 0, 0] = expected_first[1, 0, 1] = 1.0
        expected_second = np.zeros((2, 2, 1))
        expected_second[0, 0, 0] = expected_second[1, 1, 0] = 1.0
        np.testing.assert_allclose(state.site_tensors[0], expected_first, atol=1e-12)
        np.testing.assert_allclose(state.site_tensors[1], expected_second, atol=1e-12)
        assert report.pre_rank == 2
        assert report.discarded_weight == 0.0

    def test_identity_one_qubit_is_exact(self):
        """Test the identity gate leaves tensors bit-identical."""
        state, engine = _scrambled(4, seed=1)
        before = [t.copy() for t in state.site_tensors]
        engine.apply_one_qubit(2, IDENTITY)
        for old, new in zip(before, state.site_tensors):
            assert np.array_equal(old, new)

    def test_one_qubit_touches_only_its_site(self):
        """Test a one-qubit gate changes Γ at one site and no λ."""
        state, engine = _scrambled(5, seed=2)
        tensors = [t.copy() for t in state.site_tensors]
        lambdas = [v.copy() for v in state.schmidt_vectors]
        engine.apply_one_qubit(3, random_one_qubit_gate(np.random.default_rng(0)))
        for a in (0, 1, 3, 4):
            assert np.array_equal(tensors[a], state.site_tensors[a])
        for old, new in zip(lambdas, state.schmidt_vectors):
            assert np.array_equal(old, new)
        assert state.norm_squared() == pytest.approx(1.0, abs=1e-10)

    def test_hadamard_twice_restores(self):
        """Test H·H restores every amplitude."""
        state, engine = _scrambled(6, seed=4)
        before = state.to_statevector()
        engine.apply_one_qubit(4, HADAMARD)
        engine.apply_one_qubit(4, HADAMARD)
        np.testing.assert_allclose(state.to_statevector(), before, atol=1e-12)

    def test_identity_two_qubit(self):
        """Test the 4x4 identity keeps the state and discards nothing."""
        state, engine = _scrambled(5, seed=6)
        before = state.to_statevector()
        report = engine.apply_two_qubit_adjacent(2, IDENTITY_2)
        np.testing.assert_allclose(state.to_statevector(), before, atol=1e-12)
        assert report.discarded_weight == pytest.approx(0.0, abs=1e-24)

    def test_random_gate_matches_dense(self):
        """Test an adjacent random unitary agrees with the dense update."""
        rng = np.random.default_rng(21)
        program = [(int(rng.integers(1, 8)), random_two_qubit_gate(rng)) for _ in range(20)]
        state = product_state(8, "0" * 8, chi_cap=16)
        engine = GateEngine(state)
        dense = dense_product_state(8, "0" * 8)
        for left, gate in program:
            engine.apply_two_qubit_adjacent(left, gate)
            dense_apply_gate(dense, (left, left + 1), gate.entries)
        np.testing.assert_allclose(state.to_statevector(), dense.amplitudes, atol=1e-10)

    def test_density_path_matches_svd(self):
        """Test the reduced-density-matrix split agrees with the SVD split."""
        state, _ = _scrambled(6, seed=9)
        other = state.copy()
        gate = random_two_qubit_gate(np.random.default_rng(5))
        GateEngine(state).apply_two_qubit_adjacent(3, gate)
        GateEngine(other, decomposition="density").apply_two_qubit_adjacent(3, gate)
        np.testing.assert_allclose(other.to_statevector(), state.to_statevector(), atol=1e-10)
        np.testing.assert_allclose(other.schmidt_vectors[2], state.schmidt_vectors[2], atol=1e-10)

    def test_truncation_discards_dense_tail(self):
        """Test discarded weight equals the dropped Schmidt weight of the exact state."""
        state, engine = _scrambled(4, seed=12)
        dense = dense_product_state(4, "0" * 4)
        dense.amplitudes = state.to_statevector()
        gate = random_two_qubit_gate(np.random.default_rng(13))
        dense_apply_gate(dense, (2, 3), gate.entries)
        exact = dense_schmidt(dense, 2)

        before = state.norm_squared()
        state.chi_cap = 1
        report = engine.apply_two_qubit_adjacent(2, gate)
        expected = float(np.sum(exact[1:] ** 2))
        assert report.post_rank == 1
        assert report.discarded_weight == pytest.approx(expected, abs=1e-10)
        assert state.norm_squared() == pytest.approx(before - expected, abs=1e-9)
        assert state.schmidt_weight(2) <= 1.0 + 1e-10

    def test_renormalize_keeps_unit_weight(self):
        """Test renormalization rescales the kept λ to unit weight."""
        state, _ = _scrambled(4, seed=14)
        state.chi_cap = 1
        GateEngine(state, renormalize=True).apply_two_qubit_adjacent(2, random_two_qubit_gate(np.random.default_rng(1)))
        assert state.schmidt_weight(2) == pytest.approx(1.0, abs=1e-12)

    def test_unknown_decomposition(self):
        """Test only svd and density are accepted."""
        with pytest.raises(ValueError):
            GateEngine(product_state(2, "00"), decomposition="qr")


class TestSwapRouting:
    """Test suite for SWAPs and routed two-qubit gates."""

    def test_swap_involution(self):
        """Test two SWAPs on the same bond restore the state."""
        state, engine = _scrambled(5, seed=15)
        before = state.to_statevector()
        engine.apply_swap(2)
        engine.apply_swap(2)
        np.testing.assert_allclose(state.to_statevector(), before, atol=1e-10)

    def test_swap_on_symmetric_pair(self):
        """Test SWAP leaves the entangled pair and its λ unchanged."""
        state = product_state(2, "00", chi_cap=2)
        engine = GateEngine(state)
        engine.apply_two_qubit_adjacent(1, BELL_ENTANGLER)
        lam = state.schmidt_vectors[0].copy()
        engine.apply_swap(1)
        np.testing.assert_allclose(state.schmidt_vectors[0], lam, atol=1e-12)
        np.testing.assert_allclose(state.to_statevector(), [1 / sqrt(2), 0, 0, 1 / sqrt(2)], atol=1e-12)

    def test_public_swap_leaves_layout(self):
        """Test apply_swap exchanges contents without relabelling qubits."""
        state = product_state(3, "100", chi_cap=2)
        engine = GateEngine(state)
        engine.apply_swap(1)
        assert engine.layout.is_identity()
        assert state.amplitude("010") == pytest.approx(1.0, abs=1e-12)

    def test_adjacent_pair_needs_no_swaps(self):
        """Test a gate on (3, 4) is one application and zero SWAPs."""
        _, engine = _scrambled(6, seed=16)
        engine.swap_count = engine.two_qubit_count = 0
        engine.apply_two_qubit(3, 4, random_two_qubit_gate(np.random.default_rng(2)))
        assert engine.swap_count == 0
        assert engine.two_qubit_count == 1

    @pytest.mark.parametrize("pair", [(1, 5), (5, 1), (2, 6), (1, 3)])
    def test_route_cost(self, pair):
        """Test a distance-d gate costs 2(d-1) SWAPs and returns home."""
        engine = GateEngine(product_state(6, plus=True, chi_cap=8))
        engine.apply_two_qubit(*pair, controlled_phase_gate(0.7))
        assert engine.swap_count == 2 * (abs(pair[0] - pair[1]) - 1)
        assert engine.layout.is_identity()

    def test_long_range_gate_matches_dense(self):
        """Test a routed non-symmetric gate on (5, 2) agrees with the dense update."""
        rng = np.random.default_rng(17)
        state, engine = _scrambled(6, seed=18, chi_cap=8)
        dense = dense_product_state(6, "0" * 6)
        dense.amplitudes = state.to_statevector()
        gate = random_two_qubit_gate(rng)
        engine.apply_two_qubit(5, 2, gate)
        dense_apply_gate(dense, (5, 2), gate.entries)
        np.testing.assert_allclose(state.to_statevector(), dense.amplitudes, atol=1e-10)

    def test_same_site_rejected(self):
        """Test a two-qubit gate needs distinct sites."""
        engine = GateEngine(product_state(3, "000"))
        with pytest.raises(ValueError):
            engine.apply_two_qubit(2, 2, SWAP)


def _clause_bundle(clause, s=0.4, delta=0.125):
    bundle = clause_gate_bundle(clause, s, delta)
    return bundle, (bundle.two_qubit, bundle.one_qubit)


class TestClauseRouting:
    """Test suite for apply_clause and clause_sweep."""

    def test_contiguous_clause_uses_no_swaps(self):
        """Test clause (1,2,3) costs no SWAPs, 3 one-qubit and 4 two-qubit applications."""
        engine = GateEngine(product_state(3, plus=True, chi_cap=4))
        bundle, (two, one) = _clause_bundle((1, 2, 3))
        engine.apply_clause((1, 2, 3), two, one)
        assert engine.swap_count == 0
        assert engine.one_qubit_count == 3
        assert engine.two_qubit_count == 4
        assert engine.layout.is_identity()

    def test_spread_clause_beats_naive(self):
        """Test clause (1,4,7) is cheaper than independent pair routing."""
        engine = GateEngine(product_state(7, plus=True, chi_cap=8))
        _, (two, one) = _clause_bundle((1, 4, 7))
        engine.apply_clause((1, 4, 7), two, one)
        assert naive_clause_swaps((1, 4, 7)) == 18
        assert engine.swap_count < 18
        assert engine.layout.is_identity()

    @pytest.mark.parametrize("clause", [(1, 2, 3), (1, 4, 7), (2, 3, 6), (1, 6, 7)])
    def test_clause_matches_dense_diagonal(self, clause):
        """Test one clause equals e^{-iδs(z_i+z_j+z_k-1)²} up to its stored global phase."""
        n = 7
        bundle, (two, one) = _clause_bundle(clause)
        state = product_state(n, plus=True, chi_cap=8)
        GateEngine(state).apply_clause(clause, two, one)
        dense = dense_product_state(n, plus=True)
        diagonal = problem_diagonal(ExactCoverInstance(n, (clause,)))
        expected = np.exp(-1j * 0.125 * 0.4 * diagonal) * dense.amplitudes
        np.testing.assert_allclose(state.to_statevector() * bundle.global_phase, expected, atol=1e-10)

    def test_non_diagonal_pair_gates(self):
        """Test the non-commuting fallback applies G_xy, then G_xz, then G_yz."""
        rng = np.random.default_rng(30)
        gates = [random_two_qubit_gate(rng) for _ in range(3)]
        singles = [IDENTITY, IDENTITY, IDENTITY]
        state, engine = _scrambled(5, seed=31, chi_cap=4)
        dense = dense_product_state(5, "0" * 5)
        dense.amplitudes = state.to_statevector()
        engine.apply_clause((2, 3, 4), gates, singles)
        for sites, gate in zip([(2, 3), (2, 4), (3, 4)], gates):
            dense_apply_gate(dense, sites, gate.entries)
        np.testing.assert_allclose(state.to_statevector(), dense.amplitudes, atol=1e-10)
        assert engine.layout.is_identity()

    def test_sweep_matches_dense_and_restores_layout(self):
        """Test a full H_P sweep on 8 qubits agrees with the dense diagonal."""
        n, s, delta = 8, 0.6, 0.125
        clauses = order_clauses([(1, 4, 7), (2, 4, 8), (3, 5, 6), (1, 2, 8), (4, 6, 7), (2, 5, 7)])
        bundles = [clause_gate_bundle(c, s, delta) for c in clauses]
        state = product_state(n, plus=True, chi_cap=16)
        engine = GateEngine(state)
        _, tally = engine.clause_sweep(clauses, [(b.two_qubit, b.one_qubit) for b in bundles])
        phase = np.exp(1j * sum(b.phase_angle for b in bundles))
        diagonal = problem_diagonal(ExactCoverInstance(n, tuple(clauses)))
        expected = np.exp(-1j * delta * s * diagonal) * dense_product_state(n, plus=True).amplitudes
        np.testing.assert_allclose(state.to_statevector() * phase, expected, atol=1e-9)
        assert engine.layout.is_identity()
        assert tally.clauses == len(clauses)
        assert tally.achieved <= tally.naive

    def test_sweep_order_independence(self):
        """Test reversing the clause order yields the same state at ample χ."""
        n = 7
        clauses = [(1, 3, 5), (2, 4, 6), (3, 6, 7), (1, 2, 7)]
        results = []
        for order in (clauses, list(reversed(clauses))):
            state = product_state(n, plus=True, chi_cap=8)
            bundles = [clause_gate_bundle(c, 0.5, 0.25) for c in order]
            GateEngine(state).clause_sweep(order, [(b.two_qubit, b.one_qubit) for b in bundles])
            results.append(state.to_statevector())
        np.testing.assert_allclose(results[0], results[1], atol=1e-9)

    def test_deferred_returns_never_cost_more(self):
        """Test lookahead deferral uses no more SWAPs than always returning home."""
        clauses = order_clauses([(1, 5, 9), (2, 5, 9), (3, 5, 8), (1, 6, 9), (4, 7, 10)])
        counts = {}
        for defer in (False, True):
            engine = GateEngine(product_state(10, plus=True, chi_cap=32), defer_returns=defer)
            bundles = [clause_gate_bundle(c, 0.3, 0.125) for c in clauses]
            _, tally = engine.clause_sweep(clauses, [(b.two_qubit, b.one_qubit) for b in bundles])
            counts[defer] = tally.achieved
            assert engine.layout.is_identity()
        assert counts[True] <= counts[False]

    def test_restore_layout_uses_inversions(self):
        """Test restoring a displaced layout takes exactly its inversion count."""
        engine = GateEngine(product_state(6, plus=True, chi_cap=8))
        for position in (0, 1, 3, 2, 4):
            engine._route_swap(position)
        inversions = engine.layout.inversions()
        start = engine.swap_count
        engine.restore_layout()
        assert engine.swap_count - start == inversions
        assert engine.layout.is_identity()

    def test_missing_pair_gate(self):
        """Test a mapping without all three pairs is rejected."""
        engine = GateEngine(product_state(4, plus=True, chi_cap=4))
        gate = controlled_phase_gate(0.1)
        with pytest.raises(ValueError):
            engine.apply_clause((1, 2, 4), {(1, 2): gate, (1, 4): gate}, [IDENTITY] * 3)

    def test_invalid_clause(self):
        """Test repeated or out-of-range members are rejected."""
        engine = GateEngine(product_state(4, plus=True, chi_cap=4))
        gate = controlled_phase_gate(0.1)
        with pytest.raises(ValueError):
            engine.apply_clause((1, 1, 2), [gate] * 3, [IDENTITY] * 3)
        with pytest.raises(ValueError):
            engine.apply_clause((1, 2, 5), [gate] * 3, [IDENTITY] * 3)


class TestSwapTally:
    """Test suite for SwapTally bookkeeping."""

    def test_saving_fraction(self):
        """Test the saving fraction against naive routing."""
        tally = SwapTally(achieved=5, naive=20)
        assert tally.saving_fraction == pytest.approx(0.75)
        assert SwapTally().saving_fraction == 0.0

    def test_merge(self):
        """Test merging sums every counter."""
        tally = SwapTally(1, 2, 3, 0)
        tally.merge(SwapTally(4, 5, 6, 1))
        assert (tally.achieved, tally.naive, tally.clauses, tally.deferred_keeps) == (5, 7, 9, 1)

    def test_order_clauses(self):
        """Test sweep order is by lowest qubit, then span."""
        assert order_clauses([(3, 1, 8), (2, 3, 4), (1, 2, 3)]) == [(1, 2, 3), (1, 3, 8), (2, 3, 4)]
