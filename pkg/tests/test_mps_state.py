"""Tests for MpsState construction and read-only queries."""

from itertools import product
from math import sqrt

import numpy as np
import pytest

from mps_module.gate_engine import GateEngine
from mps_module.gates import BELL_ENTANGLER, HADAMARD, random_two_qubit_gate
from mps_module.state import MpsState, parse_bits, product_state


def _bell_state() -> MpsState:
    state = product_state(2, "00", chi_cap=2)
    GateEngine(state).apply_two_qubit_adjacent(1, BELL_ENTANGLER)
    return state


def _random_state(n: int, seed: int, chi_cap: int | None = None) -> MpsState:
    rng = np.random.default_rng(seed)
    state = product_state(n, "0" * n, chi_cap=chi_cap or 2 ** (n // 2))
    engine = GateEngine(state)
    for _ in range(3 * n):
        left = int(rng.integers(1, n))
        engine.apply_two_qubit_adjacent(left, random_two_qubit_gate(rng))
    return state


class TestProductState:
    """Test suite for product_state."""

    def test_basis_state_tensors(self):
        """Test |00> has A^0 = 1, A^1 = 0 and λ = [1]."""
        state = product_state(2, bits="00")
        for gamma in state.site_tensors:
            assert gamma.shape == (2, 1, 1)
            assert gamma[0, 0, 0] == 1.0
            assert gamma[1, 0, 0] == 0.0
        assert state.schmidt_vectors[0].tolist() == [1.0]

    def test_plus_state_amplitudes(self):
        """Test every amplitude of |+++> is 2^{-3/2}."""
        state = product_state(3, plus=True)
        for bits in ("000", "101", "111"):
            assert state.amplitude(bits) == pytest.approx(2 ** -1.5, abs=1e-12)

    def test_basis_state_entropy_zero(self):
        """Test a basis state has zero entropy at every cut."""
        state = product_state(5, "10110")
        assert all(state.entanglement_entropy(cut) == 0.0 for cut in range(1, 5))

    def test_requires_exactly_one_source(self):
        """Test bits and plus are mutually exclusive and one is required."""
        with pytest.raises(ValueError):
            product_state(2)
        with pytest.raises(ValueError):
            product_state(2, "00", plus=True)

    def test_bits_length_mismatch(self):
        """Test a bitstring of the wrong length is rejected."""
        with pytest.raises(ValueError):
            product_state(3, "01")

    def test_parse_bits_alphabet(self):
        """Test parse_bits rejects characters other than 0 and 1."""
        assert parse_bits("0110", 4) == [0, 1, 1, 0]
        with pytest.raises(ValueError):
            parse_bits("01a", 3)


class TestStateQueries:
    """Test suite for amplitude, norm, entropy and statevector queries."""

    def test_bell_amplitudes(self):
        """Test the entangled pair has amplitude 1/√2 on 00 and 11 only."""
        state = _bell_state()
        assert state.amplitude("00") == pytest.approx(1 / sqrt(2), abs=1e-12)
        assert state.amplitude("01") == pytest.approx(0.0, abs=1e-12)
        assert state.amplitude("11") == pytest.approx(1 / sqrt(2), abs=1e-12)

    def test_bell_statevector(self):
        """Test the statevector of the entangled pair."""
        np.testing.assert_allclose(
            _bell_state().to_statevector(), [1 / sqrt(2), 0, 0, 1 / sqrt(2)], atol=1e-12
        )

    def test_bell_entropy_one_bit(self):
        """Test the entangled pair carries one bit at its only cut."""
        assert _bell_state().entanglement_entropy(1) == pytest.approx(1.0, abs=1e-12)

    def test_unit_norm_after_exact_gate(self):
        """Test an exactly representable unitary leaves the norm at one."""
        assert _bell_state().norm_squared() == pytest.approx(1.0, abs=1e-10)

    def test_schmidt_weight_sums_to_one(self):
        """Test Σλ² = 1 at every cut of an untruncated state."""
        state = _random_state(6, seed=3)
        for cut in range(1, 6):
            assert state.schmidt_weight(cut) == pytest.approx(1.0, abs=1e-10)

    def test_statevector_matches_amplitudes(self):
        """Test every statevector entry equals amplitude() for that bitstring."""
        state = _random_state(5, seed=11)
        vector = state.to_statevector()
        for index, bits in enumerate(product("01", repeat=5)):
            assert vector[index] == pytest.approx(state.amplitude("".join(bits)), abs=1e-13)

    def test_statevector_norm_consistency(self):
        """Test Σ|ψ|² equals norm_squared on a 6-qubit state."""
        state = _random_state(6, seed=5)
        vector = state.to_statevector()
        assert float(np.vdot(vector, vector).real) == pytest.approx(state.norm_squared(), abs=1e-10)

    def test_entropy_bounded(self):
        """Test entropy never exceeds log2 of the bond rank."""
        state = _random_state(6, seed=8)
        for cut in range(1, 6):
            assert 0.0 <= state.entanglement_entropy(cut) <= state.max_entropy_bound(cut) + 1e-12

    def test_cut_out_of_range(self):
        """Test cuts are 1-based and bounded by n-1."""
        state = product_state(4, "0000")
        with pytest.raises(ValueError):
            state.entanglement_entropy(0)
        with pytest.raises(ValueError):
            state.schmidt_spectrum(4)

    def test_spectrum_reports_rank(self):
        """Test the stored spectrum of the entangled pair has rank two."""
        spectrum = _bell_state().schmidt_spectrum(1)
        assert spectrum.rank == 2
        assert spectrum.weight == pytest.approx(1.0, abs=1e-12)
        assert spectrum.discarded_weight == 0.0

    def test_copy_is_independent(self):
        """Test copies do not share tensors."""
        state = product_state(3, plus=True, chi_cap=4)
        clone = state.copy()
        GateEngine(clone).apply_one_qubit(1, HADAMARD)
        assert state.amplitude("100") == pytest.approx(2 ** -1.5, abs=1e-12)
        assert clone.amplitude("100") == pytest.approx(0.0, abs=1e-12)

    def test_statevector_size_guard(self):
        """Test to_statevector refuses very large registers."""
        with pytest.raises(ValueError):
            product_state(21, "0" * 21).to_statevector()
