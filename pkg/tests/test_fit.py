"""Tests for the Schmidt-decay fit."""

import numpy as np
import pytest

from sim_cli.fit import FitError, fit_schmidt_decay, load_spectrum_file, spectrum_near
from utils.file_utils import save_json


def _synthetic(b: float, c: float, d: float, count: int) -> list[float]:
    alpha = np.arange(1, count + 1, dtype=np.float64)
    return list(2.0 ** (b + c / np.sqrt(alpha) + d * np.sqrt(alpha)))


class TestFitSchmidtDecay:
    """Test suite for fit_schmidt_decay."""

    def test_recovers_exact_parameters(self):
        """Test noiseless data returns its generating b, c, d."""
        result = fit_schmidt_decay(_synthetic(0.5, -1.2, -0.8, 20))
        assert result.b == pytest.approx(0.5, abs=1e-8)
        assert result.c == pytest.approx(-1.2, abs=1e-8)
        assert result.d == pytest.approx(-0.8, abs=1e-8)
        assert result.residual == pytest.approx(0.0, abs=1e-8)
        assert result.points == 20

    def test_input_order_irrelevant(self):
        """Test values are sorted before fitting."""
        values = _synthetic(0.1, -0.5, -1.0, 12)
        shuffled = list(reversed(values))
        assert fit_schmidt_decay(shuffled).d == pytest.approx(fit_schmidt_decay(values).d, abs=1e-12)

    def test_zeros_dropped(self):
        """Test non-positive coefficients are excluded."""
        values = _synthetic(0.0, -1.0, -0.5, 8) + [0.0, 0.0]
        assert fit_schmidt_decay(values).points == 8

    def test_too_few_points(self):
        """Test fewer than four positive values cannot be fitted."""
        with pytest.raises(FitError) as excinfo:
            fit_schmidt_decay([0.9, 0.3, 0.1])
        assert excinfo.value.code == "fit_degenerate"

    def test_predict(self):
        """Test predict evaluates the fitted curve."""
        result = fit_schmidt_decay(_synthetic(0.2, -1.0, -0.3, 10))
        np.testing.assert_allclose(result.predict([1, 4]), [0.2 - 1.0 - 0.3, 0.2 - 0.5 - 0.6], atol=1e-8)


class TestSpectrumFiles:
    """Test suite for spectrum loading helpers."""

    def test_raw_file(self, tmp_path):
        """Test one value per line with comments skipped."""
        path = tmp_path / "spectrum.txt"
        path.write_text("# half cut\n0.8\n\n0.5\n0.3\n", encoding="utf-8")
        assert load_spectrum_file(path) == [0.8, 0.5, 0.3]

    def test_raw_file_bad_value(self, tmp_path):
        """Test a non-numeric line is reported with its line number."""
        path = tmp_path / "spectrum.txt"
        path.write_text("0.8\nhalf\n", encoding="utf-8")
        with pytest.raises(ValueError, match=":2:"):
            load_spectrum_file(path)

    def test_spectrum_near(self, tmp_path):
        """Test the recorded spectrum closest to the requested s is chosen."""
        path = tmp_path / "run_spectra.json"
        save_json(
            path,
            {
                "samples": [
                    {"s": 0.5, "cut": 4, "values": [0.9, 0.4]},
                    {"s": 0.7, "cut": 4, "values": [0.8, 0.5]},
                    {"s": 0.9, "cut": 3, "values": [0.7, 0.6]},
                ]
            },
        )
        assert spectrum_near(path, 0.69) == (0.7, [0.8, 0.5])
        assert spectrum_near(path, 0.69, cut=3) == (0.9, [0.7, 0.6])
        with pytest.raises(ValueError):
            spectrum_near(path, 0.69, cut=1)
