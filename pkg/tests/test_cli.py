"""Tests for the mps-sim command line: subcommands, config files and exit codes."""

import json

import numpy as np
import pytest

from adiabatic_module.engine import NumericalAbortError
from exact_cover.generator import GenerationError, generate_hard_instance
from exact_cover.instance_io import load_instance, save_instance
from sim_cli import cli
from sim_cli.commands import cmd_min_t
from sim_cli.config_file import ConfigFileError, parse_bool, parse_config_text
from sim_cli.outputs import EXHAUSTED, RUN_COLUMNS
from sim_cli.sweep import MinTStats, aggregate_min_t, compare_growth, t_ladder
from utils.file_utils import read_csv


@pytest.fixture
def instance_file(tmp_path):
    path = tmp_path / "ec_n6_seed0.txt"
    save_instance(path, generate_hard_instance(6, 0))
    return path


class TestGenerateCommand:
    """Test suite for 'mps-sim generate'."""

    def test_writes_instances_and_manifest(self, tmp_path, capsys):
        """Test two instances plus manifest.json are written."""
        out = tmp_path / "instances"
        assert cli.main(["generate", "--n", "6", "--count", "2", "--seed", "3", "--out", str(out)]) == 0
        assert (out / "ec_n6_seed3.txt").exists()
        assert (out / "ec_n6_seed4.txt").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert [entry["seed"] for entry in manifest["instances"]] == [3, 4]
        assert load_instance(out / "ec_n6_seed3.txt").known_solution == manifest["instances"][0]["solution"]
        assert "ec_n6_seed3.txt" in capsys.readouterr().out

    def test_missing_n_is_usage_error(self, capsys):
        """Test --n is required."""
        assert cli.main(["generate"]) == 2
        assert "Error: --n is required" in capsys.readouterr().err

    def test_out_of_range_n(self, tmp_path):
        """Test n below the generator range is a usage error."""
        assert cli.main(["generate", "--n", "4", "--out", str(tmp_path)]) == 2

    def test_generation_failure_exit_code(self, tmp_path, monkeypatch, capsys):
        """Test GenerationError maps to the usage exit code and names the seed."""

        def _fail(*args, **kwargs):
            raise GenerationError(6, 0, "stalled")

        monkeypatch.setattr(cli, "cmd_generate", _fail)
        assert cli.main(["generate", "--n", "6", "--out", str(tmp_path)]) == 2
        assert "seed=0" in capsys.readouterr().err


class TestRunCommand:
    """Test suite for 'mps-sim run'."""

    def test_writes_csv_and_manifest(self, instance_file, tmp_path, capsys):
        """Test the run CSV has the fixed columns and one row per sample."""
        out = tmp_path / "run.csv"
        code = cli.main(["run", str(instance_file), "--T", "1", "--chi", "4", "--stride", "2", "--out", str(out)])
        assert code in (0, 1)
        rows = read_csv(out)
        assert list(rows[0].keys()) == list(RUN_COLUMNS)
        assert len(rows) == 5
        assert float(rows[-1]["s"]) == 1.0
        manifest = json.loads(out.with_suffix(".json").read_text())
        assert manifest["config"]["chi_cap"] == 4
        assert len(manifest["sample_wall_clock"]) == 5
        summary = json.loads(capsys.readouterr().out)
        assert code == (0 if summary["solved"] else 1)

    def test_record_spectra(self, instance_file, tmp_path):
        """Test --record-spectra writes <stem>_spectra.json."""
        out = tmp_path / "run.csv"
        cli.main(["run", str(instance_file), "--T", "1", "--chi", "4", "--out", str(out), "--record-spectra"])
        spectra = json.loads((tmp_path / "run_spectra.json").read_text())
        assert spectra["cut"] == 3
        assert spectra["samples"]

    def test_config_file_supplies_flags(self, instance_file, tmp_path):
        """Test config keys fill flags not given on the command line; flags win."""
        config = tmp_path / "run.cfg"
        config.write_text("# run settings\nT = 1\nchi = 2\nrenormalize = yes\n", encoding="utf-8")
        out = tmp_path / "run.csv"
        code = cli.main(["run", str(instance_file), "--config", str(config), "--chi", "4", "--out", str(out)])
        assert code in (0, 1)
        manifest = json.loads(out.with_suffix(".json").read_text())
        assert manifest["schedule"]["T"] == 1.0
        assert manifest["config"]["chi_cap"] == 4
        assert manifest["config"]["renormalize_after_truncation"] is True

    def test_unknown_config_key(self, instance_file, tmp_path, capsys):
        """Test an unknown config key is a usage error."""
        config = tmp_path / "bad.cfg"
        config.write_text("T = 1\nbogus = 3\n", encoding="utf-8")
        assert cli.main(["run", str(instance_file), "--config", str(config)]) == 2
        assert "bogus" in capsys.readouterr().err

    def test_indivisible_time(self, instance_file, tmp_path):
        """Test T that is not a multiple of Δ is a usage error."""
        assert cli.main(["run", str(instance_file), "--T", "1.1", "--out", str(tmp_path / "r.csv")]) == 2

    def test_missing_instance(self, tmp_path):
        """Test a missing instance file is a usage error."""
        assert cli.main(["run", str(tmp_path / "absent.txt"), "--T", "1"]) == 2

    def test_malformed_instance(self, tmp_path):
        """Test a malformed instance file is a usage error."""
        path = tmp_path / "bad.txt"
        path.write_text("3 1\n1 1 2\n", encoding="utf-8")
        assert cli.main(["run", str(path), "--T", "1"]) == 2

    def test_norm_collapse_exit_code(self, instance_file, monkeypatch, capsys):
        """Test NumericalAbortError maps to exit code 3."""

        def _collapse(*args, **kwargs):
            raise NumericalAbortError(3, 0.25, 1e-14)

        monkeypatch.setattr(cli, "cmd_run", _collapse)
        assert cli.main(["run", str(instance_file), "--T", "1"]) == 3
        assert "norm collapse" in capsys.readouterr().err


class TestSweepCommands:
    """Test suite for 'mps-sim sweep' and 'mps-sim min-t'."""

    def test_sweep_grid(self, instance_file, tmp_path):
        """Test one summary row and one run CSV per (χ, T) point."""
        out = tmp_path / "sweep"
        assert cli.main(["sweep", str(instance_file), "--chi", "2,4", "--T", "1,2", "--out", str(out)]) == 0
        summary = read_csv(out / "summary.csv")
        assert len(summary) == 4
        assert {(row["chi"], row["T"]) for row in summary} == {("2", "1.0"), ("2", "2.0"), ("4", "1.0"), ("4", "2.0")}
        assert len(list((out / "runs").glob("*.csv"))) == 4

    def test_sweep_generates_instances(self, tmp_path):
        """Test --n without files generates the instances first."""
        out = tmp_path / "sweep"
        assert cli.main(["sweep", "--n", "6", "--count", "2", "--chi", "4", "--T", "1", "--out", str(out)]) == 0
        assert len(read_csv(out / "summary.csv")) == 2
        assert (out / "instances" / "manifest.json").exists()

    def test_min_t(self, instance_file, tmp_path):
        """Test the minimal-T search writes per-instance rows and per-n stats."""
        out = tmp_path / "min_t"
        argv = ["min-t", str(instance_file), "--chi", "8", "--t-start", "1", "--t-multiplier", "2", "--t-max", "4"]
        assert cli.main(argv + ["--out", str(out)]) == 0
        rows = read_csv(out / "min_t.csv")
        assert len(rows) == 1
        assert rows[0]["T_min"] in ("1.0", "2.0", "4.0", "exhausted")
        stats = read_csv(out / "min_t_stats.csv")
        assert stats[0]["n"] == "6"

    def test_t_ladder(self):
        """Test the doubling ladder stops at its maximum."""
        assert t_ladder(100, 2, 1600) == [100, 200, 400, 800, 1600]
        with pytest.raises(ValueError):
            t_ladder(100, 1, 1600)

    def test_aggregate_min_t(self):
        """Test mean, worst case and 95% half width over solved instances."""
        rows = [
            {"n": 8, "T_min": 100.0},
            {"n": 8, "T_min": 200.0},
            {"n": 8, "T_min": "exhausted"},
            {"n": 10, "T_min": "exhausted"},
        ]
        stats = {entry.n: entry for entry in aggregate_min_t(rows)}
        assert stats[8].mean == pytest.approx(150.0)
        assert stats[8].worst == 200.0
        assert stats[8].exhausted == 1
        assert stats[8].ci95_half_width == pytest.approx(1.96 * 70.71067811865476 / 2 ** 0.5)
        assert stats[10].solved == 0

    @staticmethod
    def _stats(means: dict[int, float]) -> list[MinTStats]:
        return [MinTStats(n, 1, 1, 0, mean, mean, 0.0) for n, mean in means.items()]

    def test_growth_comparison_prefers_quadratic(self):
        """Test log T_min quadratic in n is flagged sub-exponential."""
        means = {n: float(np.exp(0.02 * n * n + 0.1 * n + 3.0)) for n in (10, 12, 14, 16, 18)}
        growth = compare_growth(self._stats(means))
        assert growth.points == 5
        assert growth.quadratic_rss == pytest.approx(0.0, abs=1e-12)
        assert growth.linear_rss > 1e-3
        assert growth.sub_exponential

    def test_growth_comparison_exponential(self):
        """Test exactly exponential growth leaves no linear residual."""
        means = {n: float(np.exp(0.3 * n + 2.0)) for n in (10, 12, 14, 16)}
        assert compare_growth(self._stats(means)).linear_rss == pytest.approx(0.0, abs=1e-12)

    def test_growth_comparison_needs_three_sizes(self):
        """Test fewer than three solved sizes give no comparison."""
        stats = self._stats({10: 100.0, 12: 200.0}) + [MinTStats(14, 1, 0, 1, float("nan"), float("nan"), float("nan"))]
        assert compare_growth(stats) is None


class TestFitAndOracleCommands:
    """Test suite for 'mps-sim fit-schmidt' and 'mps-sim oracle-check'."""

    def test_fit_raw_spectrum(self, tmp_path, capsys):
        """Test fitting a raw spectrum file prints the parameters."""
        path = tmp_path / "spectrum.txt"
        path.write_text("\n".join(str(0.9 / (k + 1) ** 1.5) for k in range(10)), encoding="utf-8")
        assert cli.main(["fit-schmidt", "--spectrum", str(path)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["points"] == 10
        assert set(payload) >= {"b", "c", "d", "residual"}

    def test_fit_needs_one_source(self):
        """Test fit-schmidt needs exactly one input."""
        assert cli.main(["fit-schmidt"]) == 2

    def test_fit_too_few_points(self, tmp_path):
        """Test a degenerate fit is a usage error."""
        path = tmp_path / "spectrum.txt"
        path.write_text("0.9\n0.1\n", encoding="utf-8")
        assert cli.main(["fit-schmidt", "--spectrum", str(path)]) == 2

    def test_oracle_pass(self, capsys):
        """Test the corpus passes on the smallest registers."""
        assert cli.main(["oracle-check", "--n-max", "4", "--seed", "1"]) == 0
        assert json.loads(capsys.readouterr().out)["passed"] is True

    def test_oracle_tamper_fails(self):
        """Test a tampered gate makes oracle-check exit 1."""
        assert cli.main(["oracle-check", "--n-max", "4", "--tamper", "0.001"]) == 1


class TestConfigFile:
    """Test suite for key=value config parsing."""

    def test_parse(self):
        """Test comments, blank lines and leading dashes on keys."""
        text = "# comment\n\n--chi = 8\nT=100\n"
        assert parse_config_text(text) == {"chi": "8", "T": "100"}

    def test_missing_equals(self):
        """Test a line without '=' reports its line number."""
        with pytest.raises(ConfigFileError) as excinfo:
            parse_config_text("chi 8\n")
        assert excinfo.value.line == 1

    @pytest.mark.parametrize("text,expected", [("yes", True), ("0", False), ("On", True), ("false", False)])
    def test_parse_bool(self, text, expected):
        """Test boolean spellings."""
        assert parse_bool(text) is expected


@pytest.mark.slow
class TestAcceptance:
    """Long end-to-end runs."""

    def test_small_instance_solved_at_long_time(self, tmp_path):
        """Test an 8-qubit instance is solved at T=100 with χ=16."""
        path = tmp_path / "ec.txt"
        save_instance(path, generate_hard_instance(8, 0))
        assert cli.main(["run", str(path), "--T", "100", "--chi", "16", "--stride", "100", "--out", str(tmp_path / "r.csv")]) == 0

    def test_min_t_solving_power(self, tmp_path):
        """Test the ladder up to T=1600 solves at least 80% of instances at n=16 (χ=8) and n=20 (χ=10)."""
        ladder = t_ladder(100.0, 2.0, 1600.0)
        for n, chi, count in ((16, 8, 10), (20, 10, 5)):
            paths = []
            for seed in range(count):
                path = tmp_path / f"ec_n{n}_seed{seed}.txt"
                save_instance(path, generate_hard_instance(n, seed))
                paths.append(path)
            rows, stats = cmd_min_t(paths, chi, ladder, 0.125, None, tmp_path / f"min_t_n{n}")
            solved = [row for row in rows if row["T_min"] != EXHAUSTED]
            assert len(solved) >= 0.8 * count
            assert all(row["T_min"] in ladder for row in solved)
            assert stats[0].solved == len(solved)

    def test_min_t_growth_is_sub_exponential(self, tmp_path):
        """Test mean T_min over n = 10..16 fits log-quadratic at least as well as log-linear."""
        paths = []
        for n in (10, 12, 14, 16):
            for seed in range(5):
                path = tmp_path / f"ec_n{n}_seed{seed}.txt"
                save_instance(path, generate_hard_instance(n, seed))
                paths.append(path)
        _, stats = cmd_min_t(paths, 8, t_ladder(25.0, 2.0, 1600.0), 0.125, None, tmp_path / "min_t")
        growth = compare_growth(stats)
        assert growth is not None
        assert growth.quadratic_rss <= growth.linear_rss
