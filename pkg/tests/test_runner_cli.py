import json

import numpy as np
import pytest

from openchain.cli import main
from openchain.config import validate_config
from openchain.runner import realization_seed, run_scenario, sweep
from openchain.series import read_csv


def make_config(tmp_path, scenario, extra="", out="out"):
    return validate_config(
        f"[experiment]\nscenario = {scenario}\noutput = {tmp_path / out}\n{extra}"
    )


class TestRunScenario:
    def test_ballistic_row_count_and_columns(self, tmp_path):
        config = make_config(
            tmp_path, "ballistic", "[grid]\nt_max = 40\ndt = 0.1\n"
        )
        manifest = run_scenario(config)
        data = read_csv(tmp_path / "out" / "ballistic_r000.csv")
        assert list(data) == ["t", "mean_Q", "var_Q", "p_region"]
        assert data["t"].size == 401
        assert set(manifest.outputs) == {
            "ballistic_r000.csv",
            "ballistic_aggregate.csv",
        }

    def test_dissipative_columns(self, tmp_path):
        config = make_config(
            tmp_path,
            "dissipative-transport",
            "[bath]\nbeta = 1.0\nzeta = 0.05\n[grid]\nt_max = 50\ndt = 1\n",
        )
        run_scenario(config)
        data = read_csv(tmp_path / "out" / "dissipative-transport_r000.csv")
        assert list(data) == ["t", "mean_Q", "var_Q", "p_region"]

    def test_superposed_columns(self, tmp_path):
        config = make_config(
            tmp_path,
            "cnot-superposed",
            "[bath]\nbeta = 1.0\nzeta = 0.05\n[grid]\nt_max = 20\ndt = 1\n",
        )
        run_scenario(config)
        data = read_csv(tmp_path / "out" / "cnot-superposed_r000.csv")
        assert list(data) == [
            "t",
            "trace_UU",
            "trace_DD",
            "p_beyond_gate",
            "entropy",
            "bell_fidelity",
        ]

    def test_single_realization_aggregate_is_identity(self, tmp_path):
        config = make_config(
            tmp_path, "localized", "[grid]\nt_max = 20\ndt = 1\n"
        )
        run_scenario(config)
        single = read_csv(tmp_path / "out" / "localized_r000.csv")
        agg = read_csv(tmp_path / "out" / "localized_aggregate.csv")
        assert np.array_equal(agg["mean_Q_mean"], single["mean_Q"])
        assert np.array_equal(agg["mean_Q_q50"], single["mean_Q"])

    def test_reproducible_and_thread_invariant(self, tmp_path):
        extra = "ensemble_size = 3\n[grid]\nt_max = 20\ndt = 1\n[chain]\nsigma = 0.5\n"
        config_a = make_config(tmp_path, "localized", extra, out="a")
        config_b = make_config(tmp_path, "localized", extra, out="b")
        run_scenario(config_a, workers=1)
        run_scenario(config_b, workers=2)
        for name in ["localized_r000.csv", "localized_r002.csv", "localized_aggregate.csv"]:
            assert (tmp_path / "a" / name).read_bytes() == (
                tmp_path / "b" / name
            ).read_bytes()

    def test_manifest_contents(self, tmp_path):
        config = make_config(
            tmp_path,
            "localized",
            "seed = 7\nensemble_size = 2\n[grid]\nt_max = 10\ndt = 1\n",
        )
        run_scenario(config)
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["master_seed"] == 7
        assert manifest["realization_seeds"] == [
            realization_seed(7, 0),
            realization_seed(7, 1),
        ]
        assert len(manifest["disorder"]) == 2
        assert len(manifest["disorder"][0]) == 20
        import hashlib

        for name, digest in manifest["outputs"].items():
            payload = (tmp_path / "out" / name).read_bytes()
            assert hashlib.sha256(payload).hexdigest() == digest

    def test_different_seeds_differ(self, tmp_path):
        extra = "[chain]\nsigma = 0.5\n[grid]\nt_max = 10\ndt = 1\n"
        run_scenario(make_config(tmp_path, "localized", "seed = 1\n" + extra, out="s1"))
        run_scenario(make_config(tmp_path, "localized", "seed = 2\n" + extra, out="s2"))
        a = (tmp_path / "s1" / "localized_r000.csv").read_text()
        b = (tmp_path / "s2" / "localized_r000.csv").read_text()
        assert a != b


class TestAllScenarios:
    @pytest.mark.parametrize(
        "scenario,extra",
        [
            ("ballistic", "[grid]\nt_max = 5\ndt = 1\n"),
            ("localized", "[grid]\nt_max = 5\ndt = 1\n"),
            ("bloch", "[grid]\nt_max = 5\ndt = 1\n"),
            (
                "dissipative-transport",
                "[bath]\nbeta = 1\nzeta = 0.05\n[grid]\nt_max = 5\ndt = 1\n",
            ),
            ("cnot-classical", "[grid]\nt_max = 5\ndt = 1\n"),
            (
                "cnot-classical",
                "[chain]\ng = 2\n[bath]\nbeta = 1\nzeta = 0.05\n"
                "[grid]\nt_max = 5\ndt = 1\n[layout]\nbranch = D\n",
            ),
            (
                "cnot-superposed",
                "[bath]\nbeta = 1\nzeta = 0.05\n[grid]\nt_max = 5\ndt = 1\n",
            ),
            ("peak-scaling", ""),
        ],
    )
    def test_scenario_produces_outputs(self, tmp_path, scenario, extra):
        manifest = run_scenario(make_config(tmp_path, scenario, extra))
        assert f"{scenario}_r000.csv" in manifest.outputs
        assert f"{scenario}_aggregate.csv" in manifest.outputs


class TestSweep:
    def test_peak_scaling_rows(self, tmp_path):
        config = make_config(tmp_path, "peak-scaling")
        sweep(config, "s", [20, 30, 40])
        table = read_csv(tmp_path / "out" / "peak-scaling_sweep_s.csv")
        assert list(table) == ["s", "t_star", "p_star"]
        assert table["s"].tolist() == [20.0, 30.0, 40.0]
        # arrival time scales with the chain size
        assert np.all(np.diff(table["t_star"]) > 0)

    def test_single_value_matches_run_scenario(self, tmp_path):
        extra = "ensemble_size = 2\n[chain]\nsigma = 0.5\n[grid]\nt_max = 10\ndt = 1\n"
        config = make_config(tmp_path, "localized", extra)
        run_scenario(config)
        agg = read_csv(tmp_path / "out" / "localized_aggregate.csv")
        sweep(config, "sigma", [0.5])
        row = read_csv(tmp_path / "out" / "localized_sweep_sigma.csv")
        assert row["mean_Q"][0] == agg["mean_Q_mean"][-1]
        assert row["p_region"][0] == agg["p_region_mean"][-1]

    def test_unknown_parameter(self, tmp_path):
        with pytest.raises(ValueError):
            sweep(make_config(tmp_path, "ballistic"), "flux", [1.0])

    def test_byte_identical_across_runs(self, tmp_path):
        config_a = make_config(tmp_path, "peak-scaling", "seed = 5\n", out="a")
        config_b = make_config(tmp_path, "peak-scaling", "seed = 5\n", out="b")
        sweep(config_a, "s", [15, 25], workers=1)
        sweep(config_b, "s", [15, 25], workers=2)
        assert (tmp_path / "a" / "peak-scaling_sweep_s.csv").read_bytes() == (
            tmp_path / "b" / "peak-scaling_sweep_s.csv"
        ).read_bytes()


class TestCli:
    def write_config(self, tmp_path, text):
        path = tmp_path / "config.ini"
        path.write_text(text)
        return str(path)

    def test_validate_ok(self, tmp_path, capsys):
        path = self.write_config(tmp_path, "[experiment]\nscenario = ballistic\n")
        assert main(["validate", path]) == 0
        assert "config ok" in capsys.readouterr().out

    def test_validate_bad_config_exit_2(self, tmp_path, capsys):
        path = self.write_config(
            tmp_path, "[experiment]\nscenario = dissipative-transport\n"
        )
        assert main(["validate", path]) == 2
        err = capsys.readouterr().err
        assert "beta" in err and "zeta" in err

    def test_run_writes_files(self, tmp_path):
        path = self.write_config(
            tmp_path,
            f"[experiment]\nscenario = ballistic\noutput = {tmp_path / 'out'}\n"
            "[grid]\nt_max = 10\ndt = 0.5\n",
        )
        assert main(["run", path]) == 0
        assert (tmp_path / "out" / "ballistic_r000.csv").exists()
        assert (tmp_path / "out" / "manifest.json").exists()

    def test_sweep_cli(self, tmp_path):
        path = self.write_config(
            tmp_path,
            f"[experiment]\nscenario = peak-scaling\noutput = {tmp_path / 'out'}\n",
        )
        assert main(["sweep", path, "--vary", "s", "--values", "12,16"]) == 0
        table = read_csv(tmp_path / "out" / "peak-scaling_sweep_s.csv")
        assert table["s"].tolist() == [12.0, 16.0]

    def test_env_seed_override(self, tmp_path, monkeypatch):
        text = (
            f"[experiment]\nscenario = localized\nseed = 1\noutput = {tmp_path / 'out'}\n"
            "[grid]\nt_max = 5\ndt = 1\n"
        )
        path = self.write_config(tmp_path, text)
        monkeypatch.setenv("OPENCHAIN_SEED", "99")
        assert main(["run", path]) == 0
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["master_seed"] == 99

    def test_missing_file_exit_2(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.ini")]) == 2

    def test_numeric_failure_exit_3(self, tmp_path, monkeypatch):
        # a degenerate spectrum reaches the rate construction and must map
        # to the numeric-failure exit code
        import openchain.runner as runner_mod
        from openchain.lindblad import DegenerateGapError

        def boom(config, workers=1):
            raise DegenerateGapError("degenerate gap")

        monkeypatch.setattr(runner_mod, "run_scenario", boom)
        monkeypatch.setattr("openchain.cli.run_scenario", boom)
        path = self.write_config(
            tmp_path,
            f"[experiment]\nscenario = ballistic\noutput = {tmp_path / 'out'}\n"
            "[grid]\nt_max = 5\ndt = 1\n",
        )
        assert main(["run", path]) == 3
