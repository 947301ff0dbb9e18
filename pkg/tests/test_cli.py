import json

import numpy as np
import pytest
from click.testing import CliRunner

from polarsteer import analysis, cli, oracle
from polarsteer.cli import main, parse_angle_range
from polarsteer.nn import forward, init_preset, load_model, save_model


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def saved_model(trained_desk, tmp_path_factory):
    path = tmp_path_factory.mktemp("model") / "model.psm"
    save_model(trained_desk, path)
    return path


def run_ok(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


class TestAngleRanges:
    def test_example_window(self):
        # 150-210 degrees at 0.9 degrees per cell -> cells 166..233 inclusive.
        mask = parse_angle_range("150:210")
        assert np.array_equal(np.flatnonzero(mask), np.arange(166, 234))

    def test_full_circle_cell_zero(self):
        mask = parse_angle_range("0:0.89")
        assert np.array_equal(np.flatnonzero(mask), [0])

    def test_wraparound(self):
        mask = parse_angle_range("350:10")
        lo = int(np.floor(350 / 0.9))
        hi = int(np.floor(10 / 0.9))
        assert np.array_equal(np.flatnonzero(mask),
                              np.concatenate([np.arange(0, hi + 1), np.arange(lo, 400)]))

    def test_malformed(self):
        with pytest.raises(Exception):
            parse_angle_range("abc")


class TestGenData:
    def test_deterministic_outputs(self, runner, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run_ok(runner, ["gen-data", "--n", "20", "--seed", "3", "--out", str(a)])
        run_ok(runner, ["gen-data", "--n", "20", "--seed", "3", "--out", str(b)])
        assert (a / "configs.csv").read_bytes() == (b / "configs.csv").read_bytes()
        assert (a / "profiles.csv").read_bytes() == (b / "profiles.csv").read_bytes()

    def test_matches_library_generation(self, runner, tmp_path):
        out = tmp_path / "d"
        run_ok(runner, ["gen-data", "--n", "12", "--seed", "9", "--out", str(out)])
        back = oracle.load_dataset(out / "configs.csv", out / "profiles.csv",
                                   oracle.ParameterSpace.default())
        want = oracle.generate_dataset(12, seed=9)
        np.testing.assert_allclose(back.configs, want.configs, atol=1e-9)
        np.testing.assert_allclose(back.profiles, want.profiles, atol=1e-9)

    def test_manifest_written(self, runner, tmp_path):
        out = tmp_path / "d"
        run_ok(runner, ["gen-data", "--n", "5", "--out", str(out)])
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "gen-data"
        assert manifest["parameters"]["n"] == 5
        assert manifest["seed"] == 0
        assert len(manifest["outputs"]) == 2


class TestTrainEval:
    def test_train_then_eval_memorizes_tiny_dataset(self, runner, tmp_path):
        data = tmp_path / "data"
        run_ok(runner, ["gen-data", "--n", "120", "--seed", "1", "--out", str(data)])
        model = tmp_path / "m.psm"
        run_ok(runner, [
            "train", "--data", str(data), "--epochs", "40", "--seed", "1",
            "--validation-fraction", "0", "--out", str(model),
        ])
        result = run_ok(runner, ["eval", "--model", str(model), "--data", str(data)])
        accuracy = float(result.output.split()[-1].rstrip("%"))
        assert accuracy > 80.0
        manifest = json.loads(model.with_suffix(".psm.manifest.json").read_text())
        assert manifest["command"] == "train"

    def test_train_missing_data_exit_2(self, runner, tmp_path):
        result = runner.invoke(main, ["train", "--data", str(tmp_path / "nope"),
                                      "--out", str(tmp_path / "m.psm")])
        assert result.exit_code == 2

    def test_eval_shape_mismatch_exit_3(self, runner, tmp_path, saved_model):
        data = tmp_path / "data"
        run_ok(runner, ["gen-data", "--n", "5", "--out", str(data)])
        # corrupt the profiles file so rows no longer align with configs
        profiles = data / "profiles.csv"
        profiles.write_text("\n".join(profiles.read_text().splitlines()[:-2]) + "\n")
        result = runner.invoke(main, ["eval", "--model", str(saved_model), "--data", str(data)])
        assert result.exit_code == 3


class TestPredict:
    def test_matches_library(self, runner, tmp_path, saved_model, trained_desk):
        space = oracle.ParameterSpace.default()
        config = np.random.default_rng(0).uniform(-1, 1, 35)
        csv = tmp_path / "configs.csv"
        oracle.export_configs(config[None, :], space, csv)
        out = tmp_path / "profile.csv"
        run_ok(runner, ["predict", "--model", str(saved_model),
                        "--config-row", f"{csv}:0", "--out", str(out)])
        got = np.array([float(v) for v in out.read_text().strip().split(",")])
        # export quantizes the config through its raw representation
        round_tripped = oracle.import_configs(csv, space)[0]
        want, _ = forward(trained_desk, round_tripped, mode="deterministic")
        assert np.array_equal(got, want)

    def test_missing_row_exit_3(self, runner, tmp_path, saved_model):
        csv = tmp_path / "configs.csv"
        oracle.export_configs(np.zeros((1, 35)), oracle.ParameterSpace.default(), csv)
        result = runner.invoke(main, ["predict", "--model", str(saved_model),
                                      "--config-row", f"{csv}:5"])
        assert result.exit_code == 3

    def test_missing_file_exit_2(self, runner, tmp_path, saved_model):
        result = runner.invoke(main, ["predict", "--model", str(saved_model),
                                      "--config-row", f"{tmp_path / 'nope.csv'}:0"])
        assert result.exit_code == 2

    def test_non_finite_exit_4(self, runner, tmp_path, saved_model):
        space = oracle.ParameterSpace.default()
        csv = tmp_path / "configs.csv"
        csv.write_text(",".join(space.names) + "\n" + ",".join(["inf"] * 35) + "\n")
        result = runner.invoke(main, ["predict", "--model", str(saved_model),
                                      "--config-row", f"{csv}:0"])
        assert result.exit_code == 4


class TestOptimize:
    def test_matches_library_call(self, runner, tmp_path, saved_model, trained_desk):
        out = tmp_path / "opt.csv"
        run_ok(runner, ["optimize", "--model", str(saved_model),
                        "--max-range", "150:210", "--min-range", "250:340",
                        "--steps", "30", "--out", str(out)])
        req = analysis.OptimizationRequest(
            parse_angle_range("150:210"), parse_angle_range("250:340"),
            np.zeros(35), steps=30,
        )
        want = analysis.activation_optimize(trained_desk, req).optimum
        got = oracle.import_configs(out, oracle.ParameterSpace.default())[0]
        np.testing.assert_allclose(got, want, atol=1e-9)

    def test_no_ranges_fails(self, runner, saved_model, tmp_path):
        result = runner.invoke(main, ["optimize", "--model", str(saved_model),
                                      "--out", str(tmp_path / "o.csv")])
        assert result.exit_code == 1


class TestExport:
    def test_saved_list_to_csv(self, runner, tmp_path):
        rng = np.random.default_rng(5)
        configs = rng.uniform(-1, 1, (15, 35))
        list_path = tmp_path / "saved.json"
        list_path.write_text(json.dumps([
            {"name": f"c{i}", "config": row.tolist(), "origin": "manual"}
            for i, row in enumerate(configs)
        ]))
        out = tmp_path / "out.csv"
        run_ok(runner, ["export", "--list", str(list_path), "--out", str(out)])
        assert len(out.read_text().splitlines()) == 16
        back = oracle.import_configs(out, oracle.ParameterSpace.default())
        np.testing.assert_allclose(back, configs, atol=1e-9)

    def test_empty_list_fails(self, runner, tmp_path):
        list_path = tmp_path / "saved.json"
        list_path.write_text("[]")
        result = runner.invoke(main, ["export", "--list", str(list_path),
                                      "--out", str(tmp_path / "o.csv")])
        assert result.exit_code == 1


class TestConfigFile:
    def test_file_fills_defaults_cli_overrides(self, runner, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("n = 7\nseed = 5  # comment\n")
        out = tmp_path / "d"
        run_ok(runner, ["gen-data", "--out", str(out), "--seed", "9",
                        "--config-file", str(cfg)])
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["parameters"]["n"] == 7  # from file
        assert manifest["parameters"]["seed"] == 9  # CLI wins
        assert manifest["config_file"] == str(cfg)

    def test_unknown_key_rejected(self, runner, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("bogus = 1\n")
        result = runner.invoke(main, ["gen-data", "--out", str(tmp_path / "d"),
                                      "--config-file", str(cfg)])
        assert result.exit_code == 1

    def test_missing_config_file_exit_2(self, runner, tmp_path):
        result = runner.invoke(main, ["gen-data", "--out", str(tmp_path / "d"),
                                      "--config-file", str(tmp_path / "nope.cfg")])
        assert result.exit_code == 2


class TestReplay:
    def test_gen_data_replay_byte_exact(self, runner, tmp_path):
        out = tmp_path / "d"
        run_ok(runner, ["gen-data", "--n", "15", "--seed", "2", "--out", str(out)])
        configs_bytes = (out / "configs.csv").read_bytes()
        profiles_bytes = (out / "profiles.csv").read_bytes()
        (out / "configs.csv").unlink()
        (out / "profiles.csv").unlink()
        run_ok(runner, ["replay", str(out / "manifest.json")])
        assert (out / "configs.csv").read_bytes() == configs_bytes
        assert (out / "profiles.csv").read_bytes() == profiles_bytes

    def test_optimize_replay_byte_exact(self, runner, tmp_path, saved_model):
        out = tmp_path / "opt.csv"
        run_ok(runner, ["optimize", "--model", str(saved_model),
                        "--max-range", "150:210", "--steps", "20", "--out", str(out)])
        original = out.read_bytes()
        out.unlink()
        run_ok(runner, ["replay", str(out) + ".manifest.json"])
        assert out.read_bytes() == original

    def test_unknown_command_rejected(self, runner, tmp_path):
        manifest = tmp_path / "m.json"
        manifest.write_text(json.dumps({"command": "destroy", "parameters": {}, "outputs": []}))
        result = runner.invoke(main, ["replay", str(manifest)])
        assert result.exit_code == 1

    def test_missing_manifest_exit_2(self, runner, tmp_path):
        result = runner.invoke(main, ["replay", str(tmp_path / "nope.json")])
        assert result.exit_code == 2
