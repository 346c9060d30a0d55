import json

import numpy as np
import pytest

from spinglass.cli import main, parse_config
from spinglass.models import instance_from_json


def run_cli(*args):
    return main(list(args))


class TestParseConfig:
    def test_flags_populate_config(self):
        args = parse_config(
            ["phases", "--lambda-min", "0.2", "--lambda-max", "2.0", "--step", "0.05",
             "--seed", "7"]
        )
        assert args.command == "phases"
        assert args.lambda_min == 0.2
        assert args.lambda_max == 2.0
        assert args.step == 0.05
        assert args.seed == 7

    def test_config_file_supplies_flags(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("lambda-min=0.5\nlambda-max=1.0\nstep=0.25\nseed=9\n")
        args = parse_config(["--config", str(cfg), "se-sweep"])
        assert args.lambda_min == 0.5
        assert args.seed == 9

    def test_flag_beats_config_file(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("lambda-min=0.5\nlambda-max=1.0\nstep=0.25\n")
        args = parse_config(["--config", str(cfg), "se-sweep", "--lambda-max", "2.0"])
        assert args.lambda_max == 2.0
        assert args.lambda_min == 0.5

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("bogus=1\n")
        with pytest.raises(SystemExit, match="bogus"):
            parse_config(["--config", str(cfg), "se-sweep"])

    def test_malformed_config_line_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("no equals sign\n")
        with pytest.raises(SystemExit, match="malformed"):
            parse_config(["--config", str(cfg), "se-sweep"])

    def test_missing_required_flag_names_it(self, capsys):
        with pytest.raises(SystemExit):
            parse_config(["amp-run", "--lambda", "1.5"])
        assert "--n" in capsys.readouterr().err

    def test_env_seed_fallback(self, monkeypatch):
        monkeypatch.setenv("SPINGLASS_SEED", "123")
        args = parse_config(["landscape", "--lambda", "1.5"])
        assert args.seed == 123

    def test_explicit_seed_beats_env(self, monkeypatch):
        monkeypatch.setenv("SPINGLASS_SEED", "123")
        args = parse_config(["landscape", "--lambda", "1.5", "--seed", "4"])
        assert args.seed == 4


class TestSeSweepCommand:
    def test_row_count_and_transition(self, tmp_path):
        out = tmp_path / "r"
        assert run_cli(
            "se-sweep", "--lambda-min", "0.2", "--lambda-max", "2.0", "--step", "0.05",
            "--seed", "1", "--out", str(out),
        ) == 0
        lines = (out / "se-sweep.csv").read_text().splitlines()
        rows = [dict(zip(lines[1].split(","), line.split(","))) for line in lines[2:]]
        assert len(rows) == 37
        for row in rows:
            lam = float(row["lambda"])
            q_star = float(row["q_star"])
            if lam <= 1.0:
                assert q_star == 0.0
            if lam >= 1.05:
                assert q_star > 0.0

    def test_reruns_are_byte_identical(self, tmp_path):
        out = tmp_path / "r"
        args = (
            "se-sweep", "--lambda-min", "0.5", "--lambda-max", "1.5", "--step", "0.25",
            "--seed", "3", "--out", str(out), "--formats", "csv,json,svg",
        )
        run_cli(*args)
        first = {
            name: (out / name).read_bytes()
            for name in ("se-sweep.csv", "se-sweep.json", "se-sweep.svg")
        }
        run_cli(*args)
        for name, blob in first.items():
            assert (out / name).read_bytes() == blob


class TestAmpCommands:
    def test_amp_run_report_and_stored_instance(self, tmp_path):
        out = tmp_path / "r"
        assert run_cli(
            "amp-run", "--lambda", "1.5", "--n", "200", "--seed", "2",
            "--out", str(out), "--store-observation",
        ) == 0
        doc = json.loads((out / "amp-run.json").read_text())
        assert doc["config"]["lam"] == 1.5
        assert {"t", "overlap", "iterate_rms_change", "b_t"} <= set(doc["trajectory"][0])
        inst = instance_from_json((out / "amp-run-instance.json").read_text())
        assert inst.n == 200
        assert np.array_equal(inst.observation, inst.observation.T)

    def test_amp_vs_se_report_row(self, tmp_path):
        out = tmp_path / "r"
        assert run_cli(
            "amp-vs-se", "--lambda", "1.5", "--n", "500", "--seeds", "3",
            "--seed", "5", "--out", str(out),
        ) == 0
        doc = json.loads((out / "amp-vs-se.json").read_text())
        row = doc["rows"][0]
        assert float(row["abs_diff"]) == pytest.approx(
            abs(float(row["mean_overlap"]) - float(row["q_star"])), abs=1e-15
        )


class TestLandscapeCommands:
    def test_landscape_summary(self, tmp_path):
        out = tmp_path / "r"
        assert run_cli(
            "landscape", "--lambda", "1.5", "--grid-size", "64", "--out", str(out),
            "--formats", "json,svg",
        ) == 0
        doc = json.loads((out / "landscape.json").read_text())
        assert doc["summary"]["phase"] == "EASY"
        assert float(doc["summary"]["global_min_q"]) > 0.1
        assert (out / "landscape.svg").read_text().count("<polyline") == 1

    def test_phases_thresholds(self, tmp_path):
        out = tmp_path / "r"
        assert run_cli(
            "phases", "--lambda-min", "0.8", "--lambda-max", "1.2", "--step", "0.1",
            "--out", str(out),
        ) == 0
        doc = json.loads((out / "phases.json").read_text())
        assert float(doc["summary"]["lambda_stat"]) == pytest.approx(1.1)
        assert doc["summary"]["lambda_stat"] == doc["summary"]["lambda_comp"]
        labels = [(row["lambda"], row["phase"]) for row in doc["rows"]]
        assert labels[0] == (0.8, "IMPOSSIBLE_A")
        assert labels[-1] == (1.2, "EASY")


class TestSparseCommands:
    def test_sbm_bp_report(self, tmp_path):
        out = tmp_path / "r"
        assert run_cli(
            "sbm-bp", "--n", "2000", "--a", "10", "--b", "2", "--mode", "full",
            "--seed", "4", "--out", str(out), "--store-observation",
        ) == 0
        doc = json.loads((out / "sbm-bp.json").read_text())
        row = doc["rows"][0]
        assert float(row["ks_value"]) == pytest.approx(8.0 / 3.0)
        assert float(row["overlap"]) > 0.5
        inst = instance_from_json((out / "sbm-bp-instance.json").read_text())
        assert inst.n == 2000

    def test_popdyn_report(self, tmp_path):
        out = tmp_path / "r"
        assert run_cli(
            "popdyn", "--k", "6", "--eps", "0.166667", "--pool", "10000",
            "--iters", "30", "--seed", "5", "--out", str(out),
        ) == 0
        lines = (out / "popdyn.csv").read_text().splitlines()
        assert lines[1] == "iteration,mean,second_moment"
        assert len(lines) == 2 + 31
        final_mean = float(lines[-1].split(",")[1])
        assert final_mean > 0.1

    def test_oracle_check_dense(self, tmp_path):
        out = tmp_path / "r"
        assert run_cli(
            "oracle-check", "--n", "12", "--lambda", "1.5", "--seed", "6", "--out", str(out)
        ) == 0
        doc = json.loads((out / "oracle-check.json").read_text())
        assert float(doc["rows"][0]["amp_step_max_diff"]) < 1e-12

    def test_oracle_check_sparse(self, tmp_path):
        out = tmp_path / "r"
        assert run_cli(
            "oracle-check", "--n", "16", "--a", "8", "--b", "2", "--seed", "7",
            "--out", str(out),
        ) == 0
        doc = json.loads((out / "oracle-check.json").read_text())
        assert float(doc["rows"][0]["bp_full_step_msg_max_diff"]) < 1e-12

    def test_oracle_check_needs_a_model(self, tmp_path):
        with pytest.raises(SystemExit, match="oracle-check"):
            run_cli("oracle-check", "--n", "12", "--out", str(tmp_path / "r"))


class TestFormats:
    def test_unknown_format_rejected(self, tmp_path):
        with pytest.raises(SystemExit, match="format"):
            run_cli(
                "landscape", "--lambda", "1.5", "--grid-size", "64",
                "--out", str(tmp_path / "r"), "--formats", "pdf",
            )
