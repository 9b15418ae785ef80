import csv
import json

import numpy as np
import pytest

from dmclearn.cli import (
    EXIT_CAP,
    EXIT_OK,
    EXIT_VALIDATION,
    CliError,
    fmt,
    main,
    parse_learner,
)


@pytest.fixture
def channel_file(tmp_path):
    doc = {
        "x_labels": ["a", "b"],
        "y_labels": ["0", "1", "2"],
        "p": [0.5, 0.5],
        "w": [[0.86, 0.1, 0.04], [0.04, 0.1, 0.86]],
    }
    path = tmp_path / "channel.json"
    path.write_text(json.dumps(doc))
    return str(path)


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


class TestLmrateCommand:
    def test_builtin_ml_metric(self, capsys):
        assert main(["lmrate"]) == EXIT_OK
        out = capsys.readouterr().out
        value = float(out.splitlines()[0].split()[1])
        assert abs(value - 0.663912) < 1e-4
        assert "certified" in out

    def test_channel_file_matches_builtin(self, channel_file, capsys):
        assert main(["lmrate", "--channel", channel_file]) == EXIT_OK

    def test_zero_metric_file(self, tmp_path, capsys):
        mpath = tmp_path / "metric.json"
        mpath.write_text(json.dumps({"k": [[0.0, 1, 1], [1, 1, 1]]}))
        assert main(["lmrate", "--metric", str(mpath)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "zero_metric" in out
        assert out.splitlines()[0].split()[1] == "0"

    def test_malformed_channel_rejected(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"p": [0.5, 0.5], "w": [[0.5, 0.4], [0.5, 0.5]]}))
        assert main(["lmrate", "--channel", str(path)]) == EXIT_VALIDATION
        assert "error" in capsys.readouterr().err

    def test_invalid_json_diagnostics(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["lmrate", "--channel", str(path)]) == EXIT_VALIDATION
        err = capsys.readouterr().err
        assert "line" in err and "column" in err


class TestExactCdfCommand:
    def test_csv_schema_and_manifest(self, tmp_path, capsys):
        out = tmp_path / "cdf.csv"
        code = main(["exact-cdf", "--learner", "plugin", "--n", "4", "--out", str(out)])
        assert code == EXIT_OK
        rows = read_csv(out)
        assert rows[0] == ["rate_bits", "prob", "cdf"]
        rates = [float(r[0]) for r in rows[1:]]
        cdf = [float(r[2]) for r in rows[1:]]
        assert rates == sorted(rates)
        assert all(b >= a for a, b in zip(cdf, cdf[1:]))
        assert abs(cdf[-1] - 1.0) < 1e-9
        manifest = json.loads((tmp_path / "cdf.csv.manifest.json").read_text())
        assert manifest["command"] == "exact-cdf"
        assert manifest["parameters"]["n"] == 4
        assert "rng_algorithm" in manifest and "tool_version" in manifest

    def test_cap_exceeded(self, tmp_path, capsys):
        out = tmp_path / "cdf.csv"
        code = main(
            ["exact-cdf", "--learner", "plugin", "--n", "12", "--cap", "10", "--out", str(out)]
        )
        assert code == EXIT_CAP
        assert "cap" in capsys.readouterr().err

    def test_n_one_has_at_most_j_atoms(self, tmp_path, capsys):
        out = tmp_path / "cdf.csv"
        assert main(["exact-cdf", "--learner", "vsa:0.6", "--n", "1", "--out", str(out)]) == EXIT_OK
        assert len(read_csv(out)) - 1 <= 6


class TestSweepAndMcCommands:
    def test_alpha_sweep_csv(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code = main(
            ["alpha-sweep", "--n", "3", "--alphas", "0.5325,0.8", "--out", str(out)]
        )
        assert code == EXIT_OK
        rows = read_csv(out)
        assert rows[0] == ["alpha", "success_prob", "mode", "std_error"]
        assert len(rows) == 3
        assert rows[1][2] == "exact"

    def test_vsee_mc_csv_and_manifest(self, tmp_path, capsys):
        out = tmp_path / "mc.csv"
        code = main(
            ["vsee-mc", "--n", "100", "--trials", "5", "--seed", "1", "--out", str(out)]
        )
        assert code == EXIT_OK
        rows = read_csv(out)
        assert rows[0] == ["trial", "lm_rate_bits", "R_bits", "success", "certified"]
        assert len(rows) == 6
        manifest = json.loads((tmp_path / "mc.csv.manifest.json").read_text())
        assert "success_fraction" in manifest
        assert "mutual_information_bits" in manifest

    def test_rerun_is_bit_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert main(["vsee-mc", "--n", "60", "--trials", "4", "--out", str(out)]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()


class TestCalculatorCommands:
    def test_sample_size_report(self, capsys):
        code = main(
            ["sample-size", "--epsilon", "0.05", "--delta", "0.1", "--x-size", "2", "--y-size", "3"]
        )
        assert code == EXIT_OK
        out = dict(
            line.split(None, 1) for line in capsys.readouterr().out.strip().splitlines()
        )
        assert abs(float(out["alpha_star"]) - 0.5325) <= 0.0005
        assert abs(float(out["nu_alpha"]) - 6.136e4) <= 0.01 * 6.136e4

    def test_adversary_report(self, capsys):
        code = main(["adversary", "--epsilon", "0.5", "--delta", "0.25", "--n", "10"])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        lines = dict(
            (ln.split(None, 1)[0], ln.split(None, 1)[1]) for ln in out.strip().splitlines()
        )
        tau = float(lines["tau"])
        assert 0 < tau < 0.1101
        assert float(lines["plugin_zero_rate_bound"]) > 0.25

    def test_parameter_region_violation(self, capsys):
        code = main(
            ["sample-size", "--epsilon", "50", "--delta", "0.1", "--x-size", "2", "--y-size", "3"]
        )
        assert code == EXIT_VALIDATION


class TestHelpers:
    def test_fmt_nine_significant_digits(self):
        assert fmt(0.6639199023470969) == "0.663919902"
        assert fmt(1.0) == "1"

    def test_parse_learner(self):
        assert parse_learner("plugin")[0] == "plugin"
        name, fn = parse_learner("vsa:0.6")
        assert name == "vsa:0.6"
        with pytest.raises(CliError):
            parse_learner("vsa:abc")
        with pytest.raises(CliError):
            parse_learner("mystery")
