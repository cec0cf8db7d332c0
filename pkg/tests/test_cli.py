import csv
import io
import json
import math
import shutil
import subprocess
import sys

import pytest

from gammabis.cli import main
from gammabis.info_measures import binary_entropy


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    lines = text.splitlines()
    unit = lines[0]
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    return unit, rows


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


class TestBinaryRegion:
    def test_default_grid(self, capsys):
        code, out, _ = run(capsys, "binary-region", "--pe", "0.03", "--pd", "0.1", "--gamma", "0.2", "--ri", "0", "--rc-rule", "full")
        assert code == 0
        unit, rows = parse_csv(out)
        assert unit == "# unit=bits"
        assert list(rows[0]) == ["gamma", "izu", "rj_min", "rg_max", "feasible"]
        assert len(rows) == 513
        assert float(rows[0]["rg_max"]) == pytest.approx(0.2, abs=1e-12)
        assert "\r" not in out

    def test_noiseless(self, capsys):
        _, out, _ = run(capsys, "binary-region", "--pe", "0", "--pd", "0", "--gamma", "0", "--grid", "5")
        _, rows = parse_csv(out)
        izu = [float(r["izu"]) for r in rows]
        # without noise I(Z;U) equals I(Y;U) = 1 - H_b(gamma)
        for r, v in zip(rows, izu):
            assert v == pytest.approx(1 - float(binary_entropy(float(r["gamma"]))), abs=1e-11)
        assert izu[0] == 1.0 and izu[-1] == 0.0

    def test_grid_five(self, capsys):
        _, out, _ = run(capsys, "binary-region", "--pe", "0.03", "--pd", "0.1", "--grid", "5")
        _, rows = parse_csv(out)
        assert [float(r["gamma"]) for r in rows] == [0, 0.125, 0.25, 0.375, 0.5]

    def test_twelve_significant_digits(self, capsys):
        _, out, _ = run(capsys, "binary-region", "--pe", "0.03", "--pd", "0.1", "--grid", "3")
        _, rows = parse_csv(out)
        assert rows[0]["izu"] == format(1 - 0.5407504779634866, ".12g")

    def test_infeasible_written_as_nan(self, capsys):
        _, out, _ = run(capsys, "binary-region", "--pe", "0.03", "--pd", "0.1", "--ri", "0.1", "--grid", "3")
        _, rows = parse_csv(out)
        assert all(r["rg_max"] == "nan" and r["feasible"] == "0" for r in rows)

    def test_out_file(self, tmp_path, capsys):
        target = tmp_path / "b.csv"
        code, out, _ = run(capsys, "binary-region", "--pe", "0.03", "--pd", "0.1", "--grid", "4", "--out", str(target))
        assert code == 0 and out == ""
        assert target.read_text().startswith("# unit=bits\ngamma,izu")

    @pytest.mark.parametrize(
        "argv",
        [
            ["--pe", "0.7", "--pd", "0.1"],
            ["--pe", "0.1", "--pd", "x"],
            ["--pe", "0.1", "--pd", "0.1", "--grid", "1"],
            ["--pe", "0.1", "--pd", "0.1", "--rc-rule", "third"],
            ["--pe", "0.1", "--pd", "0.1", "--gamma", "-1"],
            ["--pe", "0.1"],
        ],
    )
    def test_bad_flags(self, argv, capsys):
        try:
            code = main(["binary-region", *argv])
        except SystemExit as exc:
            code = exc.code
        assert code == 2


class TestGaussianRegion:
    def test_uncorrelated(self, capsys):
        code, out, _ = run(capsys, "gaussian-region", "--rho1", "0", "--rho2", "0", "--grid", "16")
        assert code == 0
        unit, rows = parse_csv(out)
        assert unit == "# unit=nats"
        assert list(rows[0]) == ["alpha", "izu", "iyu", "ixu", "rj_min", "rg_max", "feasible"]
        for r in rows:
            assert float(r["izu"]) == 0 and float(r["ixu"]) == 0
            # U still describes Y itself
            assert float(r["iyu"]) == pytest.approx(0.5 * math.log(1 / float(r["alpha"])), rel=1e-11)

    def test_no_budget(self, capsys):
        _, out, _ = run(capsys, "gaussian-region", "--rho1", "0.9", "--rho2", "0.8", "--gamma", "0", "--rc-rule", "full")
        _, rows = parse_csv(out)
        assert len(rows) == 256 and all(float(r["rg_max"]) == 0 for r in rows)

    def test_last_row(self, capsys):
        _, out, _ = run(capsys, "gaussian-region", "--rho1", "0.9", "--rho2", "0.8", "--rc-rule", "half")
        _, rows = parse_csv(out)
        last = rows[-1]
        assert float(last["alpha"]) == 1.0
        assert float(last["rj_min"]) == 0.0 and float(last["izu"]) == 0.0

    @pytest.mark.parametrize("rho", ["1", "-1.2"])
    def test_bad_rho(self, rho, capsys):
        code, _, err = run(capsys, "gaussian-region", "--rho1", rho, "--rho2", "0.5")
        assert code == 2 and "rho" in err


class TestMembership:
    def test_origin(self, tmp_path, capsys):
        model = write_json(tmp_path / "m.json", {"kind": "binary", "p_e": 0.03, "p_d": 0.1})
        rates = write_json(tmp_path / "r.json", {"r_i": 0, "r_c": 0, "r_g": 0, "r_j": 10, "r_l": 10})
        code, out, _ = run(capsys, "membership", "--model", model, "--rates", rates, "--restarts", "4", "--steps", "20")
        assert code == 0
        verdict = json.loads(out)
        assert verdict["status"] == "witness" and verdict["found"] and verdict["unit"] == "bits"
        assert len(verdict["witness"]) == 2 and len(verdict["witness"][0]) == 4

    def test_alphabet_cap(self, tmp_path, capsys):
        model = write_json(
            tmp_path / "m.json",
            {"kind": "discrete", "px": [0.5, 0.5], "enrollment": [[0.9, 0.1], [0.1, 0.9]], "identification": [[1, 0], [0, 1]]},
        )
        rates = write_json(tmp_path / "r.json", {"r_i": 1.01, "r_c": 0, "r_g": 0, "r_j": 10, "r_l": 10})
        code, out, _ = run(capsys, "membership", "--model", model, "--rates", rates, "--restarts", "4", "--steps", "50")
        verdict = json.loads(out)
        assert code == 0 and verdict["status"] == "not-found" and "witness" not in verdict
        assert verdict["restarts_run"] == 4 and verdict["min_slack"] < 0

    def test_deterministic(self, tmp_path, capsys):
        model = write_json(tmp_path / "m.json", {"kind": "binary", "p_e": 0.03, "p_d": 0.1})
        rates = write_json(tmp_path / "r.json", {"r_i": 0.1, "r_c": 0.1, "r_g": 0.05, "r_j": 0.5, "r_l": 0.3, "gamma": 0.05})
        argv = ["membership", "--model", model, "--rates", rates, "--restarts", "6", "--steps", "100", "--seed", "3"]
        first = run(capsys, *argv)
        assert first == run(capsys, *argv)

    @pytest.mark.parametrize(
        "model_obj, rates_obj",
        [
            ({"kind": "binary", "p_e": 0.03}, {"r_i": 0, "r_c": 0, "r_g": 0, "r_j": 1, "r_l": 1}),
            ({"kind": "gaussian", "rho1": 0.9, "rho2": 0.8}, {"r_i": 0, "r_c": 0, "r_g": 0, "r_j": 1, "r_l": 1}),
            ({"kind": "binary", "p_e": 0.03, "p_d": 0.1}, {"r_i": -1, "r_c": 0, "r_g": 0, "r_j": 1, "r_l": 1}),
            ({"kind": "binary", "p_e": 0.03, "p_d": 0.1}, {"r_i": 0, "r_c": 0}),
            ({"kind": "binary", "p_e": 0.03, "p_d": 0.1}, [0, 0, 0, 1, 1]),
        ],
    )
    def test_schema_errors(self, tmp_path, capsys, model_obj, rates_obj):
        model = write_json(tmp_path / "m.json", model_obj)
        rates = write_json(tmp_path / "r.json", rates_obj)
        code, _, err = run(capsys, "membership", "--model", model, "--rates", rates)
        assert code == 2 and err.startswith("error:")

    def test_missing_and_malformed_files(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        rates = write_json(tmp_path / "r.json", {"r_i": 0, "r_c": 0, "r_g": 0, "r_j": 1, "r_l": 1})
        assert run(capsys, "membership", "--model", str(bad), "--rates", rates)[0] == 2
        assert run(capsys, "membership", "--model", str(tmp_path / "none.json"), "--rates", rates)[0] == 2


@pytest.fixture
def sim_files(tmp_path):
    def make(config):
        return [
            "--config", write_json(tmp_path / "c.json", config),
            "--model", write_json(tmp_path / "m.json", {"kind": "binary", "p_e": 0.03, "p_d": 0.1}),
            "--test", write_json(tmp_path / "t.json", {"table": [[0.9, 0.1], [0.1, 0.9]]}),
        ]

    return make


class TestSimulate:
    def test_exact(self, sim_files, capsys):
        cfg = {"n": 3, "m_gamma": 2, "m_c_rest": 1, "m_g_rest": 2, "m_m": 2, "epsilon": 1.5, "trials": 50}
        code, out, _ = run(capsys, "simulate", *sim_files(cfg), "--exact")
        assert code == 0
        report = json.loads(out)
        assert report["unit"] == "bits"
        for name in ("key_correlation", "secrecy_leakage", "privacy_leakage"):
            assert report[name]["exact"] is True
        assert report["key_correlation"]["value"] == pytest.approx(1.0, abs=1e-12)
        assert 0 <= report["encoder_failure_prob"] <= 1

    def test_monte_carlo_flags(self, sim_files, capsys):
        cfg = {"n": 4, "m_m": 4, "epsilon": 1.5, "trials": 30}
        code, out, _ = run(capsys, "simulate", *sim_files(cfg))
        report = json.loads(out)
        assert code == 0 and report["key_correlation"]["exact"] is False and report["trials"] == 30

    def test_trials_zero(self, sim_files, capsys):
        code, _, err = run(capsys, "simulate", *sim_files({"n": 4, "trials": 0}))
        assert code == 2 and "trials" in err

    def test_guard(self, sim_files, capsys):
        code, _, err = run(capsys, "simulate", *sim_files({"n": 12, "m_m": 64, "trials": 1}), "--exact")
        assert code == 3 and "size=" in err and "limit=16777216" in err

    def test_deterministic(self, sim_files, capsys):
        argv = ["simulate", *sim_files({"n": 5, "m_i": 2, "m_m": 6, "epsilon": 1.5, "trials": 80, "seed": 4})]
        first = run(capsys, *argv)
        assert first[0] == 0 and first == run(capsys, *argv)
        assert run(capsys, *argv, "--threads", "2") == first

    def test_transcript(self, sim_files, tmp_path, capsys):
        path = tmp_path / "t.csv"
        code, out, _ = run(capsys, "simulate", *sim_files({"n": 4, "m_i": 2, "m_m": 4, "epsilon": 1.5, "trials": 25}), "--transcript", str(path))
        assert code == 0
        rows = list(csv.DictReader(path.open()))
        assert list(rows[0]) == ["trial", "event", "w", "w_hat", "correct"]
        assert len(rows) == 25
        assert sum(r["correct"] == "0" for r in rows) == json.loads(out)["errors"]

    def test_bad_test_channel(self, sim_files, tmp_path, capsys):
        argv = sim_files({"n": 4, "trials": 2})
        argv[argv.index("--test") + 1] = write_json(tmp_path / "bad.json", {"rows": []})
        assert run(capsys, "simulate", *argv)[0] == 2


@pytest.mark.skipif(shutil.which("gammabis") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["gammabis", "binary-region", "--pe", "0.03", "--pd", "0.1", "--grid", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("# unit=bits")
    proc = subprocess.run([sys.executable, "-m", "gammabis.cli", "binary-region", "--pe", "2", "--pd", "0.1"], capture_output=True, text=True)
    assert proc.returncode == 2
