import json
import subprocess
import sys

import pytest

from corrlab.cli import main


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_moments_example(capsys):
    code, out, _ = run_cli(
        ["moments", "--alpha", "sqrt:2", "--d", "2", "--N", "2000", "--L", "10", "--k", "3"],
        capsys,
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["config"]["alpha"] == "sqrt:2"
    assert doc["moments"]["EW1"] == pytest.approx(10.0, rel=1e-9)
    assert doc["poisson_reference"]["poisson2"] == pytest.approx(110.0)
    assert set(doc["moments"]) == {"EW1", "EW2", "EW3"}


def test_modcount_a0_example(capsys):
    code, out, _ = run_cli(["modcount", "a0", "--q", "3"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("# corrlab ")
    assert lines[1] == "c1,c2,value"
    rows = lines[2:]
    assert len(rows) == 9
    assert rows[0] == "0,0,9"
    assert "0,1,4" in rows and "1,1,0" in rows


def test_approx_example(capsys):
    code, out, _ = run_cli(["approx", "--alpha", "sqrt:2", "--N", "20", "--eta", "0.2"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["q"] == 29 and doc["found"] and doc["q_prime"]


def test_simulate_csv_roundtrip(capsys):
    code, out, _ = run_cli(
        ["simulate", "--N", "100", "--L", "2", "--samples", "5000", "--seed", "3"], capsys
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1] == "k,count,prob"
    total = 0
    for row in lines[2:]:
        k, count, prob = row.split(",")
        total += int(count)
        assert float(prob) == int(count) / 5000  # cells round-trip exactly
    assert total == 5000


def test_byte_identical_outputs(capsys):
    args = ["simulate", "--N", "50", "--L", "3", "--samples", "2000", "--seed", "11"]
    _, out1, _ = run_cli(args, capsys)
    _, out2, _ = run_cli(args, capsys)
    assert out1 == out2


def test_exit_code_precondition(capsys):
    code, _, err = run_cli(["points", "--alpha", "bogus:1", "--N", "5"], capsys)
    assert code == 2
    doc = json.loads(err)
    assert doc["error"]["type"] == "AlphaParseError"
    assert "position" in doc["error"]


def test_exit_code_budget(capsys):
    code, _, err = run_cli(["modcount", "delta-star", "--q", "10007", "--beta", "0.01"], capsys)
    assert code == 3
    assert json.loads(err)["error"]["type"] == "BudgetError"


def test_pair_command(capsys):
    code, out, _ = run_cli(
        ["pair", "--alpha", "golden", "--N", "500", "--L", "5", "--kernel", "box:-1,1"], capsys
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["k"] == 2 and doc["expected"] == pytest.approx(10.0)


def test_triple_command_pyramid(capsys):
    code, out, _ = run_cli(
        ["triple", "--alpha", "sqrt:3", "--N", "300", "--L", "4", "--kernel", "pyramid"], capsys
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["k"] == 3 and doc["expected"] == pytest.approx(16.0)


def test_discrepancy_and_points(capsys, tmp_path):
    out_path = tmp_path / "pts.csv"
    code, _, _ = run_cli(
        ["points", "--alpha", "rational:1/3", "--d", "1", "--N", "3", "--out", str(out_path)],
        capsys,
    )
    assert code == 0
    lines = out_path.read_text().strip().splitlines()
    assert lines[1] == "i,value"
    assert len(lines) == 5
    code, out, _ = run_cli(["discrepancy", "--alpha", "rational:1/3", "--d", "1", "--N", "3"], capsys)
    assert json.loads(out)["discrepancy"] == pytest.approx(1 / 3)


def test_modcount_sidecar(capsys, tmp_path):
    out_path = tmp_path / "a0.csv"
    code, _, _ = run_cli(["modcount", "a0", "--q", "3", "--out", str(out_path)], capsys)
    assert code == 0
    side = json.loads((tmp_path / "a0.csv.meta.json").read_text())
    assert side["q"] == 3 and side["kind"] == "A0" and side["checksum"] == 27
    assert side["config"]["command"] == "modcount"


def test_variance_command(capsys):
    code, out, _ = run_cli(["variance", "--q", "101", "--M", "11"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["upper_ratio"] <= 50


def test_sandwich_command(capsys):
    code, out, _ = run_cli(
        ["sandwich", "--alpha", "rational:37/101", "--a", "37", "--q", "101",
         "--N", "10", "--L", "2", "--eta", "0.05"],
        capsys,
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["lower"] <= doc["r3"] <= doc["upper"]
    assert doc["preconditions_held"]


def test_config_file(capsys, tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("alpha=rational:1/7\nN=7\nd=1\n")
    code, out, _ = run_cli(["--config", str(cfgfile), "discrepancy"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["config"]["N"] == 7
    assert doc["discrepancy"] == pytest.approx(1 / 7)
    # flags override the file
    code, out, _ = run_cli(["--config", str(cfgfile), "discrepancy", "--N", "14"], capsys)
    assert json.loads(out)["config"]["N"] == 14


def test_verify_selected(capsys):
    code, out, _ = run_cli(["verify", "--only", "10"], capsys)
    assert code == 0
    assert out.startswith("PASS")


def test_console_entrypoint_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "corrlab.cli", "approx", "--alpha", "rational:1/4",
         "--N", "20", "--eta", "0.2"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["found"] is False
