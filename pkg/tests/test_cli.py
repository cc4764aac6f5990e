import json
import subprocess
import sys

import pytest

from rsoskit.cli import main
from rsoskit.errors import InvalidConfig, UnknownSuite
from rsoskit.suites import RunConfig, run_suite


def run_cli(args, tmp_path, name):
    out = tmp_path / name
    code = main(args + ["-o", str(out)])
    return code, out.read_text()


def test_verify_reports_schema_and_exit_code(tmp_path):
    code, text = run_cli(["verify", "unitarity", "--n", "2", "--r", "5",
                          "--seed", "7"], tmp_path, "u.json")
    assert code == 0
    report = json.loads(text)
    assert set(report) == {"suite", "config", "cases", "max_residual", "passed"}
    assert report["passed"] is True
    assert report["cases"][0]["residual"] < 1e-9


def test_verify_exit_nonzero_when_tolerance_exceeded(tmp_path):
    code, text = run_cli(["verify", "unitarity", "--tolerance", "1e-30"],
                         tmp_path, "fail.json")
    assert code == 1
    assert json.loads(text)["passed"] is False


def test_verify_all_aggregates(tmp_path):
    code, text = run_cli(["verify", "all", "--n", "2", "--r", "4"],
                         tmp_path, "all.json")
    assert code == 0
    report = json.loads(text)
    names = {c["name"] for c in report["cases"]}
    assert {"theta-odd", "fusion-rules-r4", "partition-state-dimension"} <= names


def test_unknown_suite_rejected():
    with pytest.raises(UnknownSuite):
        run_suite("nonsense", RunConfig())


def test_invalid_config_rejected():
    with pytest.raises(InvalidConfig):
        RunConfig(n=2, r=2)
    with pytest.raises(InvalidConfig):
        RunConfig(tau=-1j)
    assert main(["verify", "theta", "--tau", "0,-0.8"]) == 2


def test_byte_identical_reports(tmp_path):
    args = ["verify", "theta", "--n", "2", "--r", "5", "--seed", "3"]
    _, text1 = run_cli(args, tmp_path, "a.json")
    _, text2 = run_cli(args, tmp_path, "b.json")
    assert text1 == text2


def test_parallel_merge_matches_sequential(tmp_path):
    args = ["verify", "all", "--n", "2", "--r", "4"]
    _, seq = run_cli(args, tmp_path, "seq.json")
    _, par = run_cli(args + ["--parallel"], tmp_path, "par.json")
    assert seq == par


def test_gamma_override_accepted(tmp_path):
    code, text = run_cli(["verify", "unitarity", "--n", "2", "--r", "5",
                          "--gamma", "0.21,0.01"], tmp_path, "g.json")
    assert code == 0
    assert json.loads(text)["config"]["gamma"] == [0.21, 0.01]


def test_compute_character_csv(tmp_path):
    code, text = run_cli(["compute", "character", "--n", "2", "--r", "5"],
                         tmp_path, "c.csv")
    assert code == 0
    lines = text.strip().splitlines()
    assert lines[0] == "source,shift,coeff"
    assert len(lines) == 7  # header + six arrows of the vector character


def test_compute_character_json_and_reps(tmp_path):
    code, text = run_cli(["compute", "character", "--rep", "sym", "--p", "3",
                          "--format", "json"], tmp_path, "s.json")
    assert code == 0
    rows = json.loads(text)
    assert len(rows) == 4 and all(r["coeff"] == 1 for r in rows)


def test_compute_boltzmann_table(tmp_path):
    code, text = run_cli(["compute", "boltzmann-table", "--z", "0.3,0"],
                         tmp_path, "b.csv")
    assert code == 0
    lines = text.strip().splitlines()
    assert lines[0] == "a,in1,in2,out1,out2,weight_re,weight_im"
    assert len(lines) > 10


def test_compute_fusion_table(tmp_path):
    code, text = run_cli(["compute", "fusion-table", "--r", "4"],
                         tmp_path, "f.csv")
    assert code == 0
    lines = text.strip().splitlines()
    assert lines[0] == "p,q,s,N"
    assert len(lines) == 1 + 27
    assert lines[1] == "0,0,0,1"


def test_compute_spectrum_contains_golden_ratio(tmp_path):
    code, text = run_cli(["compute", "spectrum", "--n", "2", "--r", "5",
                          "--k", "1"], tmp_path, "spec.csv")
    assert code == 0
    assert "1.6180339887" in text


def test_compute_partition_report(tmp_path):
    code, text = run_cli(["compute", "partition", "--n", "2", "--r", "4",
                          "--cols", "2", "--rows", "2", "--z", "0.3,0"],
                         tmp_path, "p.json")
    assert code == 0
    doc = json.loads(text)
    assert set(doc) == {"value", "oracle_value", "rel_err"}
    assert doc["rel_err"] < 1e-9


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "rsoskit", "compute", "fusion-table",
         "--r", "4"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("p,q,s,N")


def test_base_point_rank_validated():
    assert main(["verify", "dybe", "--n", "3", "--base", "0.29"]) == 2
