"""Command-line surface: subcommands, CSV conventions, exit codes."""

import csv
import json
import statistics
import subprocess
import sys

import pytest

from copelandbench import envgen
from copelandbench.cli import CSV_COLUMNS, main

from conftest import make_instance


def save(tmp_path, name, inst):
    path = tmp_path / name
    envgen.save_instance(inst, path)
    return str(path)


@pytest.fixture()
def counterexample_file(tmp_path, counterexample):
    return save(tmp_path, "counter.json", counterexample)


# --- run ---------------------------------------------------------------------


def test_run_deterministic_two_arm(tmp_path, two_arm_deterministic, capsys):
    inst = save(tmp_path, "det.json", two_arm_deterministic)
    out = tmp_path / "rows.csv"
    code = main([
        "run", "--algorithm", "pocowista", "--instance", inst,
        "--delta", "0.01", "--reps", "1", "--seed", "5", "--out", str(out),
    ])
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 1
    row = rows[0]
    assert list(row) == CSV_COLUMNS
    assert row["algorithm"] == "pocowista" and row["class"] == "file"
    assert row["samples"] == "13" and row["rounds"] == "1"
    assert row["returned_arm"] == "1" and row["correct"] == "1"
    assert row["budget_exceeded"] == "0"
    assert row["seed"] == "5" and row["rep"] == "0"
    summary = capsys.readouterr().out
    assert "mean_samples=13.0" in summary
    assert "error_rate=0.0" in summary


def test_run_csv_identical_across_jobs(tmp_path):
    outs = []
    for jobs in ("1", "4"):
        out = tmp_path / f"rows{jobs}.csv"
        code = main([
            "run", "--algorithm", "tra", "--class", "p1", "--n", "5",
            "--delta", "0.1", "--reps", "12", "--seed", "3",
            "--jobs", jobs, "--out", str(out),
        ])
        assert code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_run_summary_matches_recomputed_stats(tmp_path, counterexample_file, capsys):
    out = tmp_path / "rows.csv"
    code = main([
        "run", "--algorithm", "pocowista", "--instance", counterexample_file,
        "--delta", "0.1", "--reps", "10", "--out", str(out),
    ])
    assert code == 0
    summary = {}
    for line in capsys.readouterr().out.splitlines():
        if "=" in line and " " not in line:
            key, _, val = line.partition("=")
            summary[key] = val
    rows = list(csv.DictReader(out.open()))
    samples = [int(r["samples"]) for r in rows if r["budget_exceeded"] == "0"]
    assert float(summary["mean_samples"]) == pytest.approx(
        statistics.fmean(samples), abs=1e-9
    )
    assert float(summary["std_samples"]) == pytest.approx(
        statistics.stdev(samples), abs=1e-9
    )
    err = 1.0 - statistics.fmean(
        [int(r["correct"]) for r in rows if r["budget_exceeded"] == "0"]
    )
    assert float(summary["error_rate"]) == pytest.approx(err, abs=1e-12)


def test_run_fresh_instance_per_rep_seeds(tmp_path):
    out = tmp_path / "rows.csv"
    main([
        "run", "--algorithm", "pocowista", "--class", "p2", "--n", "4",
        "--delta", "0.1", "--reps", "5", "--seed", "100", "--out", str(out),
    ])
    rows = list(csv.DictReader(out.open()))
    assert [r["seed"] for r in rows] == ["100", "101", "102", "103", "104"]
    assert {r["class"] for r in rows} == {"p2"}
    assert {r["n"] for r in rows} == {"4"}


def test_run_json_format(tmp_path, counterexample_file):
    out = tmp_path / "run.json"
    code = main([
        "run", "--algorithm", "tra", "--instance", counterexample_file,
        "--delta", "0.1", "--reps", "3", "--format", "json", "--out", str(out),
    ])
    assert code == 0
    payload = json.loads(out.read_text())
    assert len(payload["runs"]) == 3
    assert payload["summary"]["reps"] == 3
    assert payload["summary"]["budget_exceeded"] == 0


def test_run_budget_exceeded_rows_are_excluded(tmp_path, capsys):
    inst = save(tmp_path, "tie.json", make_instance(2, {(1, 2): (0.5, 0.0, 0.5)}))
    out = tmp_path / "rows.csv"
    code = main([
        "run", "--algorithm", "pocowista", "--instance", inst,
        "--delta", "0.05", "--reps", "2", "--budget", "300", "--out", str(out),
    ])
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["budget_exceeded"] for r in rows] == ["1", "1"]
    assert {r["samples"] for r in rows} == {"300"}
    assert {r["returned_arm"] for r in rows} == {""}
    summary = capsys.readouterr().out
    assert "budget_exceeded=2" in summary
    assert "mean_samples=nan" in summary


def test_run_rejects_bad_config(tmp_path, capsys):
    assert main([
        "run", "--algorithm", "tra", "--class", "p1", "--n", "5",
        "--delta", "1.5", "--reps", "2",
    ]) == 1
    assert main([
        "run", "--algorithm", "tra", "--class", "p1",
        "--delta", "0.1", "--reps", "2",
    ]) == 1
    assert "error:" in capsys.readouterr().err


# --- gen / validate -----------------------------------------------------------


def test_gen_validate_run_bounds_pipeline(tmp_path, capsys):
    inst = tmp_path / "p1cw.json"
    assert main(["gen", "--class", "p1cw", "--n", "5", "--seed", "7",
                 "--out", str(inst)]) == 0
    gen_msg = capsys.readouterr().out
    assert f"wrote {inst}" in gen_msg and "copeland_set=" in gen_msg

    assert main(["validate", "--instance", str(inst)]) == 0
    val_msg = capsys.readouterr().out
    assert "n=5 pairs=10" in val_msg and "min_gap=" in val_msg

    assert main(["run", "--algorithm", "pocowista", "--instance", str(inst),
                 "--delta", "0.1", "--reps", "2", "--out", str(tmp_path / "r.csv")]) == 0
    capsys.readouterr()

    assert main(["bounds", "--instance", str(inst), "--delta", "0.1"]) == 0
    bounds_msg = capsys.readouterr().out
    assert "upper_pocowista" in bounds_msg


def test_gen_worstcase_reports_winner(tmp_path, capsys):
    inst = tmp_path / "wc.json"
    code = main(["gen", "--class", "worstcase", "--n", "8", "--out", str(inst)])
    assert code == 0
    msg = capsys.readouterr().out
    assert "copeland_set=[1]" in msg
    assert "1:5.0" in msg
    assert envgen.load_instance(inst).n == 8


def test_gen_transitive_reports_transitivity(tmp_path, capsys):
    inst = tmp_path / "tr.json"
    code = main(["gen", "--class", "transitive", "--n", "6",
                 "--indiff-fraction", "0.5", "--seed", "2", "--out", str(inst)])
    assert code == 0
    assert "transitive=True" in capsys.readouterr().out


def test_validate_exit_codes(tmp_path, capsys):
    bad = make_instance(2, {(1, 2): (0.5, 0.3, 0.2)})
    blob = bad.to_json_dict()
    blob["pairs"][0]["p_prec"] = 0.4  # breaks the simplex
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(blob))
    assert main(["validate", "--instance", str(path)]) == 1
    assert "fatal:" in capsys.readouterr().out

    assert main(["validate", "--instance", str(tmp_path / "missing.json")]) == 2
    assert "error:" in capsys.readouterr().err


def test_validate_mode_tie_warning(tmp_path, capsys):
    tie = make_instance(2, {(1, 2): (0.45, 0.45, 0.1)})
    path = save(tmp_path, "tie.json", tie)
    assert main(["validate", "--instance", path]) == 0
    out = capsys.readouterr().out
    assert "warning:" in out and "mode tie" in out


# --- bounds --------------------------------------------------------------------


def test_bounds_json_values(tmp_path, counterexample_file, capsys):
    code = main(["bounds", "--instance", counterexample_file,
                 "--delta", "0.05", "--format", "json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["lower_simple"] == 0.0
    assert payload["lower_detailed"] == pytest.approx(18.353362134321408, rel=1e-9)
    assert payload["upper_pocowista"] > payload["lower_detailed"]

    two = save(tmp_path, "two.json", make_instance(2, {(1, 2): (0.6, 0.3, 0.1)}))
    main(["bounds", "--instance", two, "--delta", "0.05", "--format", "json"])
    payload = json.loads(capsys.readouterr().out)
    assert payload["upper_pocowista"] == pytest.approx(6116.729904322492, rel=1e-9)


def test_bounds_table_mentions_reasons(tmp_path, all_indifferent_3, capsys):
    path = save(tmp_path, "ai.json", all_indifferent_3)
    assert main(["bounds", "--instance", path, "--delta", "0.05"]) == 0
    out = capsys.readouterr().out
    assert "not applicable: no unique Copeland winner" in out
    assert "upper_pocowista" in out


def test_bounds_missing_file_exit_code(capsys):
    assert main(["bounds", "--instance", "/nonexistent.json", "--delta", "0.1"]) == 2
    assert "error:" in capsys.readouterr().err


# --- process-level entry ----------------------------------------------------------


def test_module_entry_point(tmp_path, two_arm_deterministic):
    inst = save(tmp_path, "det.json", two_arm_deterministic)
    proc = subprocess.run(
        [sys.executable, "-m", "copelandbench", "run", "--algorithm", "pocowista",
         "--instance", inst, "--delta", "0.01", "--reps", "1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    lines = proc.stdout.strip().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1].endswith(",13,1,1,1,0")
    assert "mean_samples=13.0" in proc.stderr
