import json
import subprocess
import sys

import pytest

from gauntlet.cli import main


def run_json(argv, capsys):
    code = main(argv + ["--format", "json"])
    return code, json.loads(capsys.readouterr().out)


def test_run_newcomb_matrix(capsys):
    code, rep = run_json(["run", "newcomb", "--theories", "edt,cdt-myopic,fdt"], capsys)
    assert code == 0
    acts = [r["induced_policy"]["choose"] for r in rep["theories"]]
    assert acts == ["one-box", "two-box", "one-box"]
    assert rep["theories"][0]["recommendations"]["choose"]["ev"] == {"one-box": "1000000", "two-box": "1000"}
    assert rep["meta"]["version"] and rep["meta"]["seed"] == 0


def test_run_sleeping_beauty_dutch_book(capsys):
    code, rep = run_json(["run", "sleeping-beauty-classic", "--theories", "cdt-myopic", "--rule", "ssa"], capsys)
    ex = rep["theories"][0]["exploit"]
    assert code == 0 and ex["verdict"] == "dutch-book"
    assert [n["net"] for n in ex["nets"]] == ["-2", "-2"]


def test_table_output_renders_report(capsys):
    assert main(["run", "newcomb", "--theories", "fdt"]) == 0
    out = capsys.readouterr().out
    assert "fdt" in out and "choose=one-box" in out


def test_unknown_theory_is_usage_error(capsys):
    assert main(["run", "newcomb", "--theories", "vibes"]) == 2
    assert "unknown theory" in capsys.readouterr().err


def test_missing_command_is_usage_error():
    assert main([]) == 2


def test_bad_parameter_is_validation_error():
    assert main(["run", "newcomb", "--param", "accuracy=1/3"]) == 3


def test_invalid_file_is_validation_error(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"name": "x", "chance": [{"name": "c", "domain": ["a"], "cpt": '
                 '[{"given": [], "probs": {"a": "1/0"}}]}]}')
    assert main(["run", str(p)]) == 3
    assert "zero denominator" in capsys.readouterr().err


def test_theory_failure_is_compute_error(capsys):
    code, rep = run_json(["run", "insurance", "--theories", "edt-ratify"], capsys)
    assert code == 4
    assert "NoRatifiableActionError" in rep["theories"][0]["error"]


def test_reports_are_byte_stable(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["run", "insurance", "--theories", "edt,fdt", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    capsys.readouterr()


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("GAUNTLET_SEED", "41")
    code, rep = run_json(["run", "quit-flip"], capsys)
    assert code == 0 and rep["meta"]["seed"] == 41
    assert rep["divergence"]["never_quit_negative_fraction"] == 1.0
    monkeypatch.setenv("GAUNTLET_SEED", "x")
    assert main(["run", "quit-flip"]) == 2


def test_export_and_rerun(tmp_path, capsys):
    p = tmp_path / "n.json"
    assert main(["export-scenario", "newcomb", "--out", str(p)]) == 0
    code, rep = run_json(["run", str(p), "--theories", "edt"], capsys)
    assert code == 0 and rep["theories"][0]["realized"] == "1000000"
    assert main(["export-scenario", "reservoir"]) == 2


def test_audit_certificate_and_exhaustive_statement(capsys):
    code, rep = run_json(["audit", "sleeping-beauty-classic", "cdt-myopic", "--rule", "ssa", "--bound", "20"], capsys)
    assert code == 0 and rep["result"] == "certificate"
    assert rep["exploit"]["verdict"] == "dutch-book"
    code, rep = run_json(["audit", "newcomb", "fdt", "--bound", "10"], capsys)
    assert code == 0 and rep["result"] == "none" and rep["searched_menus"] == 389403
    assert "389403" in rep["statement"]


def test_audit_bound_zero_is_usage_error():
    assert main(["audit", "newcomb", "fdt", "--bound", "0"]) == 2


def test_learn(tmp_path, capsys):
    curve = tmp_path / "curve.csv"
    code, rep = run_json(["learn", "repeated-newcomb", "pg-episode-return", "--seeds", "3", "--episodes", "300",
                          "--curve-csv", str(curve)], capsys)
    assert code == 0 and sum(rep["learners"]["pg-episode-return"]["outcomes"].values()) == 3
    assert curve.read_text().startswith("episode,return")


def test_learn_zero_episodes_is_usage_error():
    assert main(["learn", "repeated-newcomb", "q-learning", "--episodes", "0"]) == 2


def test_verify_paper_quick(capsys):
    code, rep = run_json(["verify-paper", "--no-rl", "--fuzz", "10"], capsys)
    assert code == 0
    assert rep["summary"]["claims"] >= 25 and not rep["summary"]["failed"]


def test_verify_paper_mutation_names_insurance(capsys):
    code = main(["verify-paper", "--no-rl", "--fuzz", "5", "--set", "insurance.smoke_lesion=-9/10"])
    err = capsys.readouterr().err
    assert code == 1
    assert "insurance" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gauntlet", "run", "newcomb", "--theories", "fdt",
                           "--format", "json"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["theories"][0]["policy_value"] == "1000000"
