#!/usr/bin/env python3
# ==============================================================================
# [FILE] src/test_cli.py
# [PROJECT] StabVerify
# [ROLE] End-to-end tests for the stabverify command line and its exit codes
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================

import json

import pytest

from functions import paths
from src.stabverify import build_parser, run


@pytest.fixture
def logs(tmp_path, monkeypatch):
    target = tmp_path / "logs"
    monkeypatch.setattr(paths, "LOGS_DIR", target)
    return target


def _report(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_verify_cm_writes_a_passing_report(tmp_path, logs):
    out = tmp_path / "cm.json"
    assert run(["verify-cm", "--ring", "F_2", "--complex", "B", "--n", "3", "--out", str(out)]) == 0
    report = _report(out)
    assert report["command"] == "verify-cm"
    assert report["ring"]["spec"] == "F_2"
    assert [r["status"] for r in report["records"]] == ["pass"]
    assert report["records"][0]["anchor"] == "basis-complex-cohen-macaulay"
    assert (logs / "stabverify.log").exists()


def test_coinvariants_with_two_inverted(tmp_path, logs):
    out = tmp_path / "coinv.json"
    argv = ["coinvariants", "--ring", "F_2", "--module", "St", "--n", "2", "--coeff", "half", "--out", str(out)]
    assert run(argv) == 0
    assert _report(out)["counts"] == {"pass": 1, "fail": 0, "infeasible": 0}


def test_homology_defaults_to_integer_coefficients(tmp_path, logs):
    out = tmp_path / "h.json"
    assert run(["homology", "--ring", "F_2", "--complex", "B", "--n", "2", "--out", str(out)]) == 0
    witness = _report(out)["records"][0]["witness"]
    assert witness["coefficient"] == "Z"
    assert witness["homology"]["1"] == "Z"


def test_guard_turns_a_check_infeasible_not_failed(tmp_path, logs):
    out = tmp_path / "g.json"
    assert run(["verify-cm", "--ring", "F_3", "--n", "3", "--guard", "10", "--out", str(out)]) == 0
    assert _report(out)["records"][0]["status"] == "infeasible"


def test_bad_ring_is_an_error(tmp_path, logs):
    assert run(["ring", "--spec", "Z/1", "--out", str(tmp_path / "r.json")]) == 2
    error = json.loads((logs / "stabverify.error.json").read_text(encoding="utf-8"))
    assert error["app"] == "StabVerify"
    assert error["error_type"] == "RingSpecError"
    assert not (tmp_path / "r.json").exists()


@pytest.mark.parametrize("argv", [
    ["suite", "--profile", "nightly"],
    ["ring", "--bogus"],
    ["transmogrify"],
    ["build", "--ring", "F_2"],
])
def test_argument_errors_exit_two(argv, logs):
    assert run(argv) == 2
    assert (logs / "stabverify.error.json").exists()


def test_config_file_fills_unset_flags(tmp_path, logs):
    cfg = tmp_path / "flags.yml"
    cfg.write_text("ring: F_3\n", encoding="utf-8")
    out = tmp_path / "r.json"
    assert run(["ring", "--config", str(cfg), "--out", str(out)]) == 0
    assert _report(out)["ring"]["spec"] == "F_3"


def test_config_file_unknown_key(tmp_path, logs):
    cfg = tmp_path / "flags.yml"
    cfg.write_text("colour: red\n", encoding="utf-8")
    assert run(["ring", "--spec", "F_2", "--config", str(cfg)]) == 2


def test_stability_table_is_written_next_to_the_report(tmp_path, logs):
    out = tmp_path / "stab.json"
    argv = ["stability", "--ring", "F_2", "--n", "2", "--max-degree", "1", "--coeff", "Fp:3", "--out", str(out)]
    assert run(argv) == 0
    table = tmp_path / "stab.stability-F_2-Fp3.csv"
    assert table.exists()
    assert table.read_text(encoding="utf-8").splitlines()[0] == "n,i,dim_prev,dim_cur,dim_rel_i,dim_rel_next,verdict"
    assert "csv" not in _report(out)["records"][0]["witness"]


def test_parser_knows_every_command():
    parser = build_parser()
    args = parser.parse_args(["suite", "--profile", "desk", "--workers", "2"])
    assert (args.command, args.profile, args.workers) == ("suite", "desk", 2)
