#!/usr/bin/env python3
# ==============================================================================
# [FILE] src/test_report.py
# [PROJECT] StabVerify
# [ROLE] Tests for check records, report counts and exit codes
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================

import json

import pytest

from functions.errors import GuardExceeded
from src.report import CheckRecord, VerificationReport, run_check


def test_status_is_validated():
    with pytest.raises(ValueError):
        CheckRecord("x", "plumbing", "maybe")


def test_run_check_statuses():
    assert run_check("a", "plumbing", lambda: {"passed": True}).status == "pass"
    assert run_check("b", "plumbing", lambda: {"passed": False}).status == "fail"

    def too_big():
        raise GuardExceeded("simplices", 10**9, 1000)

    record = run_check("c", "plumbing", too_big)
    assert record.status == "infeasible"
    assert record.witness["infeasible"] == {"guard": "simplices", "estimate": 10**9, "limit": 1000}


def test_run_check_lets_real_errors_through():
    with pytest.raises(ZeroDivisionError):
        run_check("d", "plumbing", lambda: {"passed": 1 // 0})


def test_exit_code_ignores_infeasible():
    report = VerificationReport("suite:smoke", claims={})
    report.add(CheckRecord("a", "plumbing", "pass"))
    report.add(CheckRecord("b", "plumbing", "infeasible"))
    assert report.exit_code == 0
    report.add(CheckRecord("c", "plumbing", "fail"))
    assert report.exit_code == 1
    assert report.counts == {"pass": 1, "fail": 1, "infeasible": 1}


def test_unregistered_anchor_is_a_warning():
    report = VerificationReport("ring", claims={"ring-axioms": "..."})
    report.add(CheckRecord("a", "ring-axioms", "pass"))
    report.add(CheckRecord("b", "made-up", "pass"))
    report.add(CheckRecord("c", "plumbing", "pass"))
    assert report.warnings == ["anchor_not_registered: made-up"]


def test_write_emits_json_and_tables(tmp_path):
    report = VerificationReport("stability", claims={})
    report.add(CheckRecord("s", "plumbing", "pass", {"passed": True}, 0.01234))
    report.tables["stability-F_2-Fp3"] = "n,i\n1,0\n"
    written = report.write(tmp_path / "out" / "report.json")
    assert [p.name for p in written] == ["report.json", "report.stability-F_2-Fp3.csv"]
    data = json.loads(written[0].read_text(encoding="utf-8"))
    assert data["records"][0]["wall_time_sec"] == 0.012
    assert data["app"] == "StabVerify"
