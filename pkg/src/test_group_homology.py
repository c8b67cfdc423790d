#!/usr/bin/env python3
# ==============================================================================
# [FILE] src/test_group_homology.py
# [PROJECT] StabVerify
# [ROLE] Tests for bar-complex group homology, relative homology and stability tables
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================

import pytest

from functions.errors import GuardExceeded
from functions.group_homology import (
    CSV_FIELDS,
    bar_homology,
    relative_group_homology,
    stability_table,
    stabilize,
    stabilized_subgroup,
    trivial_group,
)
from functions.groups import enumerate_gl
from functions.homology import CoefficientDomain, HomologyResult, INTEGERS


def test_bar_homology_of_gl2_f2(f2):
    h = bar_homology(enumerate_gl(f2, 2), INTEGERS, 1)
    assert h[0] == HomologyResult(1)
    assert h[1] == HomologyResult(0, (2,))


def test_bar_homology_mod_p(f2):
    group = enumerate_gl(f2, 2)
    assert bar_homology(group, CoefficientDomain("Fp", 3), 2)[1].is_zero()
    assert bar_homology(group, CoefficientDomain("Fp", 2), 1)[1] == HomologyResult(1)


def test_integral_bar_homology_guard(f2):
    with pytest.raises(GuardExceeded):
        bar_homology(enumerate_gl(f2, 3), INTEGERS, 1)


def test_stabilize_appends_a_unit_corner(f3):
    assert stabilize(f3, ((2,),)) == ((2, 0), (0, 1))
    assert stabilize(f3, ()) == ((1,),)
    sub = stabilized_subgroup(enumerate_gl(f3, 1), enumerate_gl(f3, 2))
    assert sub.order == 2
    assert sub.is_subgroup_of(enumerate_gl(f3, 2))


def test_coefficients_decide_the_relative_h1(f2):
    gl1, gl2 = enumerate_gl(f2, 1), enumerate_gl(f2, 2)
    sub = stabilized_subgroup(gl1, gl2)
    assert relative_group_homology(gl2, sub, INTEGERS, 1)[1] == HomologyResult(0, (2,))
    assert relative_group_homology(gl2, sub, CoefficientDomain("Fp", 3), 1)[1].is_zero()


def test_relative_homology_against_the_trivial_group(f3):
    gl1 = enumerate_gl(f3, 1)
    sub = stabilized_subgroup(trivial_group(f3), gl1)
    assert relative_group_homology(gl1, sub, INTEGERS, 0)[0].is_zero()


def test_stability_table_is_consistent(f3):
    table = stability_table(f3, 2, 1, CoefficientDomain("Fp", 5))
    assert table.verdict == "Theorem-A-consistent"
    assert len(table.rows) == 4
    verdicts = {(r["n"], r["i"]): r["verdict"] for r in table.rows}
    assert verdicts[(1, 1)] == "outside-range"
    assert verdicts[(2, 1)] == "Theorem-A-consistent"


def test_stability_table_csv(f2):
    table = stability_table(f2, 2, 1, CoefficientDomain("Fp", 3))
    lines = table.to_csv().splitlines()
    assert lines[0] == ",".join(CSV_FIELDS)
    assert len(lines) == 1 + len(table.rows)
    assert table.to_json()["verdict"] == "Theorem-A-consistent"
    assert lines[-1].endswith(",Theorem-A-consistent")


def test_two_not_inverted_is_flagged_not_failed(f2):
    table = stability_table(f2, 2, 1, INTEGERS)
    assert table.verdict == "Theorem-A-consistent"
    assert any(r["verdict"] == "flagged-2-not-inverted" for r in table.rows)
    assert table.notes


def test_pair_sequence_splits_along_the_determinant(f3):
    # det retracts GL_2 onto the corner GL_1, so H_i(GL_2, GL_1) = H_i(GL_2) / H_i(GL_1)
    mod2 = CoefficientDomain("Fp", 2)
    gl1, gl2 = enumerate_gl(f3, 1), enumerate_gl(f3, 2)
    sub = stabilized_subgroup(gl1, gl2)
    small = bar_homology(gl1, mod2, 2)
    big = bar_homology(gl2, mod2, 2)
    rel = relative_group_homology(gl2, sub, mod2, 2)
    for i in range(3):
        assert rel[i].rank == big[i].rank - small[i].rank
    assert [small[i].rank for i in range(3)] == [1, 1, 1]
    assert rel[0].is_zero() and rel[1].is_zero()
