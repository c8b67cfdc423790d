#!/usr/bin/env python3
# ==============================================================================
# [FILE] src/test_homology.py
# [PROJECT] StabVerify
# [ROLE] Tests for Smith normal form, coefficient changes, chain complexes and sphericity
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================

import numpy as np
import pytest

from functions.builders import build_basis_complex, build_tits
from functions.complexes import SimplicialComplex, order_complex
from functions.errors import PreconditionError
from functions.homology import (
    ChainComplex,
    CoefficientDomain,
    HomologyResult,
    SparseIntMatrix,
    dense_top_homology_rank,
    homology_of,
    invariant_chain,
    invert_two_vanishes,
    rank_mod_p,
    reduced_homology,
    smith_normal_form,
    sphericity,
    verify_cm,
)


def test_smith_normal_form_divisors():
    m = SparseIntMatrix.from_dense([[2, 4], [6, 8]])
    assert smith_normal_form(m).divisors == [2, 4]
    assert smith_normal_form(SparseIntMatrix(3, 2)).divisors == []


def test_smith_normal_form_transforms():
    rows = [[2, 4], [6, 8]]
    snf = smith_normal_form(SparseIntMatrix.from_dense(rows), with_transforms=True)
    d = np.array(snf.U, dtype=object).dot(np.array(rows, dtype=object)).dot(np.array(snf.V, dtype=object))
    assert abs(d[0][0]) == 2 and abs(d[1][1]) == 4
    assert d[0][1] == 0 and d[1][0] == 0


def test_rank_mod_p():
    m = SparseIntMatrix.from_dense([[2, 4], [6, 8]])
    assert rank_mod_p(m, 2) == 0
    assert rank_mod_p(m, 3) == 2


def test_invariant_chain():
    assert invariant_chain([4, 6]) == [2, 12]
    assert HomologyResult.from_divisors(1, [1, 2]) == HomologyResult(1, (2,))


def test_homology_result_validation_and_text():
    assert str(HomologyResult(2, (2,))) == "Z^2 + Z/2"
    assert str(HomologyResult(0)) == "0"
    with pytest.raises(ValueError):
        HomologyResult(0, (1,))
    with pytest.raises(ValueError):
        HomologyResult(0, (2, 3))


def test_coefficient_parsing():
    assert CoefficientDomain.parse("Fp:3").p == 3
    assert str(CoefficientDomain.parse("half")) == "half"
    with pytest.raises(PreconditionError):
        CoefficientDomain.parse("Fp:4")
    with pytest.raises(PreconditionError):
        CoefficientDomain.parse("R")
    assert not CoefficientDomain.parse("Fp:2").inverts_two
    assert CoefficientDomain.parse("Fp:5").inverts_two


def test_coefficient_tensor():
    h = HomologyResult(1, (2, 6))
    assert CoefficientDomain("half").tensor(HomologyResult(0, (2, 6))) == HomologyResult(0, (3,))
    assert CoefficientDomain("Fp", 3).tensor(h) == HomologyResult(2)
    assert CoefficientDomain("Q").tensor(h) == HomologyResult(1)
    assert CoefficientDomain("Z").tensor(h) == h


def test_invert_two_vanishes():
    assert invert_two_vanishes(HomologyResult(0, (2,)))
    assert not invert_two_vanishes(HomologyResult(0, (6,)))
    assert not invert_two_vanishes(HomologyResult(1))


def test_torsion_chain_complex_under_each_coefficient():
    cc = ChainComplex({0: [(0,)], 1: [(0, 1)]}, {1: SparseIntMatrix.from_dense([[2]])})
    assert homology_of(cc, degrees=[0])[0] == HomologyResult(0, (2,))
    assert homology_of(cc, CoefficientDomain("Fp", 2), [0])[0] == HomologyResult(1)
    assert homology_of(cc, CoefficientDomain("Fp", 3), [0])[0].is_zero()
    assert homology_of(cc, CoefficientDomain("half"), [0])[0].is_zero()


def test_reduced_homology_of_small_buildings(f2):
    assert reduced_homology(order_complex(build_tits(f2, 2)), degrees=[0])[0] == HomologyResult(2)
    assert reduced_homology(build_basis_complex(f2, 2), degrees=[1])[1] == HomologyResult(1)
    assert reduced_homology(order_complex(build_tits(f2, 3)), degrees=[1])[1] == HomologyResult(8)


def test_empty_complex_has_reduced_h_minus_one():
    x = SimplicialComplex([], [])
    assert reduced_homology(x, degrees=[-1])[-1] == HomologyResult(1)


def test_sphericity_reports_the_failing_degree():
    three_points = SimplicialComplex.from_simplices([["a"], ["b"], ["c"]])
    assert sphericity(three_points, 0)["passed"]
    assert not sphericity(three_points, 1)["passed"]
    assert sphericity(SimplicialComplex.from_simplices([["a", "b"], ["c"]]), 1)["failing_degree"] == 0


def test_cohen_macaulay_basis_complex(f2):
    report = verify_cm(build_basis_complex(f2, 3), 2)
    assert report["passed"]
    assert report["links_checked"] > 0


def test_cohen_macaulay_failure_is_witnessed():
    bowtie = SimplicialComplex.from_simplices([["a", "b", "v"], ["v", "c", "d"]])
    report = verify_cm(bowtie, 2)
    assert not report["passed"]
    assert report["first_failure"]["simplex"] == ["v"]


def test_dense_oracle_matches_engine(f2):
    x = order_complex(build_tits(f2, 3))
    assert dense_top_homology_rank(x, 1) == (8, ())
    assert dense_top_homology_rank(build_basis_complex(f2, 2), 1) == (1, ())
