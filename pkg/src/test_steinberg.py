#!/usr/bin/env python3
# ==============================================================================
# [FILE] src/test_steinberg.py
# [PROJECT] StabVerify
# [ROLE] Tests for Steinberg and Charney modules, apartment classes and coinvariants
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================

import pytest

from functions.errors import PreconditionError
from functions.linalg import identity
from functions.steinberg import (
    HALF,
    RelativeSymbol,
    apartment_class,
    charney_module,
    enumerate_symbols,
    module_by_name,
    negation_witness,
    span_report,
    steinberg_module,
    transposition_witness,
    verify_apartments_generate,
    verify_coinvariants_vanish,
    verify_dual_apartments,
    verify_relative_generate,
)


def test_steinberg_ranks(f2, f3):
    assert steinberg_module(f2, 2).rank == 2
    assert steinberg_module(f2, 3).rank == 8
    assert steinberg_module(f3, 2).rank == 3


def test_relative_steinberg_ranks(f2, f3):
    st = steinberg_module(f2, 1, 1)
    assert st.kind == "Strel"
    assert st.degree == 0
    assert st.rank == 1
    assert steinberg_module(f3, 1, 1).rank == 2


def test_steinberg_needs_rank_two(f2):
    with pytest.raises(PreconditionError):
        steinberg_module(f2, 1)


def test_charney_ranks(f2, f3):
    assert charney_module(f2, 2).rank == 5
    assert charney_module(f3, 2).rank == 11


def test_relative_charney_module(f2):
    ch = module_by_name(f2, "Chrel", 3, w=[[0, 0, 1]])
    assert ch.kind == "Chrel"
    assert ch.degree == 1
    assert all(g[2] == (0, 0, 1) for g in ch.group.elements)


def test_action_is_a_homomorphism(f2):
    st = steinberg_module(f2, 3)
    assert st.module.verify_homomorphism(st.group)


def test_symbol_counts(f2, f3):
    assert len(enumerate_symbols(f2, 1, 1)) == 2
    assert len(enumerate_symbols(f3, 1, 1)) == 12
    assert len(enumerate_symbols(f2, 2, 1, j=0)) == 1


def test_symbol_validation():
    with pytest.raises(PreconditionError):
        RelativeSymbol(1, ((0, 1),), (1,), (1,))
    with pytest.raises(PreconditionError):
        RelativeSymbol(1, ((0, 1),), (0,), (0,))


def test_apartment_classes_and_transpositions(f2):
    st = steinberg_module(f2, 2)
    coords = apartment_class(st, identity(f2, 2))
    assert any(coords)
    assert transposition_witness(st, identity(f2, 2))["passed"]
    with pytest.raises(PreconditionError):
        apartment_class(st, ((1, 1), (1, 1)))


def test_apartments_generate(f2, f3):
    assert verify_apartments_generate(f2, 2)["passed"]
    report = verify_apartments_generate(f3, 2)
    assert report["passed"]
    assert report["equivariance"]["passed"]


def test_relative_apartments_generate(f2):
    report = verify_relative_generate(f2, 1, 1)
    assert report["passed"]
    assert report["symbols"] == 2


def test_relative_negation(f3):
    st = steinberg_module(f3, 1, 1)
    symbol = enumerate_symbols(f3, 1, 1)[0]
    witness = negation_witness(st, symbol)
    assert witness["symbol_negated"] and witness["class_negated"]


def test_dual_apartments(f2):
    report = verify_dual_apartments(f2, 2)
    assert report["passed"]
    assert len(report["signs"]) == 1


def test_coinvariants_vanish_with_two_inverted(f2, f3):
    for ring in (f2, f3):
        assert verify_coinvariants_vanish(steinberg_module(ring, 2), HALF)["passed"]
    assert verify_coinvariants_vanish(charney_module(f2, 2), HALF)["passed"]


def test_relative_steinberg_integral_coinvariants(f2):
    report = verify_coinvariants_vanish(steinberg_module(f2, 1, 1), HALF)
    assert report["integral_text"] == "Z/2"
    assert report["vanishes_with_two_inverted"]
    assert report["passed"]


def test_span_report_cokernel():
    report = span_report([[1, 0], [0, 2], [0, 0]], 2)
    assert not report["passed"]
    assert report["cokernel"] == {"rank": 0, "torsion": [2]}
    assert span_report([[1, 0], [1, 1]], 2)["passed"]
