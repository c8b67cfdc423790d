#!/usr/bin/env python3
# ==============================================================================
# [FILE] src/test_rings.py
# [PROJECT] StabVerify
# [ROLE] Tests for finite ring tables, the ring grammar and ring-level checks
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================

import pickle

import numpy as np
import pytest

from functions.errors import GuardExceeded, RingSpecError
from functions.rings import (
    RingSpec,
    check_axioms,
    check_stable_rank_one,
    opposite,
    parse_ring,
    units,
    zmod,
)


def test_zmod_needs_modulus_at_least_two():
    with pytest.raises(RingSpecError, match="N >= 2"):
        zmod(1)


def test_units_of_small_rings(z6, ut2):
    assert units(z6) == frozenset({1, 5})
    assert parse_ring("F_5").units == frozenset({1, 2, 3, 4})
    assert len(ut2.units) == 2
    assert ut2.size == 8


def test_galois_field_of_order_four_is_a_field():
    f4 = parse_ring("F_4")
    assert f4.size == 4
    assert f4.kind == "GaloisField"
    assert f4.commutative
    assert len(f4.units) == 3
    assert check_axioms(f4) == []


def test_product_ring_units_multiply():
    r = parse_ring("prod(F_2,F_3)")
    assert r.size == 6
    assert len(r.units) == 2


def test_opposite_reverses_multiplication(ut2):
    op = opposite(ut2)
    assert not ut2.commutative
    assert np.array_equal(op.mul, ut2.mul.T)
    assert np.array_equal(op.add, ut2.add)
    assert op.name == "op(UT2(F_2))"


def test_opposite_is_an_involution(ut2):
    assert opposite(opposite(ut2)) is ut2
    assert parse_ring("op(op(UT2(F_2)))") == ut2


def test_stable_rank_one_on_small_rings(f2, z6, ut2, z4):
    for ring in (f2, z6, ut2, z4):
        assert check_stable_rank_one(ring)


@pytest.mark.parametrize("spec", ["F_6", "Z/1", "UT2(F_2", "GF(2,2)", "prod()"])
def test_malformed_specs_are_rejected(spec):
    with pytest.raises(RingSpecError):
        parse_ring(spec)


def test_element_guard_blocks_large_rings():
    with pytest.raises(GuardExceeded):
        parse_ring("Z/5000", guard=4096)


def test_axiom_check_names_the_broken_axiom():
    base = zmod(3)
    broken = RingSpec("Broken", "broken", {}, base.add, np.zeros((3, 3), dtype=np.int64), 1, base.labels)
    assert check_axioms(broken) == ["two-sided identity"]


def test_element_arithmetic(z6):
    five = z6.elem(5)
    assert (five * five).index == 1
    assert (five + 1).index == 0
    assert (-five).index == 1
    assert five.inverse().index == 5
    with pytest.raises(RingSpecError):
        z6.elem(2).inverse()


def test_rings_pickle_by_name(ut2):
    again = pickle.loads(pickle.dumps(ut2))
    assert again == ut2
    assert np.array_equal(again.mul, ut2.mul)


def test_ring_json_block(z4):
    block = z4.to_json()
    assert block["spec"] == "Z/4"
    assert block["elements"] == 4
    assert block["units"] == 2
    assert block["axiom_check"] == "exhaustive"
