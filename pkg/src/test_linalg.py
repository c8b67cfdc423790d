#!/usr/bin/env python3
# ==============================================================================
# [FILE] src/test_linalg.py
# [PROJECT] StabVerify
# [ROLE] Tests for vectors, submodules, normal forms and invertible matrices
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================

import itertools

import numpy as np
import pytest

from functions.builders import free_summands
from functions.errors import NotInvertibleError, PreconditionError
from functions.linalg import (
    all_vectors,
    annihilator_dual,
    check_nested_decomposition,
    complement_of,
    extends_to_basis,
    format_matrix,
    howell_form,
    identity,
    inverse_transpose,
    invert,
    is_free_summand,
    is_partial_basis,
    is_unimodular,
    left_span_elements,
    mat_mul,
    parse_matrix,
    span_submodule,
    summand_witness,
    vec_mat,
)
from functions.rings import opposite, parse_ring


def test_unimodular_vectors_over_z6(z6):
    assert is_unimodular(z6, (2, 3))
    assert not is_unimodular(z6, (2, 4))
    assert is_unimodular(z6, (5, 0))


def test_unimodular_rejects_empty_vector(f2):
    with pytest.raises(PreconditionError):
        is_unimodular(f2, ())


def test_partial_basis(f2, z4):
    assert is_partial_basis(f2, [(1, 0), (1, 1)], 2)
    assert not is_partial_basis(f2, [(1, 0), (0, 1), (1, 1)], 2)
    assert not is_partial_basis(z4, [(2, 1), (0, 2)], 2)
    assert is_partial_basis(z4, [(1, 2)], 2)


def test_partial_basis_over_noncommutative_ring(ut2):
    one = ut2.one
    assert is_partial_basis(ut2, [(one, 0), (0, one)], 2)
    assert not is_partial_basis(ut2, [(0, 0)], 2)


def test_extends_to_basis_keeps_prefix(f2):
    basis = extends_to_basis(f2, [(1, 1)], 2)
    assert basis[0] == (1, 1)
    assert len(basis) == 2
    assert is_partial_basis(f2, basis, 2)


def test_howell_form(z4):
    assert howell_form(z4, [[2]]) == ((2,),)
    # the annihilator row (0, 2) = 2 * (2, 1) is part of the normal form
    assert howell_form(z4, [[2, 1]]) == ((2, 1), (0, 2))


def test_howell_form_needs_zmod(ut2):
    with pytest.raises(PreconditionError):
        howell_form(ut2, [[ut2.one]])
    with pytest.raises(PreconditionError):
        howell_form(parse_ring("F_4"), [[1]])


def test_span_sizes(z6, z4):
    assert span_submodule(z6, [(2, 3)], 2).size == 6
    assert span_submodule(z4, [(2, 1)], 2).size == 4


def test_torsion_submodule_is_not_a_free_summand(z4):
    assert is_free_summand(span_submodule(z4, [(2, 0)], 2)) is None


def test_free_summand_records_witness(f2):
    sub = span_submodule(f2, [(1, 1)], 2)
    assert is_free_summand(sub) == 1
    assert sub.free_rank == 1
    assert sub.basis() == ((1, 1),)


def test_complement_meets_in_zero(f2):
    v = span_submodule(f2, [(1, 0)], 2)
    c = complement_of(v)
    assert c.elements == frozenset({(0, 0), (0, 1)})
    assert v.elements & c.elements == {(0, 0)}


def test_summand_witness_extends_inner_basis(f3):
    inner = span_submodule(f3, [(1, 0, 0)], 3)
    outer = span_submodule(f3, [(1, 0, 0), (0, 1, 0)], 3)
    basis = summand_witness(inner, outer)
    assert basis[0] == (1, 0, 0)
    assert len(basis) == 2
    assert span_submodule(f3, basis, 3) == outer


def test_invert_over_field(f3):
    m = ((1, 1), (0, 1))
    assert invert(f3, m) == ((1, 2), (0, 1))
    assert mat_mul(f3, m, invert(f3, m)) == identity(f3, 2)


def test_invert_over_noncommutative_ring(ut2):
    one = ut2.one
    m = ((one, 1), (0, one))
    assert mat_mul(ut2, m, invert(ut2, m)) == identity(ut2, 2)


def test_singular_matrix_is_not_invertible(z4):
    with pytest.raises(NotInvertibleError):
        invert(z4, ((2, 0), (0, 1)))


def test_inverse_transpose_lives_over_the_opposite_ring(f3, ut2):
    it = inverse_transpose(f3, ((1, 1), (0, 1)))
    assert it.rows == ((1, 0), (2, 1))
    assert inverse_transpose(ut2, identity(ut2, 2)).ring == opposite(ut2)


def test_annihilator_of_a_line(f2):
    ann = annihilator_dual(span_submodule(f2, [(1, 0)], 2))
    assert ann.elements == frozenset({(0, 0), (0, 1)})
    assert ann.ring == opposite(f2)


def test_transform_carries_witness(f3):
    sub = span_submodule(f3, [(1, 0)], 2, witness=[(1, 0)])
    g = ((0, 1), (1, 0))
    moved = sub.transform(g)
    assert moved.witness == (vec_mat(f3, (1, 0), g),)
    assert moved.elements == span_submodule(f3, [(0, 1)], 2).elements


def test_nested_decomposition(f2):
    def sub(*vs):
        return span_submodule(f2, list(vs), 3, witness=list(vs))

    e1, e2, e3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    result = check_nested_decomposition(sub(e1), sub(e2, e3), sub(e1, e2), sub(e3))
    assert result == {"intersection_free": True, "outer_splits": True,
                      "complement_splits": True, "three_way": True}


def test_nested_decomposition_rejects_unnested_input(f2):
    def sub(*vs):
        return span_submodule(f2, list(vs), 2, witness=list(vs))

    with pytest.raises(PreconditionError):
        check_nested_decomposition(sub((1, 0)), sub((0, 1)), sub((0, 1)), sub((1, 0)))


def test_matrix_text_format(f3):
    m = parse_matrix(f3, "1,2;0,1")
    assert m.rows == ((1, 2), (0, 1))
    assert format_matrix(m.rows) == "1,2;0,1"
    assert str(m) == "1,2;0,1"
    with pytest.raises(PreconditionError):
        parse_matrix(f3, "1,3")
    with pytest.raises(PreconditionError):
        parse_matrix(f3, "1,0;1")


@pytest.mark.parametrize("modulus", [4, 6, 8])
def test_howell_form_is_idempotent_and_keeps_the_span(modulus):
    ring = parse_ring(f"Z/{modulus}")
    rng = np.random.default_rng(modulus)
    for _ in range(30):
        rows = rng.integers(0, modulus, size=(int(rng.integers(1, 5)), 3)).tolist()
        h = howell_form(ring, rows, 3)
        assert howell_form(ring, h, 3) == h
        assert left_span_elements(ring, h, 3) == left_span_elements(ring, rows, 3)


@pytest.mark.parametrize("spec,n", [("F_2", 3), ("F_3", 2), ("Z/4", 2)])
def test_partial_bases_are_exactly_the_extendable_lists(spec, n):
    # over these rings a free submodule is a summand, so span size decides
    ring = parse_ring(spec)
    vectors = list(all_vectors(ring, n))
    for k in range(1, n + 1):
        for vs in itertools.combinations(vectors, k):
            free = len(left_span_elements(ring, vs, n)) == ring.size ** k
            assert is_partial_basis(ring, vs, n) == free
            if free:
                basis = extends_to_basis(ring, vs, n)
                assert basis is not None and tuple(basis[:k]) == vs
                assert len(left_span_elements(ring, basis, n)) == ring.size ** n
            else:
                with pytest.raises(PreconditionError):
                    extends_to_basis(ring, vs, n)


@pytest.mark.parametrize("spec,n", [("F_2", 3), ("Z/4", 2)])
def test_annihilator_reverses_the_summand_lattice(spec, n):
    ring = parse_ring(spec)
    subs = [s for level in free_summands(ring, n).values() for s in level]
    duals = [annihilator_dual(s) for s in subs]
    targets = {s.elements for level in free_summands(opposite(ring), n).values() for s in level}
    assert {d.elements for d in duals} == targets
    assert len(targets) == len(subs)
    for s, d in zip(subs, duals):
        assert is_free_summand(d) == n - is_free_summand(s)
        assert annihilator_dual(d).elements == s.elements
    for (a, da), (b, db) in itertools.product(zip(subs, duals), repeat=2):
        assert (a <= b) == (db <= da)
