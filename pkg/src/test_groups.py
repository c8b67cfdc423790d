#!/usr/bin/env python3
# ==============================================================================
# [FILE] src/test_groups.py
# [PROJECT] StabVerify
# [ROLE] Tests for finite matrix groups, stabilizers, actions and abelianization
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================

import pytest

from functions.builders import build_basis_complex
from functions.errors import GuardExceeded, PreconditionError
from functions.groups import (
    GModule,
    abelianization,
    coinvariants,
    commutator_subgroup,
    enumerate_gl,
    greedy_generators,
    is_simplicial_action,
    mulclose,
    parse_group,
    permute_simplex,
    push_chain,
    relative_gl,
    stabilizer_subgroup,
    standard_generators,
    vertex_permutation,
)
from functions.homology import HomologyResult
from functions.linalg import all_vectors, determinant, vec_mat
from functions.rings import parse_ring


@pytest.mark.parametrize("spec,n,order", [
    ("Z/6", 1, 2),
    ("F_2", 2, 6),
    ("F_2", 3, 168),
    ("F_3", 2, 48),
    ("Z/4", 2, 96),
])
def test_gl_orders(spec, n, order):
    group = enumerate_gl(parse_ring(spec), n)
    assert group.order == order
    assert group.mode == "full"
    assert group.is_closed()


def test_generators_generate(f3):
    group = enumerate_gl(f3, 2)
    assert len(mulclose(f3, group.generators, [group.identity])) == group.order


def test_generator_closure_when_full_scan_is_over_guard(f2):
    group = enumerate_gl(f2, 2, guard=10)
    assert group.order == 6
    assert group.mode == "generators"
    assert "unverified" in group.to_json()["order_source"]


def test_forced_full_scan_respects_guard(f3):
    with pytest.raises(GuardExceeded):
        enumerate_gl(f3, 3, guard=1000, mode="full")


def test_gl_needs_positive_rank(f2):
    with pytest.raises(PreconditionError):
        enumerate_gl(f2, 0)


def test_relative_gl_fixes_first_rows(f2):
    group = relative_gl(f2, 2, 1)
    assert group.order == 24
    assert all(g[0] == (1, 0, 0) for g in group.elements)
    assert group.is_subgroup_of(enumerate_gl(f2, 3))


def test_stabilizers_of_a_vector(f2, f3):
    assert stabilizer_subgroup(enumerate_gl(f2, 2), fix=[(1, 0)]).order == 2
    assert stabilizer_subgroup(enumerate_gl(f3, 2), fix=[(1, 0)]).order == 6


def test_group_expressions():
    assert parse_group("GL(2,F_2)").order == 6
    assert parse_group("GLrel(2,1,F_2)").order == 24
    assert parse_group("stab(GL(2,F_3)|fix=1,0)").order == 6
    assert parse_group("stab(GL(2,F_2)|pres=1,0)").order == 2
    with pytest.raises(PreconditionError):
        parse_group("SL(2,F_2)")


def test_abelianization(f2):
    gl2 = enumerate_gl(f2, 2)
    assert len(commutator_subgroup(gl2)) == 3
    assert abelianization(gl2) == HomologyResult(0, (2,))
    assert abelianization(enumerate_gl(f2, 3)).is_zero()


def test_permute_simplex_tracks_the_sign():
    assert permute_simplex([1, 0, 2], (0, 1)) == ((0, 1), -1)
    assert permute_simplex([1, 0, 2], (0, 2)) == ((1, 2), 1)
    assert push_chain([1, 0, 2], {(0, 1): 3}) == {(0, 1): -3}


def test_gl_acts_simplicially_on_the_basis_complex(f3):
    x = build_basis_complex(f3, 2, compare=False)
    for g in enumerate_gl(f3, 2).generators:
        perm = vertex_permutation(x, f3, g)
        assert sorted(perm) == list(range(len(x.vertices)))
        assert is_simplicial_action(x, perm)


def _vector_module(ring, generators, twisted):
    """Z[nonzero vectors of R^2] when twisted, else Z[R^2]; g sends e_v to +-e_(v.g)."""
    vs = [v for v in all_vectors(ring, 2) if not twisted or any(v)]
    idx = {v: i for i, v in enumerate(vs)}

    def action(g):
        sign = -1 if twisted and determinant(ring, g) != ring.one else 1
        a = [[0] * len(vs) for _ in vs]
        for i, v in enumerate(vs):
            a[i][idx[vec_mat(ring, v, g)]] = sign
        return a

    return GModule(len(vs), [], generators, [action(g) for g in generators], action=action)


@pytest.mark.parametrize("twisted,expected", [(False, HomologyResult(2)), (True, HomologyResult(0, (2,)))])
def test_coinvariants_do_not_depend_on_the_generating_set(f3, twisted, expected):
    group = enumerate_gl(f3, 2)
    for gens in (group.elements, greedy_generators(group), standard_generators(f3, 2)):
        assert coinvariants(_vector_module(f3, gens, twisted)) == expected
