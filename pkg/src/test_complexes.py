#!/usr/bin/env python3
# ==============================================================================
# [FILE] src/test_complexes.py
# [PROJECT] StabVerify
# [ROLE] Tests for simplicial complexes, posets, order complexes and maps
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================

import pytest

from functions.complexes import (
    Poset,
    PosetMap,
    SimplicialComplex,
    SimplicialMap,
    complete_join_check,
    join,
    link,
    order_complex,
    simplex_poset,
    zero_sphere,
)
from functions.errors import PreconditionError, SimplicialError
from functions.homology import HomologyResult, reduced_homology


def octahedron() -> SimplicialComplex:
    return join(join(zero_sphere("a", "b"), zero_sphere("c", "d")), zero_sphere("e", "f"))


def test_square_is_a_circle():
    square = join(zero_sphere("a", "b"), zero_sphere("c", "d"))
    assert square.f_vector() == (4, 4)
    assert reduced_homology(square)[1] == HomologyResult(1)
    assert reduced_homology(square)[0].is_zero()


def test_octahedron_is_a_two_sphere():
    x = octahedron()
    assert x.f_vector() == (6, 12, 8)
    assert x.euler_characteristic() == 2
    h = reduced_homology(x)
    assert h[2] == HomologyResult(1)
    assert all(h[d].is_zero() for d in (-1, 0, 1))


def test_link_of_a_vertex_in_the_octahedron():
    x = octahedron()
    lk = link(x, (x.index["a"],))
    assert lk.f_vector() == (4, 4)
    assert "b" not in lk.index


def test_link_of_a_non_simplex_is_rejected():
    x = octahedron()
    with pytest.raises(PreconditionError):
        link(x, (x.index["a"], x.index["b"]))


def test_from_simplices_adds_the_downward_closure():
    x = SimplicialComplex.from_simplices([["a", "b", "c"]])
    assert x.f_vector() == (3, 3, 1)
    assert x.verify_closed()
    assert x.is_pure(2)
    assert len(x.facets) == 1


def test_verify_closed_catches_a_missing_face():
    x = SimplicialComplex(["a", "b"], [[(0,)], [(0, 1)]])
    assert not x.verify_closed()


def test_chain_poset_and_its_order_complex():
    p = Poset(["x", "y", "z"], [(0, 1), (1, 2)], name="chain")
    assert p.less(0, 2)
    assert p.covering_relations() == [(0, 1), (1, 2)]
    assert p.dim == 2
    assert order_complex(p).f_vector() == (3, 3, 1)


def test_order_relation_with_a_cycle_is_rejected():
    with pytest.raises(SimplicialError):
        Poset(["x", "y"], [(0, 1), (1, 0)])


def test_upper_lower_and_interval():
    p = Poset.from_relation(range(1, 13), lambda a, b: a != b and b % a == 0, name="div12")
    six = p.index[6]
    one, twelve = p.index[1], p.index[12]
    assert sorted(p.upper(six).elements) == [12]
    assert sorted(p.lower(six).elements) == [1, 2, 3]
    assert sorted(p.interval(one, twelve).elements) == [2, 3, 4, 6]


def test_simplex_poset_of_a_triangle():
    x = SimplicialComplex.from_simplices([["a", "b", "c"]])
    assert len(simplex_poset(x)) == 7
    assert len(simplex_poset(x, max_dim=0)) == 3


def test_poset_maps():
    p = Poset(["x", "y"], [(0, 1)])
    q = Poset(["u", "v"], [(0, 1)])
    iso = PosetMap.from_function(p, q, {"x": "u", "y": "v"}.get)
    assert iso.is_isomorphism()
    assert iso.inverse().mapping == [0, 1]
    rev = PosetMap.from_function(p, q, {"x": "v", "y": "u"}.get, reversing=True)
    assert rev.is_isomorphism()
    with pytest.raises(SimplicialError):
        PosetMap.from_function(p, q, {"x": "v", "y": "u"}.get)


def test_complete_join_check():
    base = SimplicialComplex.from_simplices([["u", "v"]])
    full = SimplicialComplex.from_simplices([["a1", "b"], ["a2", "b"]])
    proj = {"a1": "u", "a2": "u", "b": "v"}.get
    assert complete_join_check(SimplicialMap.from_function(full, base, proj))
    partial = SimplicialComplex.from_simplices([["a1", "b"], ["a2"]])
    assert not complete_join_check(SimplicialMap.from_function(partial, base, proj))


def test_link_in_a_join_is_the_join_of_links():
    x = SimplicialComplex.from_simplices([["a", "b", "c"], ["c", "d"]])
    y = SimplicialComplex.from_simplices([["e", "f"], ["g"]])
    z = join(x, y)
    for sigma in x.simplices():
        for tau in y.simplices():
            both = z.simplex_of(x.payloads(sigma) + y.payloads(tau))
            assert link(z, both) == join(link(x, sigma), link(y, tau))
