#!/usr/bin/env python3
# ==============================================================================
# [FILE] src/test_builders.py
# [PROJECT] StabVerify
# [ROLE] Tests for partial-basis, Tits, splitting and frame builders and their maps
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================

import pytest

from functions.builders import (
    _check_pair_equivariance,
    ComplexRequest,
    build,
    build_basis_complex,
    build_BX,
    build_frames,
    build_splitting,
    build_tits,
    coordinate_projection,
    cutting_down_iso,
    dual_tits_iso,
    dualizing_splitting_iso,
    embed_basis_complex,
    enumerate_bases,
    frame_coframe_iso,
    frame_projection,
    span_map,
    verify_fiber_isos,
)
from functions.complexes import PosetMap, complete_join_check
from functions.errors import GuardExceeded, PreconditionError
from functions.homology import relative_homology, reduced_homology, verify_spherical
from functions.linalg import span_submodule


def test_basis_complex_f_vectors(f2):
    assert build_basis_complex(f2, 2).f_vector() == (3, 3)
    x = build_basis_complex(f2, 3)
    assert x.f_vector() == (7, 21, 28)
    assert x.meta["b_equals_u"] is True
    assert x.meta["eligible"] is True


def test_basis_complex_agrees_with_unimodular_construction(z4, ut2):
    for ring in (z4, ut2):
        x = build_basis_complex(ring, 2)
        assert x.meta["b_equals_u"] is True


def test_relative_basis_complex_vertices(f2):
    x = build_basis_complex(f2, 1, 1)
    assert sorted(x.vertices) == [(0, 1), (1, 1)]
    assert x.f_vector() == (2,)


def test_enumerate_bases_counts_gl(f2, f3):
    # unordered bases = |GL_n| / n!
    assert len(enumerate_bases(f2, 3)) == 28
    assert len(enumerate_bases(f3, 2)) == 24


def test_guard_is_checked_before_enumeration(f3):
    with pytest.raises(GuardExceeded):
        build_basis_complex(f3, 3, guard=100)


def test_bx_adds_externally_additive_edges(f2):
    x = build_BX(f2, 1, 1)
    assert x.f_vector() == (2, 1)
    assert x.meta["externally_additive"] == 1
    assert x.contains_complex(build_basis_complex(f2, 1, 1))


def test_bx_is_not_spherical_in_the_sharp_case(f2):
    x = build_BX(f2, 2, 1)
    assert not reduced_homology(x, degrees=[1])[1].is_zero()
    assert not verify_spherical(x, 1)


def test_bx_relative_homology_vanishes_below_n(f2):
    bx = build_BX(f2, 1, 1)
    assert relative_homology(bx, build_basis_complex(f2, 1, 1), degrees=[0])[0].is_zero()
    assert relative_homology(bx, embed_basis_complex(f2, 1, 1), degrees=[0])[0].is_zero()


def test_bx_needs_fixed_vectors(f2):
    with pytest.raises(PreconditionError):
        build_BX(f2, 2, 0)


def test_tits_posets(f2):
    t3 = build_tits(f2, 3)
    assert len(t3) == 14
    assert len(t3.covering_relations()) == 21
    assert len(build_tits(f2, 1, 1)) == 2
    assert len(build_tits(f2, 2)) == 3


def test_splitting_posets(f2):
    assert len(build_splitting(f2, 2)) == 6
    assert len(build_splitting(f2, 1)) == 0


def test_relative_splitting_poset_respects_w(f2):
    w = span_submodule(f2, [(0, 1)], 2, witness=[(0, 1)])
    pairs = build_splitting(f2, 2, w=w).elements
    assert len(pairs) == 2
    assert all(p[1] == w for p in pairs)


def test_frames_and_coframes(f3):
    frames = build_frames(f3, 2)
    assert frames.f_vector() == (4, 6)
    assert build_frames(f3, 2, coframe=True).f_vector() == (4, 6)


def test_complex_request_validation(f2):
    with pytest.raises(PreconditionError):
        ComplexRequest(f2, "Q", 2)
    with pytest.raises(PreconditionError):
        ComplexRequest(f2, "Brel", 2, 0)
    x = build(ComplexRequest(f2, "T", 3))
    assert x.f_vector() == (14, 21)
    assert x.meta["builder"] == "T"


def test_span_map_is_surjective(f2):
    assert span_map(f2, 3).is_surjective()
    assert span_map(f2, 2, 1).is_surjective()


def test_complete_join_projections(f2):
    assert complete_join_check(frame_projection(f2, 2))
    assert complete_join_check(coordinate_projection(f2, 2, 1))


def test_dual_tits_isomorphism(f2, ut2):
    iso = dual_tits_iso(f2, 3)
    assert iso.reversing
    assert iso.is_isomorphism()
    assert dual_tits_iso(ut2, 2).is_isomorphism()


def test_frame_coframe_isomorphism(f2):
    assert frame_coframe_iso(f2, 3).is_isomorphism()


def test_fiber_isomorphisms(f2):
    report = verify_fiber_isos(f2, 3)
    assert report["passed"]
    assert report["instances"] > 0
    assert verify_fiber_isos(f2, 2, 1)["passed"]


def test_cutting_down_and_dualizing(f2):
    def sub(*vs):
        return span_submodule(f2, list(vs), 3, witness=list(vs))

    e1, e2, e3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    assert cutting_down_iso(sub(e1), sub(e3), sub(e1, e2))["passed"]
    v = span_submodule(f2, [(1, 0)], 2, witness=[(1, 0)])
    assert dualizing_splitting_iso(v)["passed"]


def _sub(ring, *vs):
    n = len(vs[0])
    return span_submodule(ring, list(vs), n, witness=list(vs))


def test_cutting_down_is_equivariant_for_the_stabilizer(f2):
    e1, e2, e3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    report = cutting_down_iso(_sub(f2, e1), _sub(f2, e3), _sub(f2, e1, e2))
    assert (report["source_elements"], report["target_elements"]) == (2, 2)
    eq = report["equivariance"]
    assert eq["passed"] and eq["generators_in_stabilizer"]
    assert eq["mode"] == "full"
    # stabilizer of <e1>, <e1, e2>, <e3> is {1, e2 -> e1 + e2}
    assert eq["checked"] == 4


def test_cutting_down_over_upper_triangular_uses_generators(ut2):
    e1, e2, e3 = (ut2.one, 0, 0), (0, ut2.one, 0), (0, 0, ut2.one)
    report = cutting_down_iso(_sub(ut2, e1), _sub(ut2, e3), _sub(ut2, e1, e2))
    assert report["passed"]
    assert report["equivariance"]["mode"] == "generators"


def test_pair_equivariance_reports_a_witness(f2):
    e1, e2, e3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    v, w, c = _sub(f2, e1), _sub(f2, e3), _sub(f2, e1, e2)
    source = build_splitting(f2, 3, v=v, w=w)
    target = build_splitting(f2, 3, v=v, ambient=c)
    pm = PosetMap.from_function(source, target, lambda pair: (pair[0], pair[1].intersection(c)))
    shear = ((1, 0, 0), (1, 1, 0), (0, 0, 1))
    report = _check_pair_equivariance(pm, [shear], lambda pair, g: pair)
    assert not report["passed"]
    assert report["witness"]["g"] == [[1, 0, 0], [1, 1, 0], [0, 0, 1]]


def test_dualizing_inside_a_proper_summand(f2):
    e1, e2 = (1, 0, 0), (0, 1, 0)
    report = dualizing_splitting_iso(_sub(f2, e1), _sub(f2, e1, e2))
    assert (report["source_elements"], report["target_elements"]) == (2, 2)
    assert report["isomorphism"] and report["rank_bookkeeping"]
    assert report["equivariance"]["passed"] and report["equivariance"]["mode"] == "full"
    assert report["passed"]


def test_dualizing_on_the_whole_module_matches_the_default(z4):
    v = _sub(z4, (1, 0))
    explicit = dualizing_splitting_iso(v, _sub(z4, (1, 0), (0, 1)))
    assert explicit["passed"]
    assert explicit["source_elements"] == dualizing_splitting_iso(v)["source_elements"]


def test_dualizing_needs_v_inside_c(f2):
    with pytest.raises(PreconditionError):
        dualizing_splitting_iso(_sub(f2, (0, 0, 1)), _sub(f2, (1, 0, 0), (0, 1, 0)))
