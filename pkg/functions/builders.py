#!/usr/bin/env python3
# ==============================================================================
# [FILE] functions/builders.py
# [PROJECT] StabVerify
# [ROLE] Complexes and posets of partial bases, summands, splittings, frames,
#        the maps between them, and the duality / fiber isomorphisms
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================
"""
Builders are pure functions of (ring, parameters). Vertices carry canonical
payloads (coordinate tuples or Submodule objects), so a complex built twice
compares equal and caches by content.

Builder identifiers used by the CLI:
  B, Brel, BX, T, Trel, SE1, SE1rel, F, coF
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from functions.complexes import (
    Poset,
    PosetMap,
    SimplicialComplex,
    SimplicialMap,
    order_complex,
    simplex_poset,
)
from functions.errors import GuardExceeded, PreconditionError, SimplicialError
from functions.groups import enumerate_gl, stabilizer_subgroup, standard_generators
from functions.linalg import (
    Matrix,
    Submodule,
    Vector,
    all_vectors,
    annihilator_dual,
    complement_of,
    extends_to_basis,
    identity,
    invert,
    inverse_transpose,
    is_free_summand,
    is_partial_basis,
    left_span_elements,
    mat_mul,
    span_submodule,
    standard_basis,
    standard_vector,
    summand_witness,
    vec_add,
    vec_mat,
    vec_scale,
)
from functions.rings import STABLE_RANK_GUARD, RingSpec, check_stable_rank_one, opposite

logger = logging.getLogger(__name__)

COMPLEX_GUARD = 250_000
BUILDER_KINDS = ("B", "Brel", "BX", "T", "Trel", "SE1", "SE1rel", "F", "coF")
EQUIVARIANCE_FULL_SCAN = 4096


# ----------------------------
# Requests
# ----------------------------

@dataclass(frozen=True)
class ComplexRequest:
    ring: RingSpec
    kind: str
    n: int
    m: int = 0
    gamma: Tuple[Vector, ...] = ()
    v: Optional[Submodule] = None
    w: Optional[Submodule] = None
    guard: int = COMPLEX_GUARD

    def __post_init__(self):
        if self.kind not in BUILDER_KINDS:
            raise PreconditionError(f"unknown builder {self.kind!r}; expected one of {', '.join(BUILDER_KINDS)}")
        if self.n < 0 or self.m < 0:
            raise PreconditionError("n and m must be non-negative")
        if self.kind in ("Brel", "BX", "Trel") and self.m < 1:
            raise PreconditionError(f"{self.kind} needs m >= 1")
        if self.kind in ("T", "F", "coF") and self.n < 1:
            raise PreconditionError(f"{self.kind} needs n >= 1")

    @property
    def label(self) -> str:
        extra = f",m={self.m}" if self.m else ""
        return f"{self.kind}(n={self.n}{extra})"

    def params(self) -> dict:
        out = {"builder": self.kind, "ring": self.ring.name, "n": self.n, "m": self.m}
        if self.gamma:
            out["gamma"] = [list(g) for g in self.gamma]
        if self.v is not None:
            out["V"] = self.v.text()
        if self.w is not None:
            out["W"] = self.w.text()
        return out

    def estimate(self) -> int:
        ambient = self.n + (self.m if self.kind in ("Brel", "BX", "Trel") else 0)
        return estimate_partial_bases(self.ring, ambient, self.m if ambient != self.n else 0)


def estimate_partial_bases(ring: RingSpec, ambient: int, fixed: int) -> int:
    """Upper bound on the number of partial bases extending `fixed` standard vectors."""
    q, total = ring.size, 0
    ordered = 1
    for k in range(1, ambient - fixed + 1):
        ordered *= q**ambient - q ** (fixed + k - 1)
        total += ordered // math.factorial(k)
    return total


def _check_guard(what: str, estimate: int, guard: int) -> None:
    if estimate > guard:
        logger.warning("%s: estimate %d exceeds guard %d", what, estimate, guard)
        raise GuardExceeded(what, estimate, guard)


def _finish(x: SimplicialComplex) -> SimplicialComplex:
    if not x.verify_closed():
        raise SimplicialError(f"{x.name}: builder output is not downward closed")
    logger.debug("built %s f=%s", x.name, x.f_vector())
    return x


# ----------------------------
# Partial bases: two independent constructions
# ----------------------------

def _fixed_block(ring: RingSpec, ambient: int, m: int, gamma: Sequence[Sequence[int]] = ()) -> List[Vector]:
    fixed = [standard_vector(ring, ambient, i) for i in range(m)] + [tuple(g) for g in gamma]
    if fixed and not is_partial_basis(ring, fixed, ambient):
        raise PreconditionError("e_1..e_m together with gamma is not a partial basis")
    return fixed


def enumerate_bases(ring: RingSpec, ambient: int, fixed: Sequence[Vector] = (),
                    guard: int = COMPLEX_GUARD) -> List[Tuple[Vector, ...]]:
    """All sets B with fixed + B a basis of R^ambient, found by span growth.

    A subset of a basis spans |R|^k elements, and `ambient` vectors spanning R^ambient
    form a basis, so no partial-basis predicate is consulted here.
    """
    q = ring.size
    span0 = left_span_elements(ring, fixed, ambient)
    if len(span0) != q ** len(fixed):
        raise PreconditionError("fixed vectors do not span a free module of full size")
    need = ambient - len(fixed)
    cands = [v for v in all_vectors(ring, ambient) if v not in span0]
    multiples = {v: [vec_scale(ring, r, v) for r in range(q)] for v in cands}
    found: List[Tuple[Vector, ...]] = []
    visited = [0]

    def grow(chosen: List[Vector], span: FrozenSet[Vector], start: int) -> None:
        if len(chosen) == need:
            found.append(tuple(chosen))
            return
        target = len(span) * q
        for idx in range(start, len(cands)):
            v = cands[idx]
            if v in span:
                continue
            visited[0] += 1
            if visited[0] > guard:
                raise GuardExceeded(f"partial bases of R^{ambient} over {ring.name}", visited[0], guard)
            grown = frozenset(vec_add(ring, s, mv) for s in span for mv in multiples[v])
            if len(grown) == target:
                grow(chosen + [v], grown, idx + 1)

    if need == 0:
        return [()]
    grow([], span0, 0)
    return found


def unimodular_simplices(ring: RingSpec, ambient: int, fixed: Sequence[Vector] = (),
                         guard: int = COMPLEX_GUARD) -> List[Tuple[Vector, ...]]:
    """All sets S with fixed + S a basis of a free summand (right-invertible rows)."""
    fixed = list(fixed)
    verts = [v for v in all_vectors(ring, ambient)
             if v not in fixed and any(v) and is_partial_basis(ring, fixed + [v], ambient)]
    out: List[Tuple[Vector, ...]] = []

    def extend(chosen: List[Vector], start: int) -> None:
        for idx in range(start, len(verts)):
            trial = chosen + [verts[idx]]
            if is_partial_basis(ring, fixed + trial, ambient):
                out.append(tuple(trial))
                if len(out) > guard:
                    raise GuardExceeded(f"unimodular simplices of R^{ambient} over {ring.name}", len(out), guard)
                extend(trial, idx + 1)

    extend([], 0)
    return out


def build_basis_complex(ring: RingSpec, n: int, m: int = 0, guard: int = COMPLEX_GUARD,
                        compare: bool = True) -> SimplicialComplex:
    """B_n(R) for m = 0, otherwise B_n^m(R) = Link of {e_1..e_m} in B(R^{m+n}).

    Built from the unimodular-summand predicate; with `compare` the span-growth
    basis enumeration runs as well and both must agree when R passes the
    stable-rank-1 eligibility gate.
    """
    if n < 0 or m < 0:
        raise PreconditionError("n and m must be non-negative")
    ambient = n + m
    name = f"B_{n}^{m}({ring.name})" if m else f"B_{n}({ring.name})"
    _check_guard(f"simplices of {name}", estimate_partial_bases(ring, ambient, m), guard)
    fixed = _fixed_block(ring, ambient, m)
    u_simplices = unimodular_simplices(ring, ambient, fixed, guard)
    x = SimplicialComplex.from_simplices(u_simplices, name=name)
    meta = {"builder": "Brel" if m else "B", "ring": ring.name, "n": n, "m": m}
    if compare:
        eligible = check_stable_rank_one(ring) if ring.size <= STABLE_RANK_GUARD else None
        bases = enumerate_bases(ring, ambient, fixed, guard)
        b_faces = {frozenset(sub) for basis in bases for k in range(1, len(basis) + 1)
                   for sub in itertools.combinations(basis, k)}
        same = b_faces == x.payload_simplices()
        meta.update({"eligible": eligible, "b_equals_u": same, "bases": len(bases)})
        if not same:
            logger.error("%s: partial-basis and unimodular constructions differ (%d vs %d simplices)",
                         name, len(b_faces), len(x))
            if eligible:
                raise SimplicialError(f"{name}: B != U on a ring passing the eligibility gate")
    x.meta.update(meta)
    logger.info("%s: f-vector %s", name, x.f_vector())
    return _finish(x)


def build_link_complex(ring: RingSpec, n: int, m: int, gamma: Sequence[Sequence[int]] = (),
                       guard: int = COMPLEX_GUARD) -> SimplicialComplex:
    """Link of gamma in B_n^m(R), gamma a simplex of B_n^m(R) or empty."""
    ambient = n + m
    fixed = _fixed_block(ring, ambient, m, gamma)
    simplices = unimodular_simplices(ring, ambient, fixed, guard)
    return _finish(SimplicialComplex.from_simplices(simplices, name=f"Lk_B_{n}^{m}({ring.name})"))


# ----------------------------
# Externally augmented partial bases
# ----------------------------

def build_BX(ring: RingSpec, n: int, m: int, gamma: Sequence[Sequence[int]] = (),
             guard: int = COMPLEX_GUARD) -> SimplicialComplex:
    """Standard simplices (the link of gamma in B_n^m) plus externally additive ones
    {v2 + r e, v2, ...} for e in {e_1..e_m} + gamma and r != 0."""
    if m < 1:
        raise PreconditionError("BX needs m >= 1")
    ambient = n + m
    gamma = [tuple(g) for g in gamma]
    if any(len(g) != ambient for g in gamma):
        raise PreconditionError(f"gamma vectors must lie in R^{ambient}")
    fixed = _fixed_block(ring, ambient, m, gamma)
    if len(set(gamma)) != len(gamma) or set(gamma) & set(fixed[:m]):
        raise PreconditionError("gamma is not a simplex of B_n^m")
    name = f"BX_{n}^{m}({ring.name})" + (f"[gamma={len(gamma)}]" if gamma else "")
    standard = unimodular_simplices(ring, ambient, fixed, guard)

    generated: Dict[FrozenSet[Vector], int] = {}
    for tau in standard:
        for v2 in tau:
            for e in fixed:
                for r in ring.nonzero:
                    v1 = vec_add(ring, v2, vec_scale(ring, r, e))
                    sigma = frozenset(tau) | {v1}
                    generated[sigma] = generated.get(sigma, 0) + 1
        _check_guard(f"simplices of {name}", len(standard) + len(generated), guard)
    merged = sum(c - 1 for c in generated.values())
    if merged:
        logger.info("%s: %d coincident externally additive simplices merged", name, merged)
    x = SimplicialComplex.from_simplices(list(map(frozenset, standard)) + list(generated), name=name)
    standard_set = {frozenset(t) for t in standard}
    x.meta.update({"builder": "BX", "ring": ring.name, "n": n, "m": m, "gamma": [list(g) for g in gamma],
                   "standard_simplices": len(standard_set),
                   "externally_additive": sum(1 for s in x.payload_simplices() if s not in standard_set),
                   "merged_coincidences": merged})
    if len(x) > guard:
        raise GuardExceeded(f"simplices of {name}", len(x), guard)
    logger.info("%s: f-vector %s", name, x.f_vector())
    return _finish(x)


def embed_basis_complex(ring: RingSpec, n: int, m: int, guard: int = COMPLEX_GUARD) -> SimplicialComplex:
    """B_n(R) inside BX_n^m(R) through v -> (0, ..., 0, v)."""
    base = build_basis_complex(ring, n, 0, guard, compare=False)
    pad = (0,) * m
    simplices = [frozenset(pad + v for v in s) for s in base.payload_simplices()]
    return _finish(SimplicialComplex.from_simplices(simplices, name=f"B_{n}({ring.name})->R^{n + m}"))


# ----------------------------
# Free summands and Tits posets
# ----------------------------

def free_summands(ring: RingSpec, ambient: int, fixed: Sequence[Vector] = (),
                  max_rank: Optional[int] = None, guard: int = COMPLEX_GUARD) -> Dict[int, List[Submodule]]:
    """Free summands V with fixed + basis(V) a partial basis, grouped by rank.

    Rank r+1 summands are spans of a rank-r summand's witness plus one vector.
    """
    fixed = list(fixed)
    top = ambient - len(fixed) if max_rank is None else max_rank
    vectors = [v for v in all_vectors(ring, ambient) if any(v)]
    levels: Dict[int, List[Submodule]] = {0: [span_submodule(ring, [], ambient, witness=[])]}
    total = 0
    for r in range(top):
        seen: Dict[FrozenSet[Vector], Submodule] = {}
        for base in levels[r]:
            covered: Set[Vector] = set(base.elements)
            for v in vectors:
                if v in covered:
                    continue
                basis = list(base.witness) + [v]
                if not is_partial_basis(ring, fixed + basis, ambient):
                    continue
                sub = span_submodule(ring, basis, ambient, witness=basis)
                covered |= sub.elements
                if sub.elements not in seen:
                    seen[sub.elements] = sub
                    total += 1
                    if total > guard:
                        raise GuardExceeded(f"free summands of R^{ambient} over {ring.name}", total, guard)
        levels[r + 1] = sorted(seen.values(), key=lambda s: s.sort_key)
        for sub in levels[r + 1]:
            if is_free_summand(sub) != r + 1:
                raise SimplicialError(f"{sub!r} failed the free-summand check")
    return levels


def relative_tits_member(ring: RingSpec, sub: Submodule, m: int) -> bool:
    """V lies in a complement of <e_1..e_m> iff e_1..e_m plus a basis of V is a partial basis."""
    if is_free_summand(sub) is None:
        return False
    fixed = [standard_vector(ring, sub.n, i) for i in range(m)]
    return is_partial_basis(ring, fixed + list(sub.witness), sub.n)


def build_tits(ring: RingSpec, n: int, m: int = 0, guard: int = COMPLEX_GUARD) -> Poset:
    """T_n(R) (nonzero proper free summands of R^n) or, for m > 0, T_n^m(R) inside R^{m+n}."""
    if n < 1 and m == 0:
        raise PreconditionError("T_n needs n >= 1")
    ambient = n + m
    fixed = [standard_vector(ring, ambient, i) for i in range(m)]
    top = n - 1 if m == 0 else n
    levels = free_summands(ring, ambient, fixed, max_rank=top, guard=guard)
    elements = [s for r in range(1, top + 1) for s in levels.get(r, [])]
    name = f"T_{n}^{m}({ring.name})" if m else f"T_{n}({ring.name})"
    poset = Poset.from_relation(elements, lambda a, b: a < b, name=name)
    logger.info("%s: %d elements, %d covering relations", name, len(poset), len(poset.covering_relations()))
    return poset


# ----------------------------
# Splitting posets
# ----------------------------

def _full_module(ring: RingSpec, n: int) -> Submodule:
    basis = standard_basis(ring, n)
    return span_submodule(ring, basis, n, witness=basis)


def build_splitting(ring: RingSpec, n: int, v: Optional[Submodule] = None, w: Optional[Submodule] = None,
                    ambient: Optional[Submodule] = None, guard: int = COMPLEX_GUARD) -> Poset:
    """Pairs (P, Q) of nonzero free summands with P + Q = ambient, P and Q meeting in 0;
    (P, Q) <= (P', Q') iff P <= P' and Q' <= Q. Constraints: P <= V, W <= Q."""
    whole = ambient if ambient is not None else _full_module(ring, n)
    for label, sub in (("V", v), ("W", w), ("ambient", whole)):
        if sub is not None and is_free_summand(sub) is None:
            raise PreconditionError(f"{label} = {sub!r} is not a free summand")
    levels = free_summands(ring, n, guard=guard)
    cands = [s for r in range(1, n) for s in levels.get(r, []) if s.elements < whole.elements]
    target = whole.size
    pairs = []
    for p in cands:
        if v is not None and not p <= v:
            continue
        for q in cands:
            if w is not None and not w <= q:
                continue
            if p.size * q.size == target and len(p.elements & q.elements) == 1:
                pairs.append((p, q))
    name = f"SE1_{n}({ring.name})" if v is None and w is None and ambient is None else f"SE1rel_{n}({ring.name})"
    poset = Poset.from_relation(pairs, lambda a, b: a != b and a[0] <= b[0] and b[1] <= a[1], name=name)
    logger.info("%s: %d splittings", name, len(poset))
    return poset


# ----------------------------
# Frames and coframes
# ----------------------------

def build_frames(ring: RingSpec, n: int, coframe: bool = False, guard: int = COMPLEX_GUARD) -> SimplicialComplex:
    """Simplices are subsets of frames {<v_1>, ..., <v_n>} (or co-frames {<v_j : j != i>})."""
    if n < 1:
        raise PreconditionError("frames need n >= 1")
    cache: Dict[Tuple[Vector, ...], Submodule] = {}

    def span_of(vs: Tuple[Vector, ...]) -> Submodule:
        if vs not in cache:
            cache[vs] = span_submodule(ring, list(vs), n, witness=list(vs))
        return cache[vs]

    facets = []
    for basis in enumerate_bases(ring, n, guard=guard):
        if coframe:
            facets.append({span_of(tuple(b for j, b in enumerate(basis) if j != i)) for i in range(n)})
        else:
            facets.append({span_of((b,)) for b in basis})
    name = f"{'coF' if coframe else 'F'}_{n}({ring.name})"
    return _finish(SimplicialComplex.from_simplices(facets, name=name, meta={"builder": "coF" if coframe else "F"}))


# ----------------------------
# Maps
# ----------------------------

def span_map(ring: RingSpec, n: int, m: int = 0, guard: int = COMPLEX_GUARD) -> PosetMap:
    """Partial bases to their spans: simplices of B_n up to dimension n-2 onto T_n, or B_n^m onto T_n^m."""
    x = build_basis_complex(ring, n, m, guard, compare=False)
    source = simplex_poset(x, max_dim=n - 2 if m == 0 else None)
    target = build_tits(ring, n, m, guard)
    ambient = n + m
    pm = PosetMap.from_function(source, target, lambda s: span_submodule(ring, list(s), ambient),
                                name=f"Span_{n}^{m}({ring.name})")
    logger.info("%s: surjective=%s", pm.name, pm.is_surjective())
    return pm


def frame_projection(ring: RingSpec, n: int, guard: int = COMPLEX_GUARD) -> SimplicialMap:
    """B_n(R) -> F_n(R), v -> <v>."""
    source = build_basis_complex(ring, n, 0, guard, compare=False)
    target = build_frames(ring, n, guard=guard)
    return SimplicialMap.from_function(source, target, lambda v: span_submodule(ring, [v], n),
                                       name=f"frame_projection_{n}({ring.name})")


def coordinate_projection(ring: RingSpec, n: int, m: int, guard: int = COMPLEX_GUARD) -> SimplicialMap:
    """B_n^m(R) -> B_n(R), dropping the first m coordinates."""
    source = build_basis_complex(ring, n, m, guard, compare=False)
    target = build_basis_complex(ring, n, 0, guard, compare=False)
    return SimplicialMap.from_function(source, target, lambda v: tuple(v[m:]),
                                       name=f"coordinate_projection_{n}^{m}({ring.name})")


def dual_tits_iso(ring: RingSpec, n: int, guard: int = COMPLEX_GUARD) -> PosetMap:
    """V -> V°, an order-reversing map T_n(R) -> T_n(R^op)."""
    source = build_tits(ring, n, guard=guard)
    target = build_tits(opposite(ring), n, guard=guard)
    return PosetMap.from_function(source, target, annihilator_dual, reversing=True,
                                  name=f"dual_T_{n}({ring.name})")


def check_dual_equivariance(iso: PosetMap, ring: RingSpec, matrices: Iterable[Sequence[Sequence[int]]]) -> dict:
    """(V.phi)° = (V°).(phi^-1)* for every element V and every given phi."""
    checked = 0
    for phi in matrices:
        dual = inverse_transpose(ring, phi)
        for i, sub in enumerate(iso.source.elements):
            left = annihilator_dual(sub.transform(phi))
            right = iso.image(i).transform(dual.rows)
            checked += 1
            if left != right:
                return {"passed": False, "checked": checked,
                        "witness": {"V": sub.text(), "phi": [list(r) for r in phi]}}
    return {"passed": True, "checked": checked}


def frame_coframe_iso(ring: RingSpec, n: int, guard: int = COMPLEX_GUARD) -> SimplicialMap:
    """F(R^n) -> coF((R^op)^n), L -> L°."""
    source = build_frames(ring, n, guard=guard)
    target = build_frames(opposite(ring), n, coframe=True, guard=guard)
    return SimplicialMap.from_function(source, target, annihilator_dual,
                                       name=f"frame_coframe_{n}({ring.name})")


def _splitting_inverse_pair(forward: PosetMap, backward: PosetMap) -> bool:
    return all(backward.mapping[forward.mapping[i]] == i for i in range(len(forward.source))) and \
        all(forward.mapping[backward.mapping[j]] == j for j in range(len(backward.source)))


def _block_generators(ring: RingSpec, sizes: Tuple[int, int, int]) -> List[Matrix]:
    """Adapted coordinates with blocks (A, B, D): matrices that preserve A, A + B and D.
    GL of each block, plus the shears sending a B basis vector to itself plus r times an A one."""
    a, b, d = sizes
    n = a + b + d
    ident = [list(r) for r in identity(ring, n)]
    gens: List[Matrix] = []
    for start, size in ((0, a), (a, b), (a + b, d)):
        if size == 0:
            continue
        for block in standard_generators(ring, size):
            m = [row[:] for row in ident]
            for i in range(size):
                for j in range(size):
                    m[start + i][start + j] = block[i][j]
            gens.append(tuple(tuple(row) for row in m))
    for row in range(a, a + b):
        for col in range(a):
            for r in ring.nonzero:
                m = [line[:] for line in ident]
                m[row][col] = r
                gens.append(tuple(tuple(line) for line in m))
    return gens


def _equivariance_matrices(ring: RingSpec, n: int, basis: Sequence[Vector], sizes: Tuple[int, int, int],
                           preserve: Sequence[Submodule]) -> Tuple[str, List[Matrix], bool]:
    """The stabilizer of `preserve` in GL_n(R): every element on small rings, otherwise the
    block generators conjugated by the adapted basis. The flag says the generators lie in it."""
    p = tuple(tuple(v) for v in basis)
    p_inv = invert(ring, p)
    gens = [mat_mul(ring, mat_mul(ring, p_inv, m), p) for m in _block_generators(ring, sizes)]
    inside = all(s.transform(g) == s for g in gens for s in preserve)
    if ring.size ** (n * n) <= EQUIVARIANCE_FULL_SCAN:
        group = stabilizer_subgroup(enumerate_gl(ring, n), preserve=preserve)
        return "full", list(group.elements), inside and all(g in group.index for g in gens)
    return "generators", gens, inside


def _check_pair_equivariance(pm: PosetMap, matrices: Iterable[Matrix], act_target) -> dict:
    """(U, T).g lies in the source and maps to act_target(image of (U, T), g)."""
    checked = 0
    for g in matrices:
        for i, (u, t) in enumerate(pm.source.elements):
            checked += 1
            j = pm.source.index.get((u.transform(g), t.transform(g)))
            if j is None or pm.image(j) != act_target(pm.image(i), g):
                return {"passed": False, "checked": checked,
                        "witness": {"pair": [u.text(), t.text()], "g": [list(r) for r in g]}}
    return {"passed": True, "checked": checked}


def cutting_down_iso(v: Submodule, w: Submodule, c: Submodule, guard: int = COMPLEX_GUARD) -> dict:
    """(U, T) -> (U, T meet C) from S(. <= V, W <= . | R^n) to S(. <= V, . | C), with inverse
    (U', T') -> (U', T' + W); both directions checked to be order isomorphisms, equivariant
    for the automorphisms preserving V, C and W."""
    ring, n = v.ring, v.n
    whole = _full_module(ring, n)
    for label, sub in (("V", v), ("W", w), ("C", c)):
        if is_free_summand(sub) is None:
            raise PreconditionError(f"cutting down: {label} = {sub!r} is not a free summand")
    if len(v.elements & w.elements) != 1:
        raise PreconditionError("cutting down: V and W must meet in 0")
    if v.size * w.size >= whole.size:
        raise PreconditionError("cutting down: V + W must be a proper summand")
    if not v <= c or c.size * w.size != whole.size or len(c.elements & w.elements) != 1:
        raise PreconditionError("cutting down: C must be a complement of W containing V")
    source = build_splitting(ring, n, v=v, w=w, guard=guard)
    target = build_splitting(ring, n, v=v, ambient=c, guard=guard)

    def forward(pair):
        return (pair[0], pair[1].intersection(c))

    def backward(pair):
        return (pair[0], pair[1].sum(w))

    there = PosetMap.from_function(source, target, forward, name="cut_down")
    back = PosetMap.from_function(target, source, backward, name="cut_up")
    basis = summand_witness(v, c)
    if basis is None:
        raise PreconditionError("cutting down: no basis of C extends one of V")
    sizes = (is_free_summand(v), is_free_summand(c) - is_free_summand(v), is_free_summand(w))
    mode, matrices, inside = _equivariance_matrices(ring, n, basis + list(w.witness), sizes, [v, c, w])
    equivariance = _check_pair_equivariance(
        there, matrices, lambda pair, g: (pair[0].transform(g), pair[1].transform(g)))
    equivariance.update(mode=mode, generators_in_stabilizer=inside)
    isos = there.is_isomorphism() and back.is_isomorphism() and _splitting_inverse_pair(there, back)
    return {
        "source_elements": len(source),
        "target_elements": len(target),
        "forward_isomorphism": there.is_isomorphism(),
        "backward_isomorphism": back.is_isomorphism(),
        "round_trip_identity": _splitting_inverse_pair(there, back),
        "equivariance": equivariance,
        "passed": isos and equivariance["passed"] and inside,
    }


def dualizing_splitting_iso(v: Submodule, c: Optional[Submodule] = None, guard: int = COMPLEX_GUARD) -> dict:
    """(U, T) -> ((T + D)°, (U + D)°) from S(. <= V, . | C) to S(., (V + D)° <= . | D°), where D is
    a complement of C; D° is a copy of the dual of C inside (R^op)^n. With C = R^n this is
    (U, T) -> (T°, U°). Equivariant for the automorphisms preserving V, C and D."""
    ring, n = v.ring, v.n
    c = c if c is not None else _full_module(ring, n)
    for label, sub in (("V", v), ("C", c)):
        if is_free_summand(sub) is None:
            raise PreconditionError(f"dualizing: {label} = {sub!r} is not a free summand")
    if not v <= c:
        raise PreconditionError("dualizing: V must lie in C")
    d = complement_of(c)
    source = build_splitting(ring, n, v=v, ambient=c, guard=guard)
    target = build_splitting(opposite(ring), n, w=annihilator_dual(v.sum(d)), ambient=annihilator_dual(d),
                             guard=guard)
    pm = PosetMap.from_function(
        source, target, lambda pair: (annihilator_dual(pair[1].sum(d)), annihilator_dual(pair[0].sum(d))),
        name="dualize_splittings")
    ranks_ok = True
    for i, (u, t) in enumerate(source.elements):
        t_dual = pm.image(i)[0]
        if is_free_summand(t_dual) != is_free_summand(u):
            ranks_ok = False
    basis = summand_witness(v, c)
    if basis is None:
        raise PreconditionError("dualizing: no basis of C extends one of V")
    sizes = (is_free_summand(v), is_free_summand(c) - is_free_summand(v), is_free_summand(d))
    mode, matrices, inside = _equivariance_matrices(ring, n, basis + list(d.witness), sizes, [v, c, d])
    duals: Dict[Matrix, Matrix] = {}

    def act_dual(pair, g):
        if g not in duals:
            duals[g] = inverse_transpose(ring, g).rows
        return (pair[0].transform(duals[g]), pair[1].transform(duals[g]))

    equivariance = _check_pair_equivariance(pm, matrices, act_dual)
    equivariance.update(mode=mode, generators_in_stabilizer=inside)
    return {
        "source_elements": len(source),
        "target_elements": len(target),
        "isomorphism": pm.is_isomorphism(),
        "rank_bookkeeping": ranks_ok,
        "equivariance": equivariance,
        "passed": pm.is_isomorphism() and ranks_ok and equivariance["passed"] and inside,
    }


# ----------------------------
# Fiber isomorphisms
# ----------------------------

def _coordinates(ring: RingSpec, basis: Sequence[Vector]):
    inv = invert(ring, [tuple(b) for b in basis])
    return lambda x: vec_mat(ring, x, inv)


def _projected(ring: RingSpec, sub: Submodule, coords, keep: Sequence[int]) -> Submodule:
    images = [tuple(coords(u)[k] for k in keep) for u in sub.witness]
    img = span_submodule(ring, images, len(keep))
    is_free_summand(img)
    return img


def _check_iso(source: Poset, target: Poset, fn, name: str) -> Tuple[bool, Optional[str]]:
    try:
        pm = PosetMap.from_function(source, target, fn, name=name)
    except SimplicialError as e:
        return False, str(e)
    if not pm.is_isomorphism():
        return False, f"{name}: not an order isomorphism"
    return True, None


def verify_fiber_isos(ring: RingSpec, n: int, m: int = 0, guard: int = COMPLEX_GUARD) -> dict:
    """Upper sets, lower sets and open intervals of T_n(R) (or T_n^m(R)) against smaller Tits posets,
    each through coordinates in a basis adapted to the fixed summands."""
    poset = build_tits(ring, n, m, guard)
    ambient = n + m
    fixed = [standard_vector(ring, ambient, i) for i in range(m)]
    models: Dict[Tuple[int, int], Poset] = {}

    def model(k: int, mm: int) -> Poset:
        if (k, mm) not in models:
            if k < 1 and mm == 0:
                models[(k, mm)] = Poset([], [], name="empty")
            else:
                models[(k, mm)] = build_tits(ring, k, mm, guard)
        return models[(k, mm)]

    report = {"poset": poset.name, "instances": 0, "failures": []}

    def record(kind: str, ok: bool, detail: Optional[str], *subs: Submodule) -> None:
        report["instances"] += 1
        if not ok:
            report["failures"].append({"kind": kind, "at": [s.text() for s in subs], "detail": detail})

    for i, v in enumerate(poset.elements):
        r = v.free_rank
        basis = extends_to_basis(ring, fixed + list(v.witness), ambient)
        if basis is None:
            record("adapted_basis", False, "no adapted basis", v)
            continue
        coords = _coordinates(ring, basis)
        rest = [k for k in range(ambient) if not m <= k < m + r]
        ok, detail = _check_iso(poset.upper(i), model(n - r, m),
                                lambda u: _projected(ring, u, coords, rest), f"upper({v.text()})")
        record("upper", ok, detail, v)
        ok, detail = _check_iso(poset.lower(i), model(r, 0),
                                lambda u: _projected(ring, u, coords, range(m, m + r)), f"lower({v.text()})")
        record("lower", ok, detail, v)
        for j in poset.graph.successors(i):
            v2 = poset.elements[j]
            inner = summand_witness(v, v2)
            if inner is None:
                record("interval", False, "no summand witness", v, v2)
                continue
            adapted = extends_to_basis(ring, fixed + inner, ambient)
            if adapted is None:
                record("interval", False, "no adapted basis", v, v2)
                continue
            c2 = _coordinates(ring, adapted)
            r2 = v2.free_rank
            ok, detail = _check_iso(poset.interval(i, j), model(r2 - r, 0),
                                    lambda u, c2=c2: _projected(ring, u, c2, range(m + r, m + r2)),
                                    f"interval({v.text()},{v2.text()})")
            record("interval", ok, detail, v, v2)
    report["passed"] = not report["failures"]
    logger.info("fiber isomorphisms on %s: %d instances, %d failures",
                poset.name, report["instances"], len(report["failures"]))
    return report


# ----------------------------
# Dispatch
# ----------------------------

def build_poset(req: ComplexRequest) -> Poset:
    if req.kind in ("T", "Trel"):
        return build_tits(req.ring, req.n, req.m if req.kind == "Trel" else 0, req.guard)
    if req.kind in ("SE1", "SE1rel"):
        if req.kind == "SE1":
            return build_splitting(req.ring, req.n, guard=req.guard)
        return build_splitting(req.ring, req.n, v=req.v, w=req.w, guard=req.guard)
    raise PreconditionError(f"{req.kind} does not build a poset")


def build(req: ComplexRequest) -> SimplicialComplex:
    """Materialize a request as a simplicial complex (posets through their order complex)."""
    if req.kind in ("B", "Brel"):
        return build_basis_complex(req.ring, req.n, req.m if req.kind == "Brel" else 0, req.guard)
    if req.kind == "BX":
        return build_BX(req.ring, req.n, req.m, req.gamma, req.guard)
    if req.kind in ("F", "coF"):
        return build_frames(req.ring, req.n, coframe=req.kind == "coF", guard=req.guard)
    poset = build_poset(req)
    x = order_complex(poset)
    x.meta.update(req.params())
    return _finish(x)
