#!/usr/bin/env python3
# ==============================================================================
# [FILE] functions/steinberg.py
# [PROJECT] StabVerify
# [ROLE] Steinberg, relative Steinberg and Charney modules; apartment classes,
#        relative apartment symbols, generation and coinvariant checks
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================
"""
Class coordinates are always given in the integer cycle basis of the module's
CycleLattice, fixed per build. Chains are oriented bottom-to-top and then
re-sorted by vertex id, with the sign of that reordering.

Sign conventions: the absolute class of M sums over orderings of the rows,
sign(perm) times the flag <M_p1> < <M_p1, M_p2> < ...; the relative class of a
symbol sums over orderings and vertex choices, with an extra -1 for every
second vertex <v_i + r_i e_beta(i)> picked.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from functions.builders import COMPLEX_GUARD, build_splitting, build_tits, dual_tits_iso
from functions.complexes import Poset, SimplicialComplex, Simplex, order_complex
from functions.errors import GuardExceeded, NotInvertibleError, PreconditionError, SimplicialError
from functions.groups import (
    CycleLattice,
    FiniteMatrixGroup,
    GModule,
    action_on_homology,
    coinvariants,
    enumerate_gl,
    push_chain,
    relative_gl,
    stabilizer_subgroup,
)
from functions.homology import (
    HomologyResult,
    CoefficientDomain,
    SparseIntMatrix,
    chain_complex_of,
    invert_two_vanishes,
    smith_normal_form,
    sphericity,
)
from functions.linalg import (
    Matrix,
    Submodule,
    Vector,
    all_vectors,
    format_matrix,
    inverse_transpose,
    invert,
    is_free_summand,
    is_partial_basis,
    mat_mul,
    span_submodule,
    standard_vector,
    vec_add,
    vec_mat,
    vec_neg,
    vec_scale,
)
from functions.rings import RingSpec, opposite

logger = logging.getLogger(__name__)

HALF = CoefficientDomain("half")
EQUIVARIANCE_SAMPLES = 8


# ----------------------------
# Symbols
# ----------------------------

@dataclass(frozen=True)
class AbsoluteSymbol:
    matrix: Matrix

    def text(self) -> str:
        return f"[{format_matrix(self.matrix)}]"


@dataclass(frozen=True)
class RelativeSymbol:
    """[v_1, v_1 + r_1 e_b(1)] * ... * [v_j, v_j + r_j e_b(j)] inside R^(m+n).

    targets[i] < m points at e_(targets[i]+1); targets[i] = m + k points at v_(k+1).
    """
    m: int
    vectors: Tuple[Vector, ...]
    coefficients: Tuple[int, ...]
    targets: Tuple[int, ...]

    def __post_init__(self):
        if not len(self.vectors) == len(self.coefficients) == len(self.targets):
            raise PreconditionError("symbol data must have one entry per vector")
        for i, t in enumerate(self.targets):
            if not 0 <= t < self.m + i:
                raise PreconditionError(f"target {t} of factor {i + 1} is outside e_1..e_m, v_1..v_{i}")
        if any(c == 0 for c in self.coefficients):
            raise PreconditionError("symbol coefficients must be nonzero")

    @property
    def length(self) -> int:
        return len(self.vectors)

    def target_vector(self, ring: RingSpec, i: int) -> Vector:
        t = self.targets[i]
        ambient = len(self.vectors[0])
        return standard_vector(ring, ambient, t) if t < self.m else self.vectors[t - self.m]

    def points(self, ring: RingSpec) -> List[Tuple[Vector, Vector]]:
        out = []
        for i, (v, r) in enumerate(zip(self.vectors, self.coefficients)):
            out.append((v, vec_add(ring, v, vec_scale(ring, r, self.target_vector(ring, i)))))
        return out

    def act(self, ring: RingSpec, phi: Matrix) -> "RelativeSymbol":
        """Right action of phi in GL_n^m: vectors move, coefficients and targets stay."""
        return RelativeSymbol(self.m, tuple(vec_mat(ring, v, phi) for v in self.vectors),
                              self.coefficients, self.targets)

    def text(self, ring: RingSpec) -> str:
        return " * ".join(f"[{','.join(map(str, a))} | {','.join(map(str, b))}]" for a, b in self.points(ring)) or "[]"


def enumerate_symbols(ring: RingSpec, n: int, m: int, j: Optional[int] = None,
                      guard: int = COMPLEX_GUARD) -> List[RelativeSymbol]:
    """Every symbol of length j (default n), in lexicographic order of
    (ordered simplex, coefficients, targets)."""
    if m < 1 or n < 1:
        raise PreconditionError("relative symbols need m, n >= 1")
    j = n if j is None else j
    if not 0 <= j <= n:
        raise PreconditionError(f"symbol length {j} outside 0..{n}")
    if j == 0:
        return [RelativeSymbol(m, (), (), ())]
    ambient = m + n
    fixed = [standard_vector(ring, ambient, i) for i in range(m)]
    vectors = [v for v in all_vectors(ring, ambient) if any(v)]
    choices = [list(itertools.product(ring.nonzero, range(m + i))) for i in range(j)]
    per_simplex = 1
    for c in choices:
        per_simplex *= len(c)
    out: List[RelativeSymbol] = []

    def grow(chosen: List[Vector]) -> None:
        if len(chosen) == j:
            for combo in itertools.product(*choices):
                out.append(RelativeSymbol(m, tuple(chosen), tuple(r for r, _ in combo), tuple(t for _, t in combo)))
            if len(out) > guard:
                raise GuardExceeded(f"symbols S^{m}_{n}({j}) over {ring.name}", len(out), guard)
            return
        for v in vectors:
            if v not in chosen and is_partial_basis(ring, fixed + chosen + [v], ambient):
                grow(chosen + [v])

    grow([])
    logger.debug("S^%d_%d(%d) over %s: %d symbols (%d per ordered simplex)", m, n, j, ring.name, len(out), per_simplex)
    return out


# ----------------------------
# Modules
# ----------------------------

@dataclass
class SteinbergLikeModule:
    kind: str  # "St" | "Strel" | "Ch" | "Chrel"
    ring: RingSpec
    n: int
    m: int
    degree: int
    poset: Poset
    complex: SimplicialComplex
    group: FiniteMatrixGroup
    module: GModule
    lattice: CycleLattice
    sphericity: dict
    w: Optional[Submodule] = None
    notes: List[str] = field(default_factory=list)

    @property
    def label(self) -> str:
        if self.kind == "St":
            return f"St_{self.n}({self.ring.name})"
        if self.kind == "Strel":
            return f"St_{self.n}^{self.m}({self.ring.name})"
        if self.kind == "Ch":
            return f"Ch_{self.n}({self.ring.name})"
        return f"Ch({self.ring.name}^{self.n}, {self.w.text()})"

    @property
    def rank(self) -> int:
        return self.module.rank

    def to_json(self) -> dict:
        return {
            "module": self.label,
            "degree": self.degree,
            "complex": {"name": self.complex.name, "f_vector": list(self.complex.f_vector()), "dim": self.complex.dim},
            "group": self.group.to_json(),
            "underlying": self.module.underlying().to_json(),
            "sphericity": self.sphericity,
            "notes": list(self.notes),
        }


def _assemble(kind: str, ring: RingSpec, n: int, m: int, degree: int, poset: Poset,
              group: FiniteMatrixGroup, w: Optional[Submodule] = None) -> SteinbergLikeModule:
    x = order_complex(poset)
    sph = sphericity(x, degree)
    notes = []
    if not sph["passed"]:
        notes.append(f"sphericity proxy failed at degree {sph['failing_degree']}")
        logger.warning("%s: %s is not %d-spherical at the homology level", kind, x.name, degree)
    module, lattice = action_on_homology(group, x, degree)
    st = SteinbergLikeModule(kind, ring, n, m, degree, poset, x, group, module, lattice, sph, w, notes)
    logger.info("%s: rank %d, %d generators acting", st.label, st.rank, len(module.generators))
    return st


def steinberg_module(ring: RingSpec, n: int, m: int = 0, guard: int = COMPLEX_GUARD,
                     group: Optional[FiniteMatrixGroup] = None) -> SteinbergLikeModule:
    """St_n(R) = reduced H_(n-2) of the Tits order complex, or St_n^m(R) in degree n-1."""
    if m == 0 and n < 2:
        raise PreconditionError("St_n needs n >= 2")
    if m > 0 and n < 1:
        raise PreconditionError("St_n^m needs n >= 1")
    poset = build_tits(ring, n, m, guard=guard)
    if group is None:
        group = enumerate_gl(ring, n) if m == 0 else relative_gl(ring, n, m)
    degree = n - 2 if m == 0 else n - 1
    return _assemble("St" if m == 0 else "Strel", ring, n, m, degree, poset, group)


def charney_module(ring: RingSpec, n: int, w: Optional[Submodule] = None,
                   guard: int = COMPLEX_GUARD) -> SteinbergLikeModule:
    """Ch_n(R) in degree n-2, or Ch(R^n, W) in degree n - rank W - 1 acted on by the
    matrices fixing W pointwise."""
    if w is None:
        if n < 2:
            raise PreconditionError("Ch_n needs n >= 2")
        poset = build_splitting(ring, n, guard=guard)
        return _assemble("Ch", ring, n, 0, n - 2, poset, enumerate_gl(ring, n))
    k = is_free_summand(w)
    if k is None or k == 0 or k >= n:
        raise PreconditionError(f"W = {w!r} must be a nonzero proper free summand")
    poset = build_splitting(ring, n, w=w, guard=guard)
    group = stabilizer_subgroup(enumerate_gl(ring, n), fix=w.basis(), name=f"GL({ring.name}^{n}, fix {w.text()})")
    return _assemble("Chrel", ring, n, 0, n - k - 1, poset, group, w)


# ----------------------------
# Classes
# ----------------------------

def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    for a, b in itertools.combinations(range(len(perm)), 2):
        if perm[a] > perm[b]:
            sign = -sign
    return sign


def _add_flag(chain: Dict[Simplex, int], ids: Sequence[int], coeff: int) -> None:
    simplex = tuple(sorted(ids))
    c = coeff * _perm_sign(ids)
    v = chain.get(simplex, 0) + c
    if v:
        chain[simplex] = v
    else:
        chain.pop(simplex, None)


def _element_id(poset: Poset, sub: Submodule) -> int:
    try:
        return poset.index[sub]
    except KeyError:
        raise SimplicialError(f"{sub!r} is not an element of {poset.name}") from None


def apartment_chain(ring: RingSpec, poset: Poset, matrix: Sequence[Sequence[int]]) -> Dict[Simplex, int]:
    rows = [tuple(r) for r in matrix]
    n = len(rows)
    if n == 0 or len({len(r) for r in rows}) != 1:
        raise PreconditionError("apartment matrix must be square and nonempty")
    spans: Dict[frozenset, int] = {}

    def span_id(ids: Sequence[int]) -> int:
        key = frozenset(ids)
        if key not in spans:
            spans[key] = _element_id(poset, span_submodule(ring, [rows[i] for i in ids], n))
        return spans[key]

    chain: Dict[Simplex, int] = {}
    for perm in itertools.permutations(range(n)):
        flag = [span_id(perm[:k]) for k in range(1, n)]
        _add_flag(chain, flag, _perm_sign(perm))
    return chain


def apartment_class(st: SteinbergLikeModule, matrix: Sequence[Sequence[int]]) -> List[int]:
    """Coordinates of [M] (rows of M as the basis) in the cycle basis of St_n(R)."""
    if st.kind != "St":
        raise PreconditionError("apartment classes live in the absolute Steinberg module")
    try:
        invert(st.ring, matrix)
    except NotInvertibleError as e:
        raise PreconditionError(f"apartment matrix is singular: {e}") from None
    return st.lattice.coordinates_of_chain(apartment_chain(st.ring, st.poset, matrix))


def relative_apartment_chain(ring: RingSpec, poset: Poset, symbol: RelativeSymbol) -> Dict[Simplex, int]:
    points = symbol.points(ring)
    n = symbol.length
    ambient = len(symbol.vectors[0]) if n else 0
    spans: Dict[Tuple[Tuple[int, int], ...], int] = {}

    def span_id(picks: Tuple[Tuple[int, int], ...]) -> int:
        key = tuple(sorted(picks))
        if key not in spans:
            sub = span_submodule(ring, [points[i][e] for i, e in key], ambient)
            spans[key] = _element_id(poset, sub)
        return spans[key]

    chain: Dict[Simplex, int] = {}
    if n == 0:
        chain[()] = 1
        return chain
    for perm in itertools.permutations(range(n)):
        base = _perm_sign(perm)
        for eps in itertools.product((0, 1), repeat=n):
            coeff = base * (-1) ** sum(eps)
            flag = [span_id(tuple((perm[i], eps[perm[i]]) for i in range(k))) for k in range(1, n + 1)]
            _add_flag(chain, flag, coeff)
    return chain


def relative_apartment_class(st: SteinbergLikeModule, symbol: RelativeSymbol) -> List[int]:
    if st.kind != "Strel":
        raise PreconditionError("relative apartment classes live in St_n^m")
    if symbol.length != st.n or symbol.m != st.m:
        raise PreconditionError(f"symbol shape ({symbol.m}, {symbol.length}) does not match ({st.m}, {st.n})")
    return st.lattice.coordinates_of_chain(relative_apartment_chain(st.ring, st.poset, symbol))


# ----------------------------
# Span reports
# ----------------------------

def span_report(rows: Sequence[Sequence[int]], rank: int) -> dict:
    """Does the integer span of `rows` fill Z^rank? The cokernel is reported either way."""
    distinct = sorted({tuple(r) for r in rows if any(r)})
    if rank == 0:
        return {"classes": len(rows), "distinct": len(distinct), "lattice_rank": 0,
                "span_rank": 0, "divisors": [], "cokernel": HomologyResult(0).to_json(), "passed": True}
    if not distinct:
        cok = HomologyResult(rank)
        return {"classes": len(rows), "distinct": 0, "lattice_rank": rank, "span_rank": 0,
                "divisors": [], "cokernel": cok.to_json(), "passed": False}
    snf = smith_normal_form(SparseIntMatrix.from_dense([list(r) for r in distinct]))
    cok = HomologyResult.from_divisors(rank - snf.rank, snf.divisors)
    return {"classes": len(rows), "distinct": len(distinct), "lattice_rank": rank, "span_rank": snf.rank,
            "divisors": [int(d) for d in snf.divisors], "cokernel": cok.to_json(), "passed": cok.is_zero()}


def _times(coords: Sequence[int], mat) -> List[int]:
    k = len(coords)
    return [int(sum(coords[i] * mat[i][j] for i in range(k))) for j in range(k)]


def _sample(group: FiniteMatrixGroup, count: int) -> List[Matrix]:
    picks = list(group.generators)
    step = max(1, group.order // max(1, count))
    picks.extend(group.elements[::step])
    seen, out = set(), []
    for g in picks:
        if g not in seen:
            seen.add(g)
            out.append(g)
    return out[:count + len(group.generators)]


def verify_apartments_generate(ring: RingSpec, n: int, st: Optional[SteinbergLikeModule] = None,
                               samples: int = EQUIVARIANCE_SAMPLES) -> dict:
    """The classes [M], M in GL_n(R), span St_n(R); [M.phi] = [M].phi on sampled pairs."""
    st = st or steinberg_module(ring, n)
    classes = {m: apartment_class(st, m) for m in st.group.elements}
    report = span_report(list(classes.values()), st.rank)
    report["module"] = st.label
    checked, failures = 0, []
    for phi in _sample(st.group, samples):
        rho = st.module.matrix(phi)
        for mat in st.group.elements[:samples]:
            checked += 1
            if classes[mat_mul(ring, mat, phi)] != _times(classes[mat], rho):
                failures.append({"M": format_matrix(mat), "phi": format_matrix(phi)})
    report["equivariance"] = {"checked": checked, "failures": failures[:3], "passed": not failures}
    report["passed"] = report["passed"] and not failures
    return report


def verify_relative_generate(ring: RingSpec, n: int, m: int, st: Optional[SteinbergLikeModule] = None,
                             guard: int = COMPLEX_GUARD, samples: int = EQUIVARIANCE_SAMPLES) -> dict:
    """The relative classes [Theta] span St_n^m(R), and [Theta.phi] = [Theta].phi."""
    st = st or steinberg_module(ring, n, m, guard=guard)
    symbols = enumerate_symbols(ring, n, m, guard=guard)
    rows = [relative_apartment_class(st, s) for s in symbols]
    report = span_report(rows, st.rank)
    report["module"] = st.label
    report["symbols"] = len(symbols)
    checked, failures = 0, []
    for phi in _sample(st.group, samples):
        rho = st.module.matrix(phi)
        for symbol, coords in list(zip(symbols, rows))[:samples]:
            checked += 1
            if relative_apartment_class(st, symbol.act(ring, phi)) != _times(coords, rho):
                failures.append({"symbol": symbol.text(ring), "phi": format_matrix(phi)})
    report["equivariance"] = {"checked": checked, "failures": failures[:3], "passed": not failures}
    report["passed"] = report["passed"] and not failures
    return report


# ----------------------------
# Negation witnesses
# ----------------------------

def transposition_witness(st: SteinbergLikeModule, matrix: Sequence[Sequence[int]]) -> dict:
    """phi swapping the first two rows of M negates [M]."""
    ring = st.ring
    rows = [tuple(r) for r in matrix]
    swapped = [rows[1], rows[0]] + rows[2:]
    phi = mat_mul(ring, invert(ring, rows), tuple(swapped))
    before = apartment_class(st, rows)
    after = _times(before, st.module.matrix(phi))
    return {"M": format_matrix(rows), "phi": format_matrix(phi),
            "passed": after == [-c for c in before] and any(before)}


def negation_witness(st: SteinbergLikeModule, symbol: RelativeSymbol) -> dict:
    """phi fixing e_1..e_m and v_1..v_(n-1) with v_n -> -v_n - r_n e_b(n); then
    [Theta.phi] = -[Theta] and [Theta].phi = -[Theta]."""
    ring, m, n = st.ring, st.m, st.n
    ambient = m + n
    basis = [standard_vector(ring, ambient, i) for i in range(m)] + list(symbol.vectors)
    images = list(basis)
    last = symbol.vectors[-1]
    shift = vec_scale(ring, symbol.coefficients[-1], symbol.target_vector(ring, n - 1))
    images[-1] = vec_neg(ring, vec_add(ring, last, shift))
    phi = mat_mul(ring, invert(ring, basis), tuple(images))
    if phi not in st.group:
        raise SimplicialError("negation witness does not fix e_1..e_m")
    before = relative_apartment_class(st, symbol)
    moved = relative_apartment_class(st, symbol.act(ring, phi))
    acted = _times(before, st.module.matrix(phi))
    negated = [-c for c in before]
    return {"symbol": symbol.text(ring), "phi": format_matrix(phi),
            "symbol_negated": moved == negated, "class_negated": acted == negated,
            "passed": moved == negated and acted == negated and any(before)}


# ----------------------------
# Duality
# ----------------------------

def _tits_lattice(ring: RingSpec, n: int, guard: int) -> Tuple[Poset, SimplicialComplex, CycleLattice]:
    poset = build_tits(ring, n, guard=guard)
    x = order_complex(poset)
    cc = chain_complex_of(x, reduced=True)
    return poset, x, CycleLattice(cc.bases.get(n - 2, []), cc.boundary(n - 2))


def verify_dual_apartments(ring: RingSpec, n: int, guard: int = COMPLEX_GUARD,
                           matrices: Optional[Sequence[Matrix]] = None) -> dict:
    """Pushing [M] through V -> V° gives s * [inverse_transpose(M)] over R^op with one
    sign s for every M."""
    if n < 2:
        raise PreconditionError("dual apartments need n >= 2")
    iso = dual_tits_iso(ring, n, guard=guard)
    source, _, lattice = _tits_lattice(ring, n, guard)
    op = opposite(ring)
    target, _, op_lattice = _tits_lattice(op, n, guard)
    if matrices is None:
        matrices = enumerate_gl(ring, n).elements
    signs = set()
    failures = []
    for mat in matrices:
        pushed = push_chain(iso.mapping, apartment_chain(ring, source, mat))
        pushed_coords = op_lattice.coordinates_of_chain(pushed)
        dual = inverse_transpose(ring, mat).rows
        expected = op_lattice.coordinates_of_chain(apartment_chain(op, target, dual))
        if pushed_coords == expected:
            signs.add(1)
        elif pushed_coords == [-c for c in expected]:
            signs.add(-1)
        else:
            failures.append(format_matrix(mat))
    passed = not failures and len(signs) == 1
    return {"ring": ring.name, "n": n, "matrices": len(matrices), "signs": sorted(signs),
            "ranks": [lattice.rank, op_lattice.rank], "failures": failures[:3], "passed": passed}


# ----------------------------
# Coinvariants
# ----------------------------

def verify_coinvariants_vanish(st: SteinbergLikeModule, coeff: CoefficientDomain = HALF) -> dict:
    """Integral coinvariants first; the coefficient change is applied to the result."""
    integral = coinvariants(st.module)
    tensored = coeff.tensor(integral)
    return {
        "module": st.label,
        "group_order": st.group.order,
        "integral": integral.to_json(),
        "integral_text": str(integral),
        "coefficient": str(coeff),
        "tensored": tensored.to_json(),
        "vanishes_with_two_inverted": invert_two_vanishes(integral),
        "passed": tensored.is_zero(),
    }


def module_by_name(ring: RingSpec, name: str, n: int, m: int = 0, w: Optional[Sequence[Sequence[int]]] = None,
                   guard: int = COMPLEX_GUARD) -> SteinbergLikeModule:
    """St | Strel | Ch | Chrel, as named on the command line."""
    if name == "St":
        return steinberg_module(ring, n, m, guard=guard)
    if name == "Strel":
        return steinberg_module(ring, n, max(m, 1), guard=guard)
    if name == "Ch":
        return charney_module(ring, n, guard=guard)
    if name == "Chrel":
        if not w:
            w = [standard_vector(ring, n, n - 1)]
        sub = span_submodule(ring, [tuple(v) for v in w], n)
        return charney_module(ring, n, sub, guard=guard)
    raise PreconditionError(f"unknown module {name!r}; expected St, Strel, Ch or Chrel")
