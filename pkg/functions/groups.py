#!/usr/bin/env python3
# ==============================================================================
# [FILE] functions/groups.py
# [PROJECT] StabVerify
# [ROLE] Finite matrix groups GL_n(R) and subgroups, their right actions on
#        complexes and homology, coinvariants, abelianization
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================
"""
Right actions throughout: a matrix g sends a row vector x to x*g, a submodule V
to V*g, and the composite of g then h is g*h. An action matrix rho(g) has one
row per generator of the module (row i = coordinates of z_i * g), so
rho(g*h) = rho(g) @ rho(h).
"""

from __future__ import annotations

import logging
import re
from functools import cached_property
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from functions.complexes import Poset, SimplicialComplex, Simplex, order_complex
from functions.errors import GuardExceeded, PreconditionError, SimplicialError
from functions.homology import (
    HomologyResult,
    SparseIntMatrix,
    chain_complex_of,
    smith_normal_form,
)
from functions.linalg import (
    Matrix,
    Submodule,
    Vector,
    all_vectors,
    identity,
    invert,
    left_span_elements,
    mat_mul,
    parse_matrix,
    span_submodule,
    standard_vector,
    vec_add,
    vec_mat,
    vec_neg,
    vec_scale,
)
from functions.rings import RingSpec, parse_ring

logger = logging.getLogger(__name__)

GL_FULL_GUARD = 1 << 20
GROUP_ORDER_GUARD = 2_000_000
IntMatrix = List[List[int]]


# ----------------------------
# Groups
# ----------------------------

class FiniteMatrixGroup:
    """A finite group of invertible n x n matrices over a ring, as a sorted element list."""

    def __init__(self, ring: RingSpec, n: int, elements: Iterable[Matrix], name: str = "",
                 generators: Optional[Sequence[Matrix]] = None, mode: str = "full", verified: bool = True):
        self.ring = ring
        self.n = n
        self.elements: List[Matrix] = sorted(set(tuple(tuple(r) for r in g) for g in elements))
        self.index: Dict[Matrix, int] = {g: i for i, g in enumerate(self.elements)}
        self.name = name
        self.mode = mode
        self.verified = verified
        self._generators = [tuple(tuple(r) for r in g) for g in generators] if generators else None
        if self.identity not in self.index:
            raise PreconditionError(f"{name}: identity missing from the element list")

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, g: Sequence[Sequence[int]]) -> bool:
        return tuple(tuple(r) for r in g) in self.index

    def __repr__(self) -> str:
        return f"FiniteMatrixGroup({self.name!r}, order={self.order})"

    @cached_property
    def identity(self) -> Matrix:
        return identity(self.ring, self.n)

    def mul(self, a: Matrix, b: Matrix) -> Matrix:
        return mat_mul(self.ring, a, b)

    def inverse(self, a: Matrix) -> Matrix:
        return invert(self.ring, a)

    def is_closed(self) -> bool:
        gens = self.generators
        return all(self.mul(a, s) in self.index for a in self.elements for s in gens)

    @property
    def generators(self) -> List[Matrix]:
        if self._generators is None:
            self._generators = greedy_generators(self)
        return self._generators

    @cached_property
    def mul_table(self) -> np.ndarray:
        """table[i, j] = index of elements[i] * elements[j]."""
        size = self.order
        table = np.empty((size, size), dtype=np.int64)
        for i, a in enumerate(self.elements):
            for j, b in enumerate(self.elements):
                table[i, j] = self.index[self.mul(a, b)]
        return table

    @cached_property
    def inverse_index(self) -> List[int]:
        ident = self.index[self.identity]
        table = self.mul_table
        return [int(np.nonzero(table[i] == ident)[0][0]) for i in range(self.order)]

    def is_subgroup_of(self, other: "FiniteMatrixGroup") -> bool:
        return self.ring == other.ring and self.n == other.n and all(g in other.index for g in self.elements)

    def to_json(self) -> dict:
        order_note = "exhaustive scan" if self.mode == "full" else (
            "generator-closure, verified against full scan" if self.verified
            else "generator-closure, unverified against full scan")
        return {"name": self.name, "ring": self.ring.name, "n": self.n, "order": self.order,
                "generators": len(self.generators), "order_source": order_note}


def mulclose(ring: RingSpec, gens: Sequence[Matrix], start: Iterable[Matrix] = (),
             maxsize: int = GROUP_ORDER_GUARD) -> set:
    """Closure of `start` plus the generators under right multiplication by generators."""
    els = set(start) | set(gens)
    if not els:
        return els
    frontier = list(els)
    while frontier:
        fresh = []
        for a in frontier:
            for s in gens:
                c = mat_mul(ring, a, s)
                if c not in els:
                    els.add(c)
                    fresh.append(c)
                    if len(els) > maxsize:
                        raise GuardExceeded("group closure", len(els), maxsize)
        frontier = fresh
    return els


def greedy_generators(group: FiniteMatrixGroup) -> List[Matrix]:
    """Scan elements in order, keeping each one not in the subgroup generated so far."""
    ident = group.identity
    gens: List[Matrix] = []
    closure = {ident}
    for g in group.elements:
        if len(closure) == group.order:
            break
        if g in closure:
            continue
        gens.append(g)
        closure = mulclose(group.ring, gens, closure)
    if len(closure) != group.order:
        raise SimplicialError(f"{group.name}: generated subgroup has order {len(closure)}, expected {group.order}")
    return gens


def _dfs_invertible(ring: RingSpec, n: int, prefix: Sequence[Vector]) -> List[Matrix]:
    """Matrices whose first rows are `prefix` and whose rows span R^n, found row by row."""
    q = ring.size
    prefix = [tuple(p) for p in prefix]
    span0 = left_span_elements(ring, prefix, n)
    if len(span0) != q ** len(prefix):
        raise PreconditionError("fixed rows do not span a free module")
    vectors = list(all_vectors(ring, n))
    multiples = {v: [vec_scale(ring, r, v) for r in range(q)] for v in vectors}
    out: List[Matrix] = []

    def grow(rows: List[Vector], span: frozenset) -> None:
        if len(rows) == n:
            out.append(tuple(rows))
            return
        target = len(span) * q
        for v in vectors:
            if v in span:
                continue
            grown = frozenset(vec_add(ring, s, m) for s in span for m in multiples[v])
            if len(grown) == target:
                grow(rows + [v], grown)

    grow(prefix, span0)
    return out


def standard_generators(ring: RingSpec, n: int) -> List[Matrix]:
    """Elementary matrices 1 + r*E_ij and diagonal units diag(1, .., u, .., 1)."""
    ident = [list(r) for r in identity(ring, n)]
    gens = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for r in ring.nonzero:
                m = [row[:] for row in ident]
                m[i][j] = r
                gens.append(tuple(tuple(row) for row in m))
    for i in range(n):
        for u in sorted(ring.units):
            if u == ring.one:
                continue
            m = [row[:] for row in ident]
            m[i][i] = u
            gens.append(tuple(tuple(row) for row in m))
    return gens or [identity(ring, n)]


def enumerate_gl(ring: RingSpec, n: int, guard: int = GL_FULL_GUARD, mode: str = "auto") -> FiniteMatrixGroup:
    """GL_n(R): exhaustive when |R|^(n^2) is under the guard, otherwise the closure of
    elementary and diagonal matrices."""
    if n < 1:
        raise PreconditionError("GL_n needs n >= 1")
    scan = ring.size ** (n * n)
    name = f"GL_{n}({ring.name})"
    if mode == "full" and scan > guard:
        raise GuardExceeded(f"full enumeration of {name}", scan, guard)
    gens = standard_generators(ring, n)
    if mode == "full" or (mode == "auto" and scan <= guard):
        elements = _dfs_invertible(ring, n, [])
        group = FiniteMatrixGroup(ring, n, elements, name=name, mode="full")
        if mode == "auto":
            closure = mulclose(ring, gens, [group.identity])
            if len(closure) == group.order:
                group._generators = _prune_generators(ring, gens, group.order)
        logger.info("%s: order %d (exhaustive)", name, group.order)
        return group
    closure = mulclose(ring, gens, [identity(ring, n)])
    group = FiniteMatrixGroup(ring, n, closure, name=name, generators=_prune_generators(ring, gens, len(closure)),
                              mode="generators", verified=False)
    logger.warning("%s: order %d from generator closure, unverified against full scan", name, group.order)
    return group


def _prune_generators(ring: RingSpec, gens: Sequence[Matrix], order: int) -> List[Matrix]:
    """Drop generators that the earlier ones already produce."""
    kept: List[Matrix] = []
    closure = {identity(ring, len(gens[0]))} if gens else set()
    for g in gens:
        if g in closure:
            continue
        kept.append(g)
        closure = mulclose(ring, kept, closure)
        if len(closure) == order:
            break
    return kept


def relative_gl(ring: RingSpec, n: int, m: int) -> FiniteMatrixGroup:
    """GL_n^m(R): elements of GL_{m+n}(R) fixing e_1..e_m (their first m rows are e_i)."""
    ambient = m + n
    prefix = [standard_vector(ring, ambient, i) for i in range(m)]
    elements = _dfs_invertible(ring, ambient, prefix)
    group = FiniteMatrixGroup(ring, ambient, elements, name=f"GL_{n}^{m}({ring.name})")
    logger.info("%s: order %d", group.name, group.order)
    return group


def stabilizer_subgroup(group: FiniteMatrixGroup, fix: Sequence[Sequence[int]] = (),
                        preserve: Sequence[Submodule] = (), fix_quotient: Optional[Submodule] = None,
                        name: str = "") -> FiniteMatrixGroup:
    """Elements fixing each vector in `fix`, mapping each submodule in `preserve` onto itself,
    and (optionally) acting trivially on R^n / fix_quotient."""
    ring, n = group.ring, group.n
    fix = [tuple(v) for v in fix]
    basis = [standard_vector(ring, n, i) for i in range(n)]

    def keeps(g: Matrix) -> bool:
        if any(vec_mat(ring, v, g) != v for v in fix):
            return False
        if any(p.transform(g) != p for p in preserve):
            return False
        if fix_quotient is not None:
            for e in basis:
                if vec_add(ring, vec_mat(ring, e, g), vec_neg(ring, e)) not in fix_quotient:
                    return False
        return True

    elements = [g for g in group.elements if keeps(g)]
    return FiniteMatrixGroup(ring, n, elements, name=name or f"stab({group.name})")


# ----------------------------
# Group expressions
# ----------------------------

def parse_group(expr: str, guard: int = GL_FULL_GUARD) -> FiniteMatrixGroup:
    """GL(n,ring) | GLrel(n,m,ring) | stab(<group>|fix=<vec>|pres=<rows>)."""
    text = (expr or "").replace(" ", "")
    m = re.fullmatch(r"GL\((\d+),(.+)\)", text)
    if m:
        return enumerate_gl(parse_ring(m.group(2)), int(m.group(1)), guard)
    m = re.fullmatch(r"GLrel\((\d+),(\d+),(.+)\)", text)
    if m:
        return relative_gl(parse_ring(m.group(3)), int(m.group(1)), int(m.group(2)))
    m = re.fullmatch(r"stab\((.+)\)", text)
    if m:
        parts = m.group(1).split("|")
        base = parse_group(parts[0], guard)
        fix, pres = [], []
        for p in parts[1:]:
            key, _, val = p.partition("=")
            if key == "fix":
                fix.append(tuple(int(x) for x in val.split(",")))
            elif key == "pres":
                rows = parse_matrix(base.ring, val).rows
                pres.append(span_submodule(base.ring, rows, base.n))
            else:
                raise PreconditionError(f"unknown stabilizer clause {p!r}")
        return stabilizer_subgroup(base, fix, pres, name=text)
    raise PreconditionError(f"malformed group expression {expr!r}")


# ----------------------------
# Actions on payloads and complexes
# ----------------------------

def act_on_payload(ring: RingSpec, payload: Hashable, g: Matrix) -> Hashable:
    if isinstance(payload, Submodule):
        return payload.transform(g)
    if isinstance(payload, tuple) and payload and isinstance(payload[0], Submodule):
        return tuple(p.transform(g) for p in payload)
    if isinstance(payload, tuple) and payload and all(isinstance(x, int) for x in payload):
        return vec_mat(ring, payload, g)
    raise PreconditionError(f"no matrix action on payload {payload!r}")


def vertex_permutation(x: SimplicialComplex, ring: RingSpec, g: Matrix) -> List[int]:
    perm = []
    for p in x.vertices:
        image = act_on_payload(ring, p, g)
        if image not in x.index:
            raise SimplicialError(f"{x.name}: image of vertex {p!r} is not a vertex")
        perm.append(x.index[image])
    return perm


def is_simplicial_action(x: SimplicialComplex, perm: Sequence[int]) -> bool:
    return all(tuple(sorted(perm[v] for v in s)) in x.face_set for s in x.face_set)


def permute_simplex(perm: Sequence[int], simplex: Simplex) -> Tuple[Simplex, int]:
    """Sorted image of an oriented simplex and the sign of the reordering."""
    image = [perm[v] for v in simplex]
    sign = 1
    for i in range(len(image)):
        for j in range(i + 1, len(image)):
            if image[i] > image[j]:
                sign = -sign
    return tuple(sorted(image)), sign


def push_chain(perm: Sequence[int], chain: Dict[Simplex, int]) -> Dict[Simplex, int]:
    out: Dict[Simplex, int] = {}
    for s, c in chain.items():
        t, sign = permute_simplex(perm, s)
        v = out.get(t, 0) + sign * c
        if v:
            out[t] = v
        else:
            out.pop(t, None)
    return out


# ----------------------------
# Integer cycle lattices
# ----------------------------

def _echelon(rows: List[Dict[int, int]], width: Optional[int] = None) -> List[Dict[int, int]]:
    """Integer row echelon form over Z (unimodular row operations), leading entries positive.

    Only the first `width` columns are reduced when `width` is given.
    """
    rows = [dict(r) for r in rows if r]
    done: List[Dict[int, int]] = []
    limit = width if width is not None else None
    while rows:
        lead_of = [min((c for c in r if limit is None or c < limit), default=None) for r in rows]
        live = [i for i, c in enumerate(lead_of) if c is not None]
        if not live:
            break
        col = min(lead_of[i] for i in live)
        group = [i for i in live if lead_of[i] == col]
        rest = [rows[i] for i in range(len(rows)) if i not in set(group)]
        block = [rows[i] for i in group]
        while len(block) > 1:
            block.sort(key=lambda r: abs(r[col]))
            pivot = block[0]
            nxt = [pivot]
            for r in block[1:]:
                q = r[col] // pivot[col]
                red = dict(r)
                for c, v in pivot.items():
                    nv = red.get(c, 0) - q * v
                    if nv:
                        red[c] = nv
                    else:
                        red.pop(c, None)
                if col in red:
                    nxt.append(red)
                elif red:
                    rest.append(red)
            block = nxt
        pivot = block[0]
        if pivot[col] < 0:
            pivot = {c: -v for c, v in pivot.items()}
        done.append(pivot)
        rows = rest
    leftovers = [r for r in rows if r]
    return done + leftovers


class CycleLattice:
    """Integer basis of ker(boundary_d) with exact coordinates for any cycle."""

    def __init__(self, simplices: Sequence[Simplex], boundary: SparseIntMatrix,
                 higher: Optional[SparseIntMatrix] = None):
        self.simplices = list(simplices)
        self.pos = {s: i for i, s in enumerate(self.simplices)}
        width = boundary.nrows
        augmented = []
        for j, col in enumerate(boundary.cols):
            row = dict(col)
            row[width + j] = 1
            augmented.append(row)
        reduced = _echelon(augmented, width)
        kernel = [{c - width: v for c, v in r.items()} for r in reduced if all(c >= width for c in r)]
        self.basis: List[Dict[int, int]] = _echelon(kernel)
        self.pivots = [min(b) for b in self.basis]
        self.rank = len(self.basis)
        self.relations: IntMatrix = []
        if higher is not None:
            self.relations = [self.coordinates(col) for col in higher.cols if col]

    def coordinates(self, cycle: Dict[int, int]) -> List[int]:
        z = dict(cycle)
        out = [0] * self.rank
        for i, (b, p) in enumerate(zip(self.basis, self.pivots)):
            a = z.get(p, 0)
            if not a:
                continue
            if a % b[p]:
                raise SimplicialError(f"cycle is not an integer combination of the kernel basis at {p}")
            c = a // b[p]
            out[i] = c
            for col, v in b.items():
                nv = z.get(col, 0) - c * v
                if nv:
                    z[col] = nv
                else:
                    z.pop(col, None)
        if z:
            raise SimplicialError("chain is not a cycle")
        return out

    def chain(self, i: int) -> Dict[Simplex, int]:
        return {self.simplices[j]: v for j, v in self.basis[i].items()}

    def coordinates_of_chain(self, chain: Dict[Simplex, int]) -> List[int]:
        return self.coordinates({self.pos[s]: v for s, v in chain.items()})


# ----------------------------
# Modules
# ----------------------------

class GModule:
    """Z^rank modulo the relation rows, with a right action given per generator."""

    def __init__(self, rank: int, relations: IntMatrix, generators: Sequence[Matrix],
                 matrices: Sequence[IntMatrix], name: str = "",
                 action: Optional[Callable[[Matrix], IntMatrix]] = None):
        if len(generators) != len(matrices):
            raise PreconditionError("one action matrix per generator is required")
        self.rank = rank
        self.relations = relations
        self.generators = list(generators)
        self.matrices = [np.array(a, dtype=object).reshape(rank, rank) for a in matrices]
        self.name = name
        self.action = action

    def matrix(self, g: Matrix) -> np.ndarray:
        if self.action is None:
            raise PreconditionError(f"{self.name}: no action available for arbitrary elements")
        return np.array(self.action(g), dtype=object).reshape(self.rank, self.rank)

    def underlying(self) -> HomologyResult:
        if not self.relations:
            return HomologyResult(self.rank)
        snf = smith_normal_form(SparseIntMatrix.from_dense(self.relations))
        return HomologyResult.from_divisors(self.rank - snf.rank, snf.divisors)

    def verify_homomorphism(self, group: FiniteMatrixGroup, pairs: int = 12) -> bool:
        """rho(g*h) = rho(g) @ rho(h) on generator pairs (exact at the chain level)."""
        gens = self.generators
        checked = 0
        for a in gens:
            for b in gens:
                if checked >= pairs:
                    return True
                prod = self.matrix(group.mul(a, b))
                if not np.array_equal(prod, self.matrix(a).dot(self.matrix(b))):
                    logger.error("%s: action is not a homomorphism on a generator pair", self.name)
                    return False
                checked += 1
        return True

    def to_json(self) -> dict:
        return {"name": self.name, "rank": self.rank, "relations": len(self.relations),
                "generators": len(self.generators), "underlying": self.underlying().to_json()}


class HomologyAction:
    """g -> matrix of g in the cycle basis of the lattice."""

    def __init__(self, x: SimplicialComplex, ring: RingSpec, lattice: CycleLattice):
        self.x = x
        self.ring = ring
        self.lattice = lattice

    def __call__(self, g: Matrix) -> IntMatrix:
        perm = vertex_permutation(self.x, self.ring, g)
        lattice = self.lattice
        return [lattice.coordinates_of_chain(push_chain(perm, lattice.chain(i))) for i in range(lattice.rank)]


def action_on_homology(group: FiniteMatrixGroup, x: Union[SimplicialComplex, Poset], d: int,
                       generators: Optional[Sequence[Matrix]] = None) -> Tuple[GModule, CycleLattice]:
    """Reduced H_d of x as a right module, presented as cycles modulo boundaries."""
    if isinstance(x, Poset):
        x = order_complex(x)
    cc = chain_complex_of(x, reduced=True)
    lattice = CycleLattice(cc.bases.get(d, []), cc.boundary(d),
                           cc.boundary(d + 1) if d + 1 in cc.bases else None)
    gens = list(generators) if generators is not None else group.generators
    action = HomologyAction(x, group.ring, lattice)
    for g in gens:
        perm = vertex_permutation(x, group.ring, g)
        if not is_simplicial_action(x, perm):
            raise SimplicialError(f"{x.name}: a generator of {group.name} does not act simplicially")
    module = GModule(lattice.rank, lattice.relations, gens, [action(g) for g in gens],
                     name=f"H_{d}({x.name})", action=action)
    return module, lattice


def coinvariants(module: GModule) -> HomologyResult:
    """M_G = M / (relations + span of m*g - m), integrally."""
    k = module.rank
    if k == 0:
        return HomologyResult(0)
    rows: IntMatrix = [list(r) for r in module.relations]
    for a in module.matrices:
        for i in range(k):
            row = [int(a[i][j]) - (1 if i == j else 0) for j in range(k)]
            if any(row):
                rows.append(row)
    if not rows:
        return HomologyResult(k)
    snf = smith_normal_form(SparseIntMatrix.from_dense(rows))
    return HomologyResult.from_divisors(k - snf.rank, snf.divisors)


# ----------------------------
# Abelianization
# ----------------------------

def commutator(group: FiniteMatrixGroup, a: Matrix, b: Matrix) -> Matrix:
    return group.mul(group.mul(group.inverse(a), group.inverse(b)), group.mul(a, b))


def commutator_subgroup(group: FiniteMatrixGroup) -> set:
    """Normal closure of the commutators of the generators."""
    gens = group.generators
    ident = group.identity
    normal_gens = [c for c in (commutator(group, a, b) for a in gens for b in gens) if c != ident]
    inv = {s: group.inverse(s) for s in gens}
    while True:
        sub = mulclose(group.ring, normal_gens, [ident]) if normal_gens else {ident}
        extra = []
        for h in normal_gens:
            for s in gens:
                conj = group.mul(group.mul(inv[s], h), s)
                if conj not in sub:
                    extra.append(conj)
        if not extra:
            return sub
        normal_gens.extend(extra)


def abelianization(group: FiniteMatrixGroup) -> HomologyResult:
    """G / [G, G] from the Schreier relations of the coset graph, reduced by SNF."""
    gens = group.generators
    k = len(gens)
    if group.order == 1 or k == 0:
        return HomologyResult(0)
    kernel = commutator_subgroup(group)
    coset: Dict[Matrix, int] = {}
    reps: List[Matrix] = []
    for g in group.elements:
        if g in coset:
            continue
        cid = len(reps)
        reps.append(g)
        for h in kernel:
            coset[group.mul(g, h)] = cid
    exponent: Dict[int, List[int]] = {coset[group.identity]: [0] * k}
    frontier = [coset[group.identity]]
    relations: IntMatrix = []
    while frontier:
        fresh = []
        for c in frontier:
            for i, s in enumerate(gens):
                target = coset[group.mul(reps[c], s)]
                step = list(exponent[c])
                step[i] += 1
                if target not in exponent:
                    exponent[target] = step
                    fresh.append(target)
                else:
                    rel = [a - b for a, b in zip(step, exponent[target])]
                    if any(rel):
                        relations.append(rel)
        frontier = fresh
    if len(exponent) != len(reps):
        raise SimplicialError(f"{group.name}: coset graph is not connected")
    if not relations:
        return HomologyResult(k)
    snf = smith_normal_form(SparseIntMatrix.from_dense(relations))
    result = HomologyResult.from_divisors(k - snf.rank, snf.divisors)
    logger.info("%s: abelianization %s (index of commutator subgroup %d)", group.name, result, len(reps))
    return result
