#!/usr/bin/env python3
# ==============================================================================
# [FILE] functions/linalg.py
# [PROJECT] StabVerify
# [ROLE] Exact linear algebra over finite rings: unimodular vectors, partial
#        bases, Howell / echelon forms, canonical submodules, duals
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================
"""
Conventions: left R-modules, row vectors, matrices act on the right (x -> x*M).
A vector is a tuple of element indices; a matrix is a tuple of row tuples.
The ring is always passed explicitly.

The dual of R^n is written as (R^op)^n: a functional f is the coordinate tuple
(f_1, ..., f_n) with f(x) = sum x_i f_i, and R^op acts on it from the left.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from functions.errors import GuardExceeded, NotInvertibleError, PreconditionError
from functions.rings import RingSpec, opposite

Vector = Tuple[int, ...]
Matrix = Tuple[Vector, ...]

SUBMODULE_GUARD = 200_000
FREE_SUMMAND_SEARCH_GUARD = 200_000


# ----------------------------
# Vectors / matrices
# ----------------------------

def zero_vector(n: int) -> Vector:
    return (0,) * n


def standard_vector(ring: RingSpec, n: int, i: int) -> Vector:
    """e_{i+1} in R^n (0-based position i)."""
    return tuple(ring.one if j == i else 0 for j in range(n))


def standard_basis(ring: RingSpec, n: int) -> List[Vector]:
    return [standard_vector(ring, n, i) for i in range(n)]


def identity(ring: RingSpec, n: int) -> Matrix:
    return tuple(standard_basis(ring, n))


def vec_add(ring: RingSpec, u: Sequence[int], v: Sequence[int]) -> Vector:
    a = ring.add_t
    return tuple(a[x][y] for x, y in zip(u, v))


def vec_neg(ring: RingSpec, v: Sequence[int]) -> Vector:
    return tuple(ring.neg_t[x] for x in v)


def vec_scale(ring: RingSpec, r: int, v: Sequence[int]) -> Vector:
    """Left scalar multiple r*v."""
    row = ring.mul_t[r]
    return tuple(row[x] for x in v)


def vec_rscale(ring: RingSpec, v: Sequence[int], r: int) -> Vector:
    """Right scalar multiple v*r."""
    m = ring.mul_t
    return tuple(m[x][r] for x in v)


def vec_mat(ring: RingSpec, v: Sequence[int], m: Sequence[Sequence[int]]) -> Vector:
    """Row vector times matrix."""
    a, mu = ring.add_t, ring.mul_t
    ncols = len(m[0]) if m else 0
    out = []
    for j in range(ncols):
        acc = 0
        for i, x in enumerate(v):
            if x:
                acc = a[acc][mu[x][m[i][j]]]
        out.append(acc)
    return tuple(out)


def mat_mul(ring: RingSpec, x: Sequence[Sequence[int]], y: Sequence[Sequence[int]]) -> Matrix:
    return tuple(vec_mat(ring, row, y) for row in x)


def transpose(m: Sequence[Sequence[int]]) -> Matrix:
    return tuple(zip(*m)) if m else ()


def all_vectors(ring: RingSpec, n: int) -> Iterator[Vector]:
    """R^n in lexicographic order of coordinate indices."""
    return itertools.product(range(ring.size), repeat=n)


def dual_pairing(ring: RingSpec, x: Sequence[int], f: Sequence[int]) -> int:
    """f(x) = sum x_i f_i, computed in R."""
    a, mu = ring.add_t, ring.mul_t
    acc = 0
    for xi, fi in zip(x, f):
        acc = a[acc][mu[xi][fi]]
    return acc


def _ambient_guard(ring: RingSpec, n: int, guard: int = SUBMODULE_GUARD) -> None:
    size = ring.size**n
    if size > guard:
        raise GuardExceeded(f"submodule elements in R^{n} over {ring.name}", size, guard)


# ----------------------------
# Text format
# ----------------------------

@dataclass(frozen=True)
class RMatrix:
    ring: RingSpec
    rows: Matrix

    def __str__(self) -> str:
        return format_matrix(self.rows)


def parse_matrix(ring: RingSpec, text: str) -> RMatrix:
    """Rows as comma-separated element indices, rows separated by semicolons."""
    text = (text or "").strip()
    if not text:
        return RMatrix(ring, ())
    rows = []
    for chunk in text.split(";"):
        row = tuple(int(x) for x in chunk.split(","))
        if any(not 0 <= x < ring.size for x in row):
            raise PreconditionError(f"entry out of range in {chunk!r} for {ring.name}")
        rows.append(row)
    if len({len(r) for r in rows}) != 1:
        raise PreconditionError(f"matrix {text!r} is not rectangular")
    return RMatrix(ring, tuple(rows))


def format_matrix(rows: Sequence[Sequence[int]]) -> str:
    return ";".join(",".join(str(x) for x in r) for r in rows)


# ----------------------------
# Spans
# ----------------------------

def left_span_elements(ring: RingSpec, gens: Iterable[Sequence[int]], n: int,
                       guard: int = SUBMODULE_GUARD) -> FrozenSet[Vector]:
    _ambient_guard(ring, n, guard)
    span = {zero_vector(n)}
    for g in gens:
        g = tuple(g)
        if not any(g):
            continue
        multiples = {vec_scale(ring, r, g) for r in range(ring.size)}
        span = {vec_add(ring, s, m) for s in span for m in multiples}
    return frozenset(span)


def _right_column_span(ring: RingSpec, cols: Sequence[Sequence[int]], k: int) -> FrozenSet[Vector]:
    """Right R-span of column vectors in R^k."""
    span = {zero_vector(k)}
    for c in cols:
        multiples = {vec_rscale(ring, c, r) for r in range(ring.size)}
        span = {vec_add(ring, s, m) for s in span for m in multiples}
    return frozenset(span)


def _right_ideal(ring: RingSpec, elems: Iterable[int]) -> FrozenSet[int]:
    ideal = {0}
    for x in elems:
        principal = ring.right_ideals[x]
        ideal = {ring.add_t[i][p] for i in ideal for p in principal}
    return frozenset(ideal)


def _zmod_modulus(ring: RingSpec) -> Optional[int]:
    if ring.kind == "ZmodN":
        return ring.params["N"]
    if ring.kind == "GaloisField" and ring.params["k"] == 1:
        return ring.params["p"]
    return None


# ----------------------------
# Unimodular vectors / partial bases
# ----------------------------

def is_unimodular(ring: RingSpec, v: Sequence[int]) -> bool:
    """True iff sum v_i a_i = 1 for some right coefficients a_i."""
    if len(v) == 0:
        raise PreconditionError("unimodularity of a zero-length vector")
    n_mod = _zmod_modulus(ring)
    if n_mod is not None:
        return math.gcd(n_mod, *v) == 1
    if any(x in ring.units for x in v):
        return True
    return ring.one in _right_ideal(ring, v)


def determinant(ring: RingSpec, m: Sequence[Sequence[int]]) -> int:
    """Leibniz determinant; only meaningful over commutative rings."""
    k = len(m)
    a, mu = ring.add_t, ring.mul_t
    acc = 0
    for perm in itertools.permutations(range(k)):
        term = ring.one
        for i, j in enumerate(perm):
            term = mu[term][m[i][j]]
            if term == 0:
                break
        if term == 0:
            continue
        inversions = sum(1 for x, y in itertools.combinations(perm, 2) if x > y)
        acc = a[acc][ring.neg_t[term] if inversions % 2 else term]
    return acc


def maximal_minors(ring: RingSpec, rows: Sequence[Sequence[int]]) -> List[int]:
    k = len(rows)
    n = len(rows[0]) if rows else 0
    return [determinant(ring, [[r[c] for c in cols] for r in rows])
            for cols in itertools.combinations(range(n), k)]


def is_partial_basis(ring: RingSpec, vs: Sequence[Sequence[int]], n: int) -> bool:
    """True iff the k x n matrix of rows has a right inverse (basis of a free summand)."""
    k = len(vs)
    if k == 0:
        return True
    if k > n:
        return False
    rows = [tuple(v) for v in vs]
    if len(set(rows)) != k or any(len(r) != n for r in rows):
        return False
    if ring.commutative:
        # maximal minors generate the unit ideal
        minors = maximal_minors(ring, rows)
        n_mod = _zmod_modulus(ring)
        if n_mod is not None:
            return math.gcd(n_mod, *minors) == 1
        if any(d in ring.units for d in minors):
            return True
        if ring.kind == "GaloisField":
            return False
        return ring.one in _right_ideal(ring, minors)
    cols = transpose(rows)
    span = _right_column_span(ring, cols, k)
    return all(standard_vector(ring, k, i) in span for i in range(k))


def extends_to_basis(ring: RingSpec, vs: Sequence[Sequence[int]], n: int) -> Optional[List[Vector]]:
    """Greedy completion in lexicographic order; None if the greedy pass gets stuck."""
    basis = [tuple(v) for v in vs]
    if not is_partial_basis(ring, basis, n):
        raise PreconditionError("extends_to_basis: input is not a partial basis")
    for cand in all_vectors(ring, n):
        if len(basis) == n:
            break
        if cand in basis:
            continue
        if is_partial_basis(ring, basis + [cand], n):
            basis.append(cand)
    return basis if len(basis) == n else None


# ----------------------------
# Normal forms
# ----------------------------

def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _unit_normalizer(p: int, n_mod: int) -> int:
    """A unit x mod N with p*x = gcd(p, N) mod N."""
    g = math.gcd(p, n_mod)
    n_red = n_mod // g
    x0 = pow(p // g, -1, n_red) if n_red > 1 else 0
    for t in range(g + 1):
        x = (x0 + t * n_red) % n_mod
        if math.gcd(x, n_mod) == 1:
            return x
    raise PreconditionError(f"no unit normalizer for {p} mod {n_mod}")


def howell_form(ring: RingSpec, rows: Sequence[Sequence[int]], ncols: Optional[int] = None) -> Matrix:
    """Howell normal form of a matrix over Z/N (rows spanning the same submodule)."""
    n_mod = _zmod_modulus(ring)
    if n_mod is None:
        raise PreconditionError(f"howell_form needs Z/N, got {ring.name}")
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    a = [[x % n_mod for x in r] for r in rows if any(x % n_mod for x in r)]
    r = 0
    for c in range(ncols):
        piv = next((j for j in range(r, len(a)) if a[j][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for j in range(r + 1, len(a)):
            b = a[j][c]
            if not b:
                continue
            g, s, t = _xgcd(a[r][c], b)
            u, v = -b // g, a[r][c] // g
            top, low = a[r], a[j]
            a[r] = [(s * x + t * y) % n_mod for x, y in zip(top, low)]
            a[j] = [(u * x + v * y) % n_mod for x, y in zip(top, low)]
        unit = _unit_normalizer(a[r][c], n_mod)
        a[r] = [(unit * x) % n_mod for x in a[r]]
        g = a[r][c]
        for i in range(r):
            q = a[i][c] // g
            if q:
                a[i] = [(x - q * y) % n_mod for x, y in zip(a[i], a[r])]
        if g != 1:
            ann = [((n_mod // g) * x) % n_mod for x in a[r]]
            if any(ann):
                a.append(ann)
        r += 1
    return tuple(tuple(row) for row in a[:r])


def rref(ring: RingSpec, rows: Sequence[Sequence[int]], ncols: Optional[int] = None) -> Matrix:
    """Reduced row echelon form over a finite field."""
    if ring.kind != "GaloisField":
        raise PreconditionError(f"rref needs a field, got {ring.name}")
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    a = [list(r) for r in rows if any(r)]
    r = 0
    for c in range(ncols):
        piv = next((j for j in range(r, len(a)) if a[j][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        a[r] = list(vec_scale(ring, ring.inv_t[a[r][c]], a[r]))
        for j in range(len(a)):
            if j != r and a[j][c]:
                a[j] = list(vec_add(ring, a[j], vec_scale(ring, ring.neg_t[a[j][c]], a[r])))
        r += 1
    return tuple(tuple(row) for row in a[:r])


# ----------------------------
# Submodules
# ----------------------------

class Submodule:
    """A left submodule of R^n, identified by its element set."""

    def __init__(self, ring: RingSpec, n: int, elements: FrozenSet[Vector],
                 generators: Sequence[Vector] = (), witness: Optional[Sequence[Vector]] = None):
        self.ring = ring
        self.n = n
        self.elements = elements
        self.generators: Tuple[Vector, ...] = tuple(tuple(g) for g in generators if any(g))
        self.witness: Optional[Tuple[Vector, ...]] = tuple(witness) if witness is not None else None
        # int-only key: stable across processes, so unpickled cache entries stay hashable
        self._hash = hash((n, elements))

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def free_rank(self) -> Optional[int]:
        return None if self.witness is None else len(self.witness)

    def is_zero(self) -> bool:
        return len(self.elements) == 1

    def __contains__(self, v: Sequence[int]) -> bool:
        return tuple(v) in self.elements

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Submodule) and other.n == self.n
                and other.ring == self.ring and other.elements == self.elements)

    def __hash__(self) -> int:
        return self._hash

    def __le__(self, other: "Submodule") -> bool:
        return self.elements <= other.elements

    def __lt__(self, other: "Submodule") -> bool:
        return self.elements < other.elements

    @cached_property
    def canonical_rows(self) -> Matrix:
        """Howell form over Z/N, RREF over F_q, sorted element list otherwise."""
        if _zmod_modulus(self.ring) is not None:
            return howell_form(self.ring, self.generators, self.n)
        if self.ring.kind == "GaloisField":
            return rref(self.ring, self.generators, self.n)
        return tuple(sorted(self.elements))

    @cached_property
    def sort_key(self) -> tuple:
        return (len(self.elements), self.canonical_rows)

    def text(self) -> str:
        return format_matrix(self.canonical_rows) or "0"

    def __repr__(self) -> str:
        return f"<{self.text()}>"

    def basis(self) -> Tuple[Vector, ...]:
        if self.witness is None and is_free_summand(self) is None:
            raise PreconditionError(f"{self!r} is not a free summand")
        return self.witness  # type: ignore[return-value]

    def transform(self, g: Sequence[Sequence[int]]) -> "Submodule":
        """Image under x -> x*g; witnesses are carried along."""
        gens = self.witness if self.witness is not None else self.generators
        images = [vec_mat(self.ring, v, g) for v in gens]
        return span_submodule(self.ring, images, self.n,
                              witness=images if self.witness is not None else None)

    def intersection(self, other: "Submodule") -> "Submodule":
        return submodule_from_elements(self.ring, self.n, self.elements & other.elements)

    def sum(self, other: "Submodule") -> "Submodule":
        return span_submodule(self.ring, list(self.generators) + list(other.generators), self.n)


def span_submodule(ring: RingSpec, vs: Sequence[Sequence[int]], n: Optional[int] = None,
                   witness: Optional[Sequence[Vector]] = None) -> Submodule:
    vs = [tuple(v) for v in vs]
    if n is None:
        if not vs:
            raise PreconditionError("span of no vectors needs an explicit ambient rank")
        n = len(vs[0])
    if any(len(v) != n for v in vs):
        raise PreconditionError(f"ambient mismatch: expected vectors of length {n}")
    elements = left_span_elements(ring, vs, n)
    sub = Submodule(ring, n, elements, vs, witness)
    if sub.generators and (_zmod_modulus(ring) is not None or ring.kind == "GaloisField"):
        sub.generators = sub.canonical_rows
    return sub


def submodule_from_elements(ring: RingSpec, n: int, elements: Iterable[Sequence[int]]) -> Submodule:
    """Wrap a closed element set; a small generating set is picked greedily."""
    elements = frozenset(tuple(e) for e in elements)
    gens: List[Vector] = []
    span: FrozenSet[Vector] = frozenset({zero_vector(n)})
    for v in sorted(elements):
        if v not in span:
            gens.append(v)
            span = left_span_elements(ring, gens, n)
        if len(span) == len(elements):
            break
    if span != elements:
        raise PreconditionError("element set is not a submodule")
    return span_submodule(ring, gens, n)


def _int_log(size: int, base: int) -> Optional[int]:
    r, acc = 0, 1
    while acc < size:
        acc *= base
        r += 1
    return r if acc == size else None


def is_free_summand(sub: Submodule, guard: int = FREE_SUMMAND_SEARCH_GUARD) -> Optional[int]:
    """Rank of sub if it is a free direct summand of R^n (witness stored), else None."""
    if sub.witness is not None:
        return len(sub.witness)
    ring, n = sub.ring, sub.n
    if sub.is_zero():
        sub.witness = ()
        return 0
    r = _int_log(sub.size, ring.size)
    if r is None:
        return None
    cands = sorted(v for v in sub.elements if is_unimodular(ring, v))
    steps = [0]

    def search(chosen: List[Vector], start: int) -> Optional[List[Vector]]:
        if len(chosen) == r:
            return chosen
        for idx in range(start, len(cands)):
            steps[0] += 1
            if steps[0] > guard:
                raise GuardExceeded("free-summand witness search", steps[0], guard)
            trial = chosen + [cands[idx]]
            if is_partial_basis(ring, trial, n):
                found = search(trial, idx + 1)
                if found is not None:
                    return found
        return None

    found = search([], 0)
    if found is None:
        return None
    sub.witness = tuple(found)
    return r


def complement_of(sub: Submodule) -> Submodule:
    """A free complement C with sub + C = R^n, sub and C meeting in 0."""
    if is_free_summand(sub) is None:
        raise PreconditionError(f"{sub!r} is not a free summand")
    ring, n = sub.ring, sub.n
    basis = extends_to_basis(ring, sub.witness, n)
    if basis is None:
        raise PreconditionError(f"greedy completion of {sub!r} got stuck")
    added = basis[len(sub.witness):]
    comp = span_submodule(ring, added, n, witness=added)
    if comp.size * sub.size != ring.size**n or sub.elements & comp.elements != {zero_vector(n)}:
        raise PreconditionError(f"completion of {sub!r} is not a direct complement")
    return comp


def summand_witness(inner: Submodule, outer: Submodule) -> Optional[List[Vector]]:
    """Extend a basis of `inner` to a basis of `outer` (both free summands, inner <= outer)."""
    if not inner <= outer:
        raise PreconditionError("summand_witness: inner is not contained in outer")
    if is_free_summand(inner) is None or is_free_summand(outer) is None:
        raise PreconditionError("summand_witness: both modules must be free summands")
    ring, n = inner.ring, inner.n
    basis = list(inner.witness)
    for cand in sorted(outer.elements):
        if len(basis) == outer.free_rank:
            break
        if cand not in basis and is_partial_basis(ring, basis + [cand], n):
            basis.append(cand)
    if len(basis) != outer.free_rank or left_span_elements(ring, basis, n) != outer.elements:
        return None
    return basis


def annihilator_dual(sub: Submodule) -> Submodule:
    """V° = {f in (R^op)^n : f(v) = 0 for v in V}, a submodule over the opposite ring."""
    ring, n = sub.ring, sub.n
    _ambient_guard(ring, n)
    gens = sub.witness if sub.witness is not None else sub.generators
    ann = [f for f in all_vectors(ring, n) if all(dual_pairing(ring, g, f) == 0 for g in gens)]
    return submodule_from_elements(opposite(ring), n, ann)


# ----------------------------
# Invertible matrices
# ----------------------------

def invert(ring: RingSpec, m: Sequence[Sequence[int]]) -> Matrix:
    n = len(m)
    if any(len(row) != n for row in m):
        raise NotInvertibleError("only square matrices are invertible")
    if ring.commutative:
        det = determinant(ring, m)
        if det not in ring.units:
            raise NotInvertibleError(f"determinant {ring.labels[det]} is not a unit")
        dinv = ring.inv_t[det]
        adj = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = [[m[a][b] for b in range(n) if b != j] for a in range(n) if a != i]
                cof = determinant(ring, minor) if minor else ring.one
                if (i + j) % 2:
                    cof = ring.neg_t[cof]
                adj[j][i] = ring.mul_t[dinv][cof]
        return tuple(tuple(r) for r in adj)
    # left span of the rows, tracking coefficients
    _ambient_guard(ring, n)
    coeffs: Dict[Vector, Vector] = {zero_vector(n): zero_vector(n)}
    for i, row in enumerate(m):
        e_i = standard_vector(ring, n, i)
        fresh: Dict[Vector, Vector] = {}
        for r in range(ring.size):
            mult, cmult = vec_scale(ring, r, row), vec_scale(ring, r, e_i)
            for s, c in coeffs.items():
                key = vec_add(ring, s, mult)
                if key not in fresh:
                    fresh[key] = vec_add(ring, c, cmult)
        coeffs = fresh
    try:
        left = tuple(coeffs[standard_vector(ring, n, j)] for j in range(n))
    except KeyError:
        raise NotInvertibleError("rows do not span R^n") from None
    if mat_mul(ring, m, left) != identity(ring, n):
        raise NotInvertibleError("left inverse is not a right inverse")
    return left


def is_invertible(ring: RingSpec, m: Sequence[Sequence[int]]) -> bool:
    try:
        invert(ring, m)
        return True
    except NotInvertibleError:
        return False


def inverse_transpose(ring: RingSpec, m: Sequence[Sequence[int]]) -> RMatrix:
    """(m^-1)^T read over R^op: the matrix of f -> f o m^-1 on dual row vectors."""
    return RMatrix(opposite(ring), transpose(invert(ring, m)))


# ----------------------------
# Nested decompositions
# ----------------------------

def is_direct_sum(parts: Sequence[Submodule], whole: Submodule) -> bool:
    """Exhaustive check that the parts are independent and add up to `whole`."""
    total = 1
    for p in parts:
        total *= p.size
    if total != whole.size:
        return False
    gens: List[Vector] = []
    for p in parts:
        gens.extend(p.generators)
    return left_span_elements(whole.ring, gens, whole.n) == whole.elements


def check_nested_decomposition(v: Submodule, w: Submodule, v2: Submodule, w2: Submodule) -> Dict[str, bool]:
    """For R^n = V+W = V'+W' with V <= V', W' <= W: V' meet W is free of rank rank V' - rank V
    and the three induced decompositions hold."""
    ring, n = v.ring, v.n
    whole = span_submodule(ring, standard_basis(ring, n), n)
    if not (v <= v2 and w2 <= w):
        raise PreconditionError("nested decomposition needs V <= V' and W' <= W")
    if not (is_direct_sum([v, w], whole) and is_direct_sum([v2, w2], whole)):
        raise PreconditionError("nested decomposition inputs are not splittings of R^n")
    x = v2.intersection(w)
    rank_x = is_free_summand(x)
    expected = (is_free_summand(v2) or 0) - (is_free_summand(v) or 0)
    return {
        "intersection_free": rank_x is not None and rank_x == expected,
        "outer_splits": is_direct_sum([v, x], v2),
        "complement_splits": is_direct_sum([w2, x], w),
        "three_way": is_direct_sum([v, x, w2], whole),
    }
