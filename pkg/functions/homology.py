#!/usr/bin/env python3
# ==============================================================================
# [FILE] functions/homology.py
# [PROJECT] StabVerify
# [ROLE] Sparse integer Smith normal form, chain complexes of simplicial
#        complexes, (relative) homology over Z / Q / F_p / Z[1/2], sphericity
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================
"""
Homology engine.

- Integer arithmetic uses Python ints throughout, so coefficient growth can
  never wrap around.
- Orientation of a simplex is the order of its sorted vertex ids.
- Field ranks go through numpy when the dense matrix is small enough and
  through sparse elimination otherwise.
- Sphericity and Cohen-Macaulay checks are homology-level proxies: they test
  vanishing of reduced homology, not topological connectivity.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
from sympy import Matrix, ZZ, isprime
from sympy.matrices.normalforms import invariant_factors

from functions.complexes import SimplicialComplex, Simplex, link
from functions.errors import GuardExceeded, PreconditionError, SimplicialError

logger = logging.getLogger(__name__)

DENSE_RANK_LIMIT = 40_000_000
DENSE_ORACLE_LIMIT = 250_000
HOMOLOGY_PROXY = "homology-level proxy (reduced homology vanishing, not connectivity)"


# ----------------------------
# Results / coefficients
# ----------------------------

@dataclass(frozen=True)
class HomologyResult:
    rank: int
    torsion: Tuple[int, ...] = ()

    def __post_init__(self):
        tors = tuple(int(t) for t in self.torsion)
        if any(t <= 1 for t in tors):
            raise ValueError(f"torsion coefficients must exceed 1: {tors}")
        if any(b % a for a, b in zip(tors, tors[1:])):
            raise ValueError(f"torsion coefficients must form a divisibility chain: {tors}")
        object.__setattr__(self, "torsion", tors)

    @classmethod
    def from_divisors(cls, rank: int, divisors: Iterable[int]) -> "HomologyResult":
        return cls(rank, tuple(invariant_chain(d for d in divisors if abs(d) > 1)))

    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}

    def __str__(self) -> str:
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) or "0"


@dataclass(frozen=True)
class CoefficientDomain:
    kind: str  # "Z" | "Q" | "Fp" | "half"
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "Fp", "half"):
            raise PreconditionError(f"unknown coefficient domain {self.kind!r}")
        if self.kind == "Fp" and (self.p is None or not isprime(self.p)):
            raise PreconditionError(f"F_p coefficients need a prime p, got {self.p}")

    @classmethod
    def parse(cls, text: str) -> "CoefficientDomain":
        text = (text or "").strip()
        if text in ("Z", "Q", "half"):
            return cls(text)
        if text.startswith("Fp:"):
            try:
                return cls("Fp", int(text[3:]))
            except ValueError:
                raise PreconditionError(f"bad prime in {text!r}") from None
        raise PreconditionError(f"coefficient flag must be Z, Q, Fp:<p> or half, got {text!r}")

    @property
    def inverts_two(self) -> bool:
        return self.kind in ("Q", "half") or (self.kind == "Fp" and self.p != 2)

    def __str__(self) -> str:
        return f"Fp:{self.p}" if self.kind == "Fp" else self.kind

    def tensor(self, h: HomologyResult) -> HomologyResult:
        """A (x) k for a finitely generated abelian group A (right exact, so exact for coinvariants)."""
        if self.kind == "Z":
            return h
        if self.kind == "Q":
            return HomologyResult(h.rank)
        if self.kind == "half":
            return HomologyResult(h.rank, tuple(_odd_part(t) for t in h.torsion if not _is_power_of_two(t)))
        return HomologyResult(h.rank + sum(1 for t in h.torsion if t % self.p == 0))


INTEGERS = CoefficientDomain("Z")


def _is_power_of_two(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


def _odd_part(x: int) -> int:
    while x % 2 == 0:
        x //= 2
    return x


def invert_two_vanishes(h: HomologyResult) -> bool:
    return h.rank == 0 and all(_is_power_of_two(t) for t in h.torsion)


def invariant_chain(values: Iterable[int]) -> List[int]:
    """Turn a multiset of nonzero diagonal entries into a divisibility chain."""
    d = sorted(abs(v) for v in values if v)
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = math.gcd(d[i], d[j])
            d[i], d[j] = g, d[i] * d[j] // g
    return d


# ----------------------------
# Sparse matrices
# ----------------------------

class SparseIntMatrix:
    """Column-major sparse integer matrix (no stored zeros)."""

    def __init__(self, nrows: int, ncols: int, cols: Optional[List[Dict[int, int]]] = None):
        self.nrows = nrows
        self.ncols = ncols
        self.cols: List[Dict[int, int]] = cols if cols is not None else [{} for _ in range(ncols)]
        if len(self.cols) != ncols:
            raise PreconditionError("column count mismatch")
        for c in self.cols:
            for r, v in c.items():
                if not v or not 0 <= r < nrows:
                    raise PreconditionError(f"bad sparse entry ({r}, {v})")

    @classmethod
    def from_triples(cls, nrows: int, ncols: int, triples: Iterable[Tuple[int, int, int]]) -> "SparseIntMatrix":
        cols: List[Dict[int, int]] = [{} for _ in range(ncols)]
        for r, c, v in triples:
            nv = cols[c].get(r, 0) + v
            if nv:
                cols[c][r] = nv
            else:
                cols[c].pop(r, None)
        return cls(nrows, ncols, cols)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]]) -> "SparseIntMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        return cls.from_triples(nrows, ncols, ((i, j, int(v)) for i, row in enumerate(rows)
                                               for j, v in enumerate(row) if v))

    def triples(self) -> List[Tuple[int, int, int]]:
        return sorted((r, c, v) for c, col in enumerate(self.cols) for r, v in col.items())

    @property
    def nnz(self) -> int:
        return sum(len(c) for c in self.cols)

    def to_dense(self) -> List[List[int]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for c, col in enumerate(self.cols):
            for r, v in col.items():
                out[r][c] = v
        return out

    def rows(self) -> Dict[int, Dict[int, int]]:
        out: Dict[int, Dict[int, int]] = {}
        for c, col in enumerate(self.cols):
            for r, v in col.items():
                out.setdefault(r, {})[c] = v
        return out

    def transpose(self) -> "SparseIntMatrix":
        return SparseIntMatrix.from_triples(self.ncols, self.nrows, ((c, r, v) for r, c, v in self.triples()))

    def apply(self, vec: Dict[int, int]) -> Dict[int, int]:
        """Matrix times a sparse column vector."""
        out: Dict[int, int] = {}
        for c, x in vec.items():
            for r, v in self.cols[c].items():
                nv = out.get(r, 0) + x * v
                if nv:
                    out[r] = nv
                else:
                    out.pop(r, None)
        return out

    def is_zero(self) -> bool:
        return all(not c for c in self.cols)


# ----------------------------
# Smith normal form
# ----------------------------

@dataclass
class SmithResult:
    divisors: List[int]
    U: Optional[List[List[int]]] = None
    V: Optional[List[List[int]]] = None

    @property
    def rank(self) -> int:
        return len(self.divisors)

    @property
    def torsion(self) -> List[int]:
        return [d for d in self.divisors if d > 1]


def _dense_snf(a: List[List[int]], track: bool):
    m = len(a)
    n = len(a[0]) if m else 0
    A = [list(row) for row in a]
    U = [[int(i == j) for j in range(m)] for i in range(m)] if track else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if track else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if track:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if track:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def row_op(dst, src, q):  # row dst -= q * row src
        A[dst] = [x - q * y for x, y in zip(A[dst], A[src])]
        if track:
            U[dst] = [x - q * y for x, y in zip(U[dst], U[src])]

    def col_op(dst, src, q):  # col dst -= q * col src
        for row in A:
            row[dst] -= q * row[src]
        if track:
            for row in V:
                row[dst] -= q * row[src]

    diag: List[int] = []
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    row_op(i, t, A[i][t] // A[t][t])
                    if A[i][t]:
                        swap_rows(t, i)
                        clean = False
            for j in range(t + 1, n):
                if A[t][j]:
                    col_op(j, t, A[t][j] // A[t][t])
                    if A[t][j]:
                        swap_cols(t, j)
                        clean = False
            if not clean:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % A[t][t]), None)
            if bad is None:
                break
            row_op(t, bad[0], -1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if track:
                U[t] = [-x for x in U[t]]
        diag.append(A[t][t])
    return diag, U, V


def _sparse_divisors(mat: SparseIntMatrix) -> List[int]:
    """Unit-pivot elimination with a fill-aware pivot choice, dense SNF on what is left."""
    rows = mat.rows()
    cols: Dict[int, Set[int]] = {c: set(col) for c, col in enumerate(mat.cols) if col}
    ones = 0
    pending = sorted(cols, key=lambda c: len(cols[c]))
    while pending:
        stuck = []
        progressed = False
        for c in pending:
            members = cols.get(c)
            if not members:
                continue
            best = None
            for r in members:
                if rows[r][c] in (1, -1) and (best is None or len(rows[r]) < len(rows[best])):
                    best = r
            if best is None:
                stuck.append(c)
                continue
            prow = rows.pop(best)
            u = prow[c]
            for r in list(members):
                if r == best:
                    continue
                row = rows[r]
                factor = row[c] * u
                for j, val in prow.items():
                    nv = row.get(j, 0) - factor * val
                    if nv:
                        if j not in row:
                            cols.setdefault(j, set()).add(r)
                        row[j] = nv
                    elif j in row:
                        del row[j]
                        cols[j].discard(r)
            for j in prow:
                cols[j].discard(best)
            cols.pop(c, None)
            ones += 1
            progressed = True
        if not progressed:
            break
        pending = sorted((c for c in stuck if cols.get(c)), key=lambda c: len(cols[c]))

    live_rows = sorted(r for r, row in rows.items() if row)
    live_cols = sorted(c for c, members in cols.items() if members)
    rest: List[int] = []
    if live_rows and live_cols:
        cpos = {c: k for k, c in enumerate(live_cols)}
        dense = [[0] * len(live_cols) for _ in live_rows]
        for i, r in enumerate(live_rows):
            for c, v in rows[r].items():
                dense[i][cpos[c]] = v
        logger.debug("SNF dense remainder %dx%d", len(live_rows), len(live_cols))
        rest, _, _ = _dense_snf(dense, track=False)
    return [1] * ones + invariant_chain(rest)


def smith_normal_form(m: SparseIntMatrix, with_transforms: bool = False) -> SmithResult:
    """Nonzero diagonal of the Smith form (divisibility chain); U*m*V = D when transforms are asked for."""
    if with_transforms:
        diag, U, V = _dense_snf(m.to_dense(), track=True)
        return SmithResult([abs(d) for d in diag], U, V)
    if m.nnz == 0:
        return SmithResult([])
    return SmithResult(_sparse_divisors(m))


def rank_mod_p(mat: SparseIntMatrix, p: int) -> int:
    if mat.nnz == 0:
        return 0
    if mat.nrows * mat.ncols <= DENSE_RANK_LIMIT:
        return _dense_rank_mod_p(mat, p)
    return _sparse_rank_mod_p(mat, p)


def _dense_rank_mod_p(mat: SparseIntMatrix, p: int) -> int:
    a = np.zeros((mat.nrows, mat.ncols), dtype=np.int64)
    for c, col in enumerate(mat.cols):
        for r, v in col.items():
            a[r, c] = v % p
    if a.shape[1] > a.shape[0]:
        a = np.ascontiguousarray(a.T)
    nrows, ncols = a.shape
    rank = 0
    for c in range(ncols):
        if rank == nrows:
            break
        nz = np.nonzero(a[rank:, c])[0]
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        a[rank] = (a[rank] * pow(int(a[rank, c]), -1, p)) % p
        below = rank + 1 + np.nonzero(a[rank + 1:, c])[0]
        if below.size:
            a[below] = (a[below] - np.outer(a[below, c], a[rank])) % p
        rank += 1
    return rank


def _sparse_rank_mod_p(mat: SparseIntMatrix, p: int) -> int:
    pivots: Dict[int, Dict[int, int]] = {}
    for col in mat.cols:
        vec = {r: v % p for r, v in col.items() if v % p}
        while vec:
            lead = min(vec)
            if lead not in pivots:
                inv = pow(vec[lead], -1, p)
                pivots[lead] = {r: (v * inv) % p for r, v in vec.items()}
                break
            factor = vec[lead]
            for r, v in pivots[lead].items():
                nv = (vec.get(r, 0) - factor * v) % p
                if nv:
                    vec[r] = nv
                else:
                    vec.pop(r, None)
    return len(pivots)


# ----------------------------
# Chain complexes
# ----------------------------

class ChainComplex:
    """bases[d] lists the degree-d basis simplices; boundaries[d]: C_d -> C_{d-1}."""

    def __init__(self, bases: Dict[int, List[Simplex]], boundaries: Dict[int, SparseIntMatrix],
                 name: str = "", verify: bool = True):
        self.bases = bases
        self.boundaries = boundaries
        self.name = name
        if verify:
            self.verify()

    def rank(self, d: int) -> int:
        return len(self.bases.get(d, ()))

    @property
    def degrees(self) -> List[int]:
        return sorted(self.bases)

    def boundary(self, d: int) -> SparseIntMatrix:
        if d in self.boundaries:
            return self.boundaries[d]
        return SparseIntMatrix(self.rank(d - 1), self.rank(d))

    def verify(self) -> None:
        for d in self.degrees:
            inner, outer = self.boundary(d - 1), self.boundary(d)
            for c, col in enumerate(outer.cols):
                if inner.apply(col):
                    raise SimplicialError(f"{self.name}: boundary squared is nonzero at degree {d}, column {c}")


def _boundary_column(simplex: Simplex, face_index: Dict[Simplex, int]) -> Dict[int, int]:
    col: Dict[int, int] = {}
    for i in range(len(simplex)):
        face = simplex[:i] + simplex[i + 1:]
        if face in face_index:
            col[face_index[face]] = -1 if i % 2 else 1
    return col


def chain_complex_of(x: SimplicialComplex, reduced: bool = True, verify: bool = True) -> ChainComplex:
    bases: Dict[int, List[Simplex]] = {d: list(fs) for d, fs in enumerate(x.faces)}
    if reduced:
        bases[-1] = [()]
    boundaries: Dict[int, SparseIntMatrix] = {}
    for d in range(0 if reduced else 1, x.dim + 1):
        lower = bases.get(d - 1, [])
        index = {s: i for i, s in enumerate(lower)}
        boundaries[d] = SparseIntMatrix(len(lower), len(bases[d]),
                                        [_boundary_column(s, index) for s in bases[d]])
    return ChainComplex(bases, boundaries, name=x.name, verify=verify)


def relative_chain_complex(x: SimplicialComplex, a: SimplicialComplex, verify: bool = True) -> ChainComplex:
    """C(X)/C(A); A is matched to X by vertex payloads."""
    if not x.contains_complex(a):
        raise PreconditionError(f"{a.name} is not a subcomplex of {x.name}")
    inside = {x.simplex_of(a.payloads(s)) for s in a.face_set}
    bases = {d: [s for s in fs if s not in inside] for d, fs in enumerate(x.faces)}
    boundaries: Dict[int, SparseIntMatrix] = {}
    for d in range(1, x.dim + 1):
        index = {s: i for i, s in enumerate(bases[d - 1])}
        boundaries[d] = SparseIntMatrix(len(bases[d - 1]), len(bases[d]),
                                        [_boundary_column(s, index) for s in bases[d]])
    return ChainComplex(bases, boundaries, name=f"({x.name},{a.name})", verify=verify)


def homology_of(cc: ChainComplex, coeff: CoefficientDomain = INTEGERS,
                degrees: Optional[Iterable[int]] = None) -> Dict[int, HomologyResult]:
    degrees = cc.degrees if degrees is None else sorted(degrees)
    ranks: Dict[int, int] = {}
    divisors: Dict[int, List[int]] = {}

    def boundary_rank(d: int) -> int:
        if d not in ranks:
            mat = cc.boundary(d)
            if coeff.kind == "Fp":
                ranks[d] = rank_mod_p(mat, coeff.p)
            else:
                divisors[d] = smith_normal_form(mat).divisors
                ranks[d] = len(divisors[d])
        return ranks[d]

    out: Dict[int, HomologyResult] = {}
    for d in degrees:
        free = cc.rank(d) - boundary_rank(d) - boundary_rank(d + 1)
        if coeff.kind == "Fp":
            out[d] = HomologyResult(free)
        else:
            out[d] = coeff.tensor(HomologyResult.from_divisors(free, divisors.get(d + 1, [])))
    return out


def reduced_homology(x: SimplicialComplex, coeff: CoefficientDomain = INTEGERS,
                     degrees: Optional[Iterable[int]] = None) -> Dict[int, HomologyResult]:
    cc = chain_complex_of(x, reduced=True)
    if degrees is None:
        degrees = range(-1, x.dim + 1)
    return homology_of(cc, coeff, degrees)


def relative_homology(x: SimplicialComplex, a: SimplicialComplex, coeff: CoefficientDomain = INTEGERS,
                      degrees: Optional[Iterable[int]] = None) -> Dict[int, HomologyResult]:
    cc = relative_chain_complex(x, a)
    if degrees is None:
        degrees = range(0, x.dim + 1)
    return homology_of(cc, coeff, degrees)


# ----------------------------
# Sphericity / Cohen-Macaulay (homology proxy)
# ----------------------------

def sphericity(x: SimplicialComplex, d: int) -> dict:
    out = {"dim": x.dim, "expected_dim": d, "proxy": HOMOLOGY_PROXY, "passed": False, "failing_degree": None}
    if x.dim != d:
        return out
    homology = reduced_homology(x, INTEGERS, range(-1, d))
    for deg, h in homology.items():
        if not h.is_zero():
            out["failing_degree"] = deg
            out["homology"] = h.to_json()
            return out
    out["passed"] = True
    return out


def verify_spherical(x: SimplicialComplex, d: int) -> bool:
    return sphericity(x, d)["passed"]


def verify_cm(x: SimplicialComplex, d: int) -> dict:
    """d-spherical, and the link of every p-simplex is (d-p-1)-spherical; first failure witnessed."""
    report = {"complex": x.name, "d": d, "proxy": HOMOLOGY_PROXY, "links_checked": 0,
              "passed": False, "first_failure": None}
    top = sphericity(x, d)
    if not top["passed"]:
        report["first_failure"] = {"simplex": None, **top}
        return report
    seen: Dict[frozenset, bool] = {}
    for sigma in x.simplices():
        p = len(sigma) - 1
        lk = link(x, sigma)
        key = frozenset(lk.payload_simplices()) if len(lk) < 64 else None
        if key is not None and key in seen:
            ok = seen[key]
            detail = None
        else:
            detail = sphericity(lk, d - p - 1)
            ok = detail["passed"]
            if key is not None:
                seen[key] = ok
        report["links_checked"] += 1
        if not ok:
            report["first_failure"] = {"simplex": [str(v) for v in x.payloads(sigma)],
                                       **(detail or sphericity(lk, d - p - 1))}
            return report
    report["passed"] = True
    return report


# ----------------------------
# Independent dense oracle
# ----------------------------

def dense_top_homology_rank(x: SimplicialComplex, d: int) -> Tuple[int, Tuple[int, ...]]:
    """Rank and torsion of the reduced H_d computed from scratch with sympy dense matrices.

    The boundary matrices are assembled from the payload simplices directly (not
    from the engine's chain complex) so this serves as a second code path.
    """
    def simplices_of(k: int) -> List[Tuple]:
        if k == -1:
            return [()]
        found = sorted({tuple(sorted(x.index[p] for p in s)) for s in x.payload_simplices()
                        if len(s) == k + 1})
        return found

    def boundary(k: int) -> Matrix:
        high, low = simplices_of(k), simplices_of(k - 1)
        if len(high) * len(low) > DENSE_ORACLE_LIMIT:
            raise GuardExceeded("dense oracle matrix entries", len(high) * len(low), DENSE_ORACLE_LIMIT)
        pos = {s: i for i, s in enumerate(low)}
        mat = [[0] * len(high) for _ in low]
        for j, s in enumerate(high):
            for i, face in enumerate(itertools.combinations(s, k)):
                # combinations(s, k) drops positions from the end first
                dropped = k - i
                mat[pos[face]][j] = (-1) ** dropped
        return Matrix(len(low), len(high), lambda i, j: mat[i][j])

    def nonzero_invariants(m: Matrix) -> List[int]:
        if m.rows == 0 or m.cols == 0:
            return []
        return [abs(int(v)) for v in invariant_factors(m, domain=ZZ) if v != 0]

    inv_d = nonzero_invariants(boundary(d))
    inv_up = nonzero_invariants(boundary(d + 1)) if d + 1 <= x.dim else []
    rank = len(simplices_of(d)) - len(inv_d) - len(inv_up)
    return rank, tuple(sorted(t for t in inv_up if t > 1))
