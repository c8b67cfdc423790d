#!/usr/bin/env python3
# ==============================================================================
# [FILE] functions/group_homology.py
# [PROJECT] StabVerify
# [ROLE] Homology of small finite matrix groups through the normalized bar
#        complex, relative homology of a subgroup inclusion, stability tables
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================
"""
Normalized bar complex with trivial coefficients. A degree-k basis element
[g_1|...|g_k] has every g_i different from the identity and is encoded as a
base-(|G|-1) number whose digits are positions in the non-identity element list.

    d[g_1|...|g_k] = [g_2|...|g_k]
                     + sum_{0<i<k} (-1)^i [g_1|...|g_i g_(i+1)|...|g_k]
                     + (-1)^k [g_1|...|g_(k-1)]

Merged faces whose product is the identity vanish.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from functions.errors import GuardExceeded, PreconditionError
from functions.groups import FiniteMatrixGroup, enumerate_gl
from functions.homology import (
    ChainComplex,
    CoefficientDomain,
    HomologyResult,
    SparseIntMatrix,
    homology_of,
)
from functions.linalg import Matrix, identity
from functions.rings import RingSpec

logger = logging.getLogger(__name__)

BAR_COLUMN_GUARD = 2_000_000
INTEGRAL_ORDER_GUARD = 24
H2_ORDER_GUARD = 60
VERIFY_LIMIT = 200_000
CONSISTENT_VERDICT = "Theorem-A-consistent"
CSV_FIELDS = ("n", "i", "dim_prev", "dim_cur", "dim_rel_i", "dim_rel_next", "verdict")


def bar_estimate(order: int, degree: int) -> int:
    """Columns of the top boundary needed for homology up to `degree`."""
    return (order - 1) ** (degree + 1)


def check_bar_feasible(group: FiniteMatrixGroup, coeff: CoefficientDomain, max_degree: int,
                       guard: int = BAR_COLUMN_GUARD, integral_order: int = INTEGRAL_ORDER_GUARD) -> None:
    estimate = bar_estimate(group.order, max_degree)
    if estimate > guard:
        raise GuardExceeded(f"bar complex of {group.name} to degree {max_degree + 1}", estimate, guard)
    if coeff.kind != "Fp" and group.order > integral_order and max_degree > 0:
        raise GuardExceeded(f"integral bar homology of {group.name}", group.order, integral_order)


class BarComplex:
    """Normalized bar complex of a finite group, degrees 0..top."""

    def __init__(self, group: FiniteMatrixGroup, top: int):
        self.group = group
        self.top = top
        self.table = group.mul_table
        self.ident = group.index[group.identity]
        self.nonid = np.array([i for i in range(group.order) if i != self.ident], dtype=np.int64)
        self.q = len(self.nonid)
        self.pos = np.full(group.order, -1, dtype=np.int64)
        self.pos[self.nonid] = np.arange(self.q)
        self.boundaries: Dict[int, SparseIntMatrix] = {k: self._boundary(k) for k in range(1, top + 1)}

    def size(self, k: int) -> int:
        return self.q ** k if k >= 0 else 0

    def digits(self, k: int) -> np.ndarray:
        codes = np.arange(self.size(k), dtype=np.int64)
        out = np.empty((codes.size, k), dtype=np.int64)
        for i in range(k):
            out[:, i] = (codes // self.q ** (k - 1 - i)) % self.q
        return out

    def _encode(self, digits: np.ndarray) -> np.ndarray:
        code = np.zeros(digits.shape[0], dtype=np.int64)
        for i in range(digits.shape[1]):
            code = code * self.q + digits[:, i]
        return code

    def _boundary(self, k: int) -> SparseIntMatrix:
        d = self.digits(k)
        cols = np.arange(d.shape[0], dtype=np.int64)
        rows_parts, cols_parts, vals_parts = [], [], []

        def emit(face: np.ndarray, which: np.ndarray, sign: int) -> None:
            rows_parts.append(self._encode(face))
            cols_parts.append(which)
            vals_parts.append(np.full(which.size, sign, dtype=np.int64))

        emit(d[:, 1:], cols, 1)
        elems = self.nonid[d] if d.size else d
        for i in range(1, k):
            prod = self.table[elems[:, i - 1], elems[:, i]]
            live = prod != self.ident
            merged = np.concatenate([d[live, :i - 1], self.pos[prod[live]][:, None], d[live, i + 1:]], axis=1)
            emit(merged, cols[live], -1 if i % 2 else 1)
        emit(d[:, :-1], cols, -1 if k % 2 else 1)
        triples = zip(np.concatenate(rows_parts).tolist(), np.concatenate(cols_parts).tolist(),
                      np.concatenate(vals_parts).tolist())
        return SparseIntMatrix.from_triples(self.size(k - 1), self.size(k), triples)

    def chain_complex(self, keep: Optional[Dict[int, np.ndarray]] = None) -> ChainComplex:
        """The full complex, or the quotient spanned by the basis elements flagged in `keep`."""
        verify = sum(self.size(k) for k in range(self.top + 1)) <= VERIFY_LIMIT
        if keep is None:
            bases = {k: [tuple(r) for r in self.digits(k).tolist()] for k in range(self.top + 1)}
            return ChainComplex(bases, dict(self.boundaries), name=f"Bar({self.group.name})", verify=verify)
        renumber = {}
        bases = {}
        for k in range(self.top + 1):
            mask = keep[k]
            new = np.full(mask.size, -1, dtype=np.int64)
            new[mask] = np.arange(int(mask.sum()))
            renumber[k] = new
            bases[k] = [tuple(r) for r in self.digits(k)[mask].tolist()]
        boundaries = {}
        for k, mat in self.boundaries.items():
            rows_new = renumber[k - 1]
            cols = []
            for c in np.nonzero(keep[k])[0].tolist():
                col = {int(rows_new[r]): v for r, v in mat.cols[c].items() if rows_new[r] >= 0}
                cols.append(col)
            boundaries[k] = SparseIntMatrix(len(bases[k - 1]), len(bases[k]), cols)
        return ChainComplex(bases, boundaries, name=f"Bar({self.group.name})/sub", verify=verify)


def bar_homology(group: FiniteMatrixGroup, coeff: CoefficientDomain, max_degree: int,
                 guard: int = BAR_COLUMN_GUARD, integral_order: int = INTEGRAL_ORDER_GUARD) -> Dict[int, HomologyResult]:
    """H_i(G; k) for 0 <= i <= max_degree."""
    if max_degree < 0:
        raise PreconditionError("max_degree must be >= 0")
    check_bar_feasible(group, coeff, max_degree, guard, integral_order)
    bar = BarComplex(group, max_degree + 1)
    out = homology_of(bar.chain_complex(), coeff, range(max_degree + 1))
    logger.info("H_*(%s; %s) = %s", group.name, coeff, {d: str(h) for d, h in out.items()})
    return out


def relative_group_homology(group: FiniteMatrixGroup, sub: FiniteMatrixGroup, coeff: CoefficientDomain,
                            max_degree: int, guard: int = BAR_COLUMN_GUARD,
                            integral_order: int = INTEGRAL_ORDER_GUARD) -> Dict[int, HomologyResult]:
    """H_i(G, H; k) from the quotient of the bar complex of G by the bar complex of H."""
    if not sub.is_subgroup_of(group):
        raise PreconditionError(f"{sub.name} is not a subgroup of {group.name}")
    check_bar_feasible(group, coeff, max_degree, guard, integral_order)
    bar = BarComplex(group, max_degree + 1)
    in_sub = np.zeros(group.order, dtype=bool)
    in_sub[[group.index[g] for g in sub.elements]] = True
    keep = {0: np.zeros(1, dtype=bool)}
    for k in range(1, max_degree + 2):
        d = bar.digits(k)
        keep[k] = ~np.all(in_sub[bar.nonid[d]], axis=1) if d.size else np.zeros(0, dtype=bool)
    out = homology_of(bar.chain_complex(keep), coeff, range(max_degree + 1))
    logger.info("H_*(%s, %s; %s) = %s", group.name, sub.name, coeff, {d: str(h) for d, h in out.items()})
    return out


# ----------------------------
# Stabilization
# ----------------------------

def stabilize(ring: RingSpec, a: Matrix) -> Matrix:
    """A -> diag(A, 1)."""
    n = len(a)
    rows = [tuple(r) + (0,) for r in a]
    rows.append(tuple([0] * n + [ring.one]))
    return tuple(rows)


def stabilized_subgroup(prev: FiniteMatrixGroup, cur: FiniteMatrixGroup) -> FiniteMatrixGroup:
    images = [stabilize(cur.ring, g) for g in prev.elements]
    return FiniteMatrixGroup(cur.ring, cur.n, images, name=f"{prev.name}->{cur.name}")


def trivial_group(ring: RingSpec) -> FiniteMatrixGroup:
    return FiniteMatrixGroup(ring, 0, [identity(ring, 0)], name=f"GL_0({ring.name})")


@dataclass
class StabilityTable:
    ring: str
    coefficient: str
    n_max: int
    i_max: int
    rows: List[dict] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def violations(self) -> List[dict]:
        return [r for r in self.rows if r["verdict"] == "violation"]

    @property
    def verdict(self) -> str:
        return "violation" if self.violations else CONSISTENT_VERDICT

    def to_json(self) -> dict:
        return {"ring": self.ring, "coefficient": self.coefficient, "n_max": self.n_max, "i_max": self.i_max,
                "verdict": self.verdict, "rows": self.rows, "notes": self.notes}

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for r in self.rows:
            writer.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in CSV_FIELDS})
        return buf.getvalue()


def _feasible_degree(group: FiniteMatrixGroup, coeff: CoefficientDomain, want: int, guard: int,
                     integral_order: int, h2_order: int) -> int:
    """Largest degree <= want whose homology fits the guards (-1 if none)."""
    best = -1
    for d in range(want + 1):
        if d >= 2 and group.order > h2_order:
            break
        try:
            check_bar_feasible(group, coeff, d, guard, integral_order)
        except GuardExceeded:
            break
        best = d
    return best


def _dim(h: Optional[HomologyResult]) -> Optional[str]:
    if h is None:
        return None
    return str(h.rank) if not h.torsion else str(h)


def stability_table(ring: RingSpec, n_max: int, i_max: int, coeff: CoefficientDomain,
                    guard: int = BAR_COLUMN_GUARD, integral_order: int = INTEGRAL_ORDER_GUARD,
                    h2_order: int = H2_ORDER_GUARD) -> StabilityTable:
    """Per (n, i): H_i(GL_(n-1)), H_i(GL_n), H_i and H_(i+1) of the pair. A cell is a
    violation when i <= n-1 and the relative H_i is nonzero with 2 invertible."""
    table = StabilityTable(ring.name, str(coeff), n_max, i_max)
    if not coeff.inverts_two:
        table.notes.append("2 is not invertible in the coefficients; nonzero relative cells are flagged, not failed")
    prev = trivial_group(ring)
    prev_h: Dict[int, HomologyResult] = {0: HomologyResult(1)}
    for d in range(1, i_max + 1):
        prev_h[d] = HomologyResult(0)
    for n in range(1, n_max + 1):
        try:
            cur = enumerate_gl(ring, n)
        except GuardExceeded as e:
            table.notes.append(f"GL_{n}: {e}")
            for i in range(i_max + 1):
                table.rows.append({"n": n, "i": i, "verdict": "infeasible"})
            continue
        top = _feasible_degree(cur, coeff, i_max + 1, guard, integral_order, h2_order)
        cur_h = bar_homology(cur, coeff, min(top, i_max), guard, integral_order) if top >= 0 else {}
        rel_h = relative_group_homology(cur, stabilized_subgroup(prev, cur), coeff, top, guard,
                                        integral_order) if top >= 0 else {}
        for i in range(i_max + 1):
            row = {"n": n, "i": i, "dim_prev": _dim(prev_h.get(i)), "dim_cur": _dim(cur_h.get(i)),
                   "dim_rel_i": _dim(rel_h.get(i)), "dim_rel_next": _dim(rel_h.get(i + 1))}
            rel = rel_h.get(i)
            if rel is None:
                row["verdict"] = "infeasible"
            elif i > n - 1:
                row["verdict"] = "outside-range"
            elif rel.is_zero():
                row["verdict"] = CONSISTENT_VERDICT
            elif coeff.inverts_two:
                row["verdict"] = "violation"
            else:
                row["verdict"] = "flagged-2-not-inverted"
            table.rows.append(row)
        prev, prev_h = cur, cur_h
    logger.info("stability table over %s with %s coefficients: %s", ring.name, coeff, table.verdict)
    return table
