#!/usr/bin/env python3
# ==============================================================================
# [FILE] functions/rings.py
# [PROJECT] StabVerify
# [ROLE] Finite unital rings as enumerable element tables (Z/N, F_q, products,
#        upper-triangular matrix rings, opposite rings)
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================
"""
Every ring is materialized once as numpy addition/multiplication tables over
element indices 0..|R|-1 (index 0 is always zero). Hot loops elsewhere use the
plain-list views (`add_t`, `mul_t`, ...) since indexing Python lists is much
faster than indexing numpy arrays element by element.

Element encodings
- Z/N: index = residue.
- F_{p^k}: index = sum c_i p^i for the polynomial sum c_i x^i (so x is index p).
- prod(R_1, ..., R_s): mixed radix, first factor most significant.
- UT<k>(B): entries (i, j), i <= j, row-major, mixed radix over B.
- op(R): same indices as R.
"""

from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from sympy import factorint, isprime

from functions.errors import GuardExceeded, RingSpecError

logger = logging.getLogger(__name__)

DEFAULT_ELEMENT_GUARD = 4096
AXIOM_EXHAUSTIVE_TRIPLES = 2_000_000
AXIOM_SAMPLE_TRIPLES = 200_000
STABLE_RANK_GUARD = 512

# Monic moduli, coefficients from the constant term up. Entries are checked to
# be primitive when the field is built; (p, k) pairs not listed fall back to the
# lexicographically first primitive polynomial.
CONWAY_MODULI: Dict[Tuple[int, int], Tuple[int, ...]] = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (2, 7): (1, 1, 0, 0, 0, 0, 0, 1),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (3, 5): (1, 2, 0, 0, 0, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (7, 2): (3, 6, 1),
    (7, 3): (4, 0, 6, 1),
    (11, 2): (2, 7, 1),
    (13, 2): (2, 12, 1),
}


class RingSpec:
    """A finite unital ring given by its tables. Immutable after construction."""

    def __init__(
        self,
        kind: str,
        name: str,
        params: dict,
        add: np.ndarray,
        mul: np.ndarray,
        one: int,
        labels: Sequence[str],
        inner: Optional["RingSpec"] = None,
    ):
        self.kind = kind
        self.name = name
        self.params = params
        self.add = add
        self.mul = mul
        self.size = int(add.shape[0])
        self.zero = 0
        self.one = int(one)
        self.labels = list(labels)
        self.inner = inner
        self.axiom_mode = "unchecked"

        # list views for scalar-at-a-time loops
        self.add_t: List[List[int]] = add.tolist()
        self.mul_t: List[List[int]] = mul.tolist()
        neg = np.argmax(add == 0, axis=1)
        self.neg_t: List[int] = neg.tolist()

        mask = mul == self.one
        two_sided = mask & mask.T
        unit_mask = two_sided.any(axis=1)
        self.unit_mask: List[bool] = unit_mask.tolist()
        self.units: FrozenSet[int] = frozenset(int(u) for u in np.nonzero(unit_mask)[0])
        inv = np.argmax(two_sided, axis=1)
        self.inv_t: Dict[int, int] = {u: int(inv[u]) for u in self.units}
        self.commutative: bool = bool(np.array_equal(mul, mul.T))

    # -- identity -------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RingSpec) and other.name == self.name

    def __hash__(self) -> int:
        return hash(self.name)

    def __repr__(self) -> str:
        return f"RingSpec({self.name!r}, |R|={self.size})"

    def __reduce__(self):
        # rebuild from the grammar on unpickling (process pool workers)
        return (parse_ring, (self.name,))

    # -- scalars --------------------------------------------------------------

    def elem(self, index: int) -> "RingElem":
        if not 0 <= index < self.size:
            raise RingSpecError(f"element index {index} out of range for {self.name}")
        return RingElem(self, index)

    def elements(self) -> List["RingElem"]:
        return [RingElem(self, i) for i in range(self.size)]

    def sub(self, a: int, b: int) -> int:
        return self.add_t[a][self.neg_t[b]]

    @cached_property
    def nonzero(self) -> List[int]:
        return list(range(1, self.size))

    @cached_property
    def left_ideals(self) -> List[FrozenSet[int]]:
        """Principal left ideals R*a, indexed by a."""
        return [frozenset(int(x) for x in self.mul[:, a]) for a in range(self.size)]

    @cached_property
    def right_ideals(self) -> List[FrozenSet[int]]:
        """Principal right ideals a*R, indexed by a."""
        return [frozenset(int(x) for x in self.mul[a, :]) for a in range(self.size)]

    def to_json(self) -> dict:
        return {
            "spec": self.name,
            "kind": self.kind,
            "parameters": self.params,
            "elements": self.size,
            "commutative": self.commutative,
            "units": len(self.units),
            "axiom_check": self.axiom_mode,
        }


@dataclass(frozen=True)
class RingElem:
    ring: RingSpec
    index: int

    def _coerce(self, other: "RingElem | int") -> int:
        if isinstance(other, RingElem):
            if other.ring != self.ring:
                raise RingSpecError("cannot combine elements of different rings")
            return other.index
        return int(other)

    def __add__(self, other):
        return RingElem(self.ring, self.ring.add_t[self.index][self._coerce(other)])

    def __sub__(self, other):
        return RingElem(self.ring, self.ring.sub(self.index, self._coerce(other)))

    def __mul__(self, other):
        return RingElem(self.ring, self.ring.mul_t[self.index][self._coerce(other)])

    def __neg__(self):
        return RingElem(self.ring, self.ring.neg_t[self.index])

    def is_unit(self) -> bool:
        return self.index in self.ring.units

    def inverse(self) -> "RingElem":
        if self.index not in self.ring.units:
            raise RingSpecError(f"{self} is not a unit")
        return RingElem(self.ring, self.ring.inv_t[self.index])

    def __str__(self) -> str:
        return self.ring.labels[self.index]


# ----------------------------
# Constructors
# ----------------------------

def _guard(size: int, guard: int, what: str) -> None:
    if size > guard:
        raise GuardExceeded(f"ring elements ({what})", size, guard)


def zmod(n: int, guard: int = DEFAULT_ELEMENT_GUARD) -> RingSpec:
    if n < 2:
        raise RingSpecError(f"Z/{n}: N >= 2 required")
    _guard(n, guard, f"Z/{n}")
    a = np.arange(n, dtype=np.int64)
    add = (a[:, None] + a[None, :]) % n
    mul = (a[:, None] * a[None, :]) % n
    return RingSpec("ZmodN", f"Z/{n}", {"N": n}, add, mul, 1 % n, [str(i) for i in range(n)])


def _poly_mulx(coeffs: List[int], modulus: Sequence[int], p: int) -> List[int]:
    """Multiply a reduced polynomial by x modulo a monic modulus."""
    k = len(modulus) - 1
    top = coeffs[k - 1]
    shifted = [0] + coeffs[: k - 1]
    return [(shifted[i] - top * modulus[i]) % p for i in range(k)]


def _is_primitive(modulus: Sequence[int], p: int) -> bool:
    k = len(modulus) - 1
    order = p**k - 1
    cur = [1] + [0] * (k - 1)
    one = list(cur)
    for step in range(1, order + 1):
        cur = _poly_mulx(cur, modulus, p)
        if cur == one:
            return step == order
    return False


def _first_primitive(p: int, k: int) -> Tuple[int, ...]:
    for tail in itertools.product(range(p), repeat=k):
        modulus = tuple(tail) + (1,)
        if modulus[0] != 0 and _is_primitive(modulus, p):
            return modulus
    raise RingSpecError(f"no primitive polynomial found for F_{p}^{k}")


def galois_field(p: int, k: int, guard: int = DEFAULT_ELEMENT_GUARD) -> RingSpec:
    if not isprime(p):
        raise RingSpecError(f"F_q: characteristic {p} is not prime")
    q = p**k
    _guard(q, guard, f"F_{q}")
    if k == 1:
        ring = zmod(p, guard)
        return RingSpec("GaloisField", f"F_{p}", {"p": p, "k": 1, "modulus": [0, 1]},
                        ring.add, ring.mul, 1, ring.labels)

    modulus = CONWAY_MODULI.get((p, k))
    if modulus is None or not _is_primitive(modulus, p):
        if modulus is not None:
            logger.warning("Tabled modulus for F_%d is not primitive; searching", q)
        modulus = _first_primitive(p, k)

    digits = np.array([[(i // p**j) % p for j in range(k)] for i in range(q)], dtype=np.int64)
    weights = np.array([p**j for j in range(k)], dtype=np.int64)
    add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights

    # powers of x give discrete logs of every nonzero element
    exp = np.zeros(q - 1, dtype=np.int64)
    log = np.zeros(q, dtype=np.int64)
    cur = [1] + [0] * (k - 1)
    for e in range(q - 1):
        idx = sum(c * p**j for j, c in enumerate(cur))
        exp[e] = idx
        log[idx] = e
        cur = _poly_mulx(cur, modulus, p)
    mul = np.zeros((q, q), dtype=np.int64)
    nz = np.arange(1, q)
    mul[1:, 1:] = exp[(log[nz][:, None] + log[nz][None, :]) % (q - 1)]

    def label(i: int) -> str:
        terms = []
        for j in reversed(range(k)):
            c = int(digits[i, j])
            if c == 0:
                continue
            mono = "" if j == 0 else ("x" if j == 1 else f"x^{j}")
            terms.append(mono if (c == 1 and j > 0) else f"{c}{mono}")
        return "+".join(terms) or "0"

    return RingSpec("GaloisField", f"F_{q}", {"p": p, "k": k, "modulus": list(modulus)},
                    add, mul, 1, [label(i) for i in range(q)])


def _mixed_radix(parts: np.ndarray, radices: Sequence[int]) -> np.ndarray:
    out = np.zeros(parts.shape[:-1], dtype=np.int64)
    for j, r in enumerate(radices):
        out = out * r + parts[..., j]
    return out


def _digits(size: int, radices: Sequence[int]) -> np.ndarray:
    out = np.zeros((size, len(radices)), dtype=np.int64)
    rest = np.arange(size, dtype=np.int64)
    for j in reversed(range(len(radices))):
        out[:, j] = rest % radices[j]
        rest //= radices[j]
    return out


def product_ring(factors: Sequence[RingSpec], guard: int = DEFAULT_ELEMENT_GUARD) -> RingSpec:
    if len(factors) < 1:
        raise RingSpecError("prod(...) needs at least one factor")
    radices = [f.size for f in factors]
    size = int(np.prod(radices))
    _guard(size, guard, "prod")
    comp = _digits(size, radices)
    add_parts = np.stack(
        [f.add[comp[:, j][:, None], comp[:, j][None, :]] for j, f in enumerate(factors)], axis=-1)
    mul_parts = np.stack(
        [f.mul[comp[:, j][:, None], comp[:, j][None, :]] for j, f in enumerate(factors)], axis=-1)
    one = int(_mixed_radix(np.array([f.one for f in factors]), radices))
    labels = ["(" + ",".join(f.labels[int(c)] for f, c in zip(factors, row)) + ")" for row in comp]
    name = "prod(" + ",".join(f.name for f in factors) + ")"
    return RingSpec("Product", name, {"factors": [f.name for f in factors]},
                    _mixed_radix(add_parts, radices), _mixed_radix(mul_parts, radices), one, labels)


def upper_triangular(k: int, base: RingSpec, guard: int = DEFAULT_ELEMENT_GUARD) -> RingSpec:
    if k < 1:
        raise RingSpecError("UT<k>: k >= 1 required")
    positions = [(i, j) for i in range(k) for j in range(i, k)]
    pos = {p: t for t, p in enumerate(positions)}
    radices = [base.size] * len(positions)
    size = base.size ** len(positions)
    _guard(size, guard, f"UT{k}({base.name})")
    comp = _digits(size, radices)
    A = comp[:, None, :]
    B = comp[None, :, :]
    add_parts = base.add[np.broadcast_to(A, (size, size, len(positions))),
                         np.broadcast_to(B, (size, size, len(positions)))]
    mul_parts = np.zeros((size, size, len(positions)), dtype=np.int64)
    for (i, j), t in pos.items():
        acc = np.zeros((size, size), dtype=np.int64)
        for l in range(i, j + 1):
            term = base.mul[comp[:, pos[(i, l)]][:, None], comp[:, pos[(l, j)]][None, :]]
            acc = base.add[acc, term]
        mul_parts[:, :, t] = acc
    one_parts = np.array([base.one if i == j else 0 for (i, j) in positions])
    one = int(_mixed_radix(one_parts, radices))

    def label(row) -> str:
        rows = []
        for i in range(k):
            rows.append("[" + ",".join(
                base.labels[int(row[pos[(i, j)]])] if j >= i else "0" for j in range(k)) + "]")
        return "[" + ",".join(rows) + "]"

    return RingSpec("UpperTriangular", f"UT{k}({base.name})", {"size": k, "base": base.name},
                    _mixed_radix(add_parts, radices), _mixed_radix(mul_parts, radices), one,
                    [label(r) for r in comp])


def opposite(ring: RingSpec) -> RingSpec:
    """R^op: same elements and addition, multiplication reversed. op(op(R)) is R itself."""
    if ring.kind == "Opposite" and ring.inner is not None:
        return ring.inner
    op = RingSpec("Opposite", f"op({ring.name})", {"inner": ring.name},
                  ring.add, np.ascontiguousarray(ring.mul.T), ring.one, ring.labels, inner=ring)
    op.axiom_mode = ring.axiom_mode
    return op


# ----------------------------
# Grammar
# ----------------------------

def _split_top_level(text: str) -> List[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise RingSpecError(f"unbalanced parentheses in {text!r}")
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise RingSpecError(f"unbalanced parentheses in {text!r}")
    parts.append("".join(cur))
    return parts


def _parse(text: str, guard: int) -> RingSpec:
    if text.startswith("op(") and text.endswith(")"):
        return opposite(_parse(text[3:-1], guard))
    if text.startswith("prod(") and text.endswith(")"):
        return product_ring([_parse(t, guard) for t in _split_top_level(text[5:-1])], guard)
    m = re.fullmatch(r"UT(\d+)\((.*)\)", text)
    if m:
        return upper_triangular(int(m.group(1)), _parse(m.group(2), guard), guard)
    m = re.fullmatch(r"Z/(\d+)", text)
    if m:
        return zmod(int(m.group(1)), guard)
    m = re.fullmatch(r"F_(\d+)", text)
    if m:
        q = int(m.group(1))
        fac = factorint(q)
        if q < 2 or len(fac) != 1:
            raise RingSpecError(f"F_{q}: q is not a prime power")
        (p, k), = fac.items()
        return galois_field(int(p), int(k), guard)
    raise RingSpecError(f"malformed ring spec {text!r}")


_RING_CACHE: Dict[Tuple[str, int], RingSpec] = {}


def parse_ring(spec: str, guard: int = DEFAULT_ELEMENT_GUARD) -> RingSpec:
    """Parse "Z/N" | "F_q" | "prod(...)" | "UT<k>(...)" | "op(...)" and validate the axioms."""
    text = (spec or "").replace(" ", "")
    key = (text, guard)
    if key in _RING_CACHE:
        return _RING_CACHE[key]
    ring = _parse(text, guard)
    failures = check_axioms(ring)
    if failures:
        raise RingSpecError(f"{ring.name}: ring axioms fail: {', '.join(failures)}")
    logger.debug("Ring %s built: %d elements, %d units", ring.name, ring.size, len(ring.units))
    _RING_CACHE[key] = ring
    return ring


# ----------------------------
# Checks
# ----------------------------

def check_axioms(ring: RingSpec, exhaustive_limit: int = AXIOM_EXHAUSTIVE_TRIPLES) -> List[str]:
    """Return the names of failed ring axioms (empty list = valid ring)."""
    s = ring.size
    add, mul = ring.add, ring.mul
    failures: List[str] = []
    if s < 2 or ring.one == ring.zero:
        failures.append("zero != one")

    if s**3 <= exhaustive_limit:
        a, b, c = np.indices((s, s, s)).reshape(3, -1)
        ring.axiom_mode = "exhaustive"
    else:
        rng = np.random.default_rng(0)
        a, b, c = rng.integers(0, s, size=(3, AXIOM_SAMPLE_TRIPLES))
        ring.axiom_mode = f"sampled({AXIOM_SAMPLE_TRIPLES})"

    if not np.array_equal(add[add[a, b], c], add[a, add[b, c]]):
        failures.append("additive associativity")
    if not np.array_equal(add, add.T):
        failures.append("additive commutativity")
    idx = np.arange(s)
    if not np.array_equal(add[idx, 0], idx):
        failures.append("additive identity")
    if not np.all((add == 0).any(axis=1)):
        failures.append("additive inverses")
    if not np.array_equal(mul[mul[a, b], c], mul[a, mul[b, c]]):
        failures.append("multiplicative associativity")
    if not np.array_equal(mul[a, add[b, c]], add[mul[a, b], mul[a, c]]):
        failures.append("left distributivity")
    if not np.array_equal(mul[add[a, b], c], add[mul[a, c], mul[b, c]]):
        failures.append("right distributivity")
    if not (np.array_equal(mul[ring.one, :], idx) and np.array_equal(mul[:, ring.one], idx)):
        failures.append("two-sided identity")
    return failures


def units(ring: RingSpec) -> FrozenSet[int]:
    return ring.units


def check_stable_rank_one(ring: RingSpec, guard: int = STABLE_RANK_GUARD) -> bool:
    """Left stable rank 1: whenever Ra + Rb contains 1, some a + cb is a unit."""
    if ring.size > guard:
        raise GuardExceeded("stable rank scan (ring elements)", ring.size, guard)
    unit = np.array(ring.unit_mask)
    left = [np.unique(ring.mul[:, x]) for x in range(ring.size)]
    for a in range(ring.size):
        for b in range(ring.size):
            if not np.any(ring.add[left[a][:, None], left[b][None, :]] == ring.one):
                continue
            if not np.any(unit[ring.add[a, ring.mul[:, b]]]):
                logger.info("%s fails stable rank 1 at (a, b) = (%d, %d)", ring.name, a, b)
                return False
    return True
