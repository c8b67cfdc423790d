#!/usr/bin/env python3
# ==============================================================================
# [FILE] src/suite.py
# [PROJECT] StabVerify
# [ROLE] Check registry and profile batteries (smoke / desk / extended)
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================
"""
StabVerify — Check battery

Every check is a plain function `params -> witness` registered under a name.
The witness is a JSON-ready dict with a boolean `passed`; a GuardExceeded
raised inside a check turns the record into `infeasible` (see src/report.py).

Batteries live in config/stabverify.yml under `profiles:`. An entry is

    - check: b_equals_u
      anchor: basis-complex-equals-unimodular
      grid: {ring: [F_2, F_3], n: [1, 2, 3]}     # cartesian product
      cases: [{n: 1, m: 1}, {n: 2, m: 1}]        # explicit parameter sets
      params: {guard: 250000}                    # shared by every expansion

Environment
- STABVERIFY_WORKERS: worker processes for independent checks (default 1)
"""

from __future__ import annotations

import itertools
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import yaml
from sympy import Matrix as SymMatrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from functions.builders import (
    COMPLEX_GUARD, ComplexRequest, build, build_basis_complex, check_dual_equivariance,
    coordinate_projection, cutting_down_iso, dual_tits_iso, dualizing_splitting_iso, embed_basis_complex,
    frame_coframe_iso, frame_projection, span_map, verify_fiber_isos,
)
from functions.cache import ComplexCache
from functions.complexes import SimplicialComplex, complete_join_check
from functions.errors import GuardExceeded, PreconditionError, SimplicialError
from functions.group_homology import (
    BAR_COLUMN_GUARD, CONSISTENT_VERDICT, H2_ORDER_GUARD, INTEGRAL_ORDER_GUARD, bar_homology, relative_group_homology,
    stability_table, stabilized_subgroup, trivial_group,
)
from functions.groups import GL_FULL_GUARD, abelianization, enumerate_gl, parse_group, standard_generators
from functions.homology import (
    INTEGERS, CoefficientDomain, HomologyResult, SparseIntMatrix, chain_complex_of, dense_top_homology_rank,
    homology_of, reduced_homology, relative_homology, smith_normal_form, verify_cm,
)
from functions.linalg import check_nested_decomposition, span_submodule, standard_vector
from functions.paths import CONFIG_FILE, WORKERS_ENV
from functions.rings import RingSpec, check_axioms, check_stable_rank_one, opposite, parse_ring
from functions.steinberg import (
    SteinbergLikeModule, enumerate_symbols, module_by_name, negation_witness, transposition_witness,
    verify_apartments_generate, verify_coinvariants_vanish, verify_dual_apartments, verify_relative_generate,
)
from src.report import CheckRecord, VerificationReport, run_check

__app__ = "StabVerify"
__component__ = "suite"
__version__ = "1.0.0"

logger = logging.getLogger(__name__)

PROFILES = ("smoke", "desk", "extended")
NEGATION_SAMPLES = 6
DUAL_APARTMENT_FULL_SCAN = 4096

CheckFn = Callable[[dict], dict]
CHECKS: Dict[str, CheckFn] = {}
Entry = Tuple[str, str, dict]

_CACHE = ComplexCache(None, "off")
_GUARDS: Dict[str, int] = {}


# ----------------------------
# Config / cache plumbing
# ----------------------------

def load_config(path: Path = CONFIG_FILE) -> dict:
    if not path.exists():
        return {}
    with path.open("r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def configure(cache_dir: Optional[Path] = None, cache_mode: str = "off", guards: Optional[dict] = None) -> None:
    """Process-wide cache and guard settings (called again in every worker)."""
    global _CACHE
    _CACHE = ComplexCache(cache_dir, cache_mode)
    _GUARDS.clear()
    _GUARDS.update({k: int(v) for k, v in (guards or {}).items()})


def cache() -> ComplexCache:
    return _CACHE


def guard_value(name: str, default: int) -> int:
    return _GUARDS.get(name, default)


def register(name: str) -> Callable[[CheckFn], CheckFn]:
    def deco(fn: CheckFn) -> CheckFn:
        CHECKS[name] = fn
        return fn
    return deco


def _ring(p: dict) -> RingSpec:
    return parse_ring(str(p.get("ring", "F_2")))


def _guard(p: dict) -> int:
    return int(p.get("guard") or guard_value("complex_simplices", COMPLEX_GUARD))


def _coeff(p: dict, key: str = "coeff", default: str = "half") -> CoefficientDomain:
    return CoefficientDomain.parse(str(p.get(key, default)))


def cached_complex(req: ComplexRequest) -> SimplicialComplex:
    return _CACHE.get_or_build("complex", {**req.params(), "guard": req.guard}, lambda: build(req))


def cached_basis_complex(ring: RingSpec, n: int, m: int, guard: int, compare: bool) -> SimplicialComplex:
    params = {"builder": "Brel" if m else "B", "ring": ring.name, "n": n, "m": m,
              "compare": compare, "guard": guard}
    return _CACHE.get_or_build("basis", params, lambda: build_basis_complex(ring, n, m, guard, compare=compare))


def cached_module(ring: RingSpec, name: str, n: int, m: int = 0, w: Optional[Sequence[Sequence[int]]] = None,
                  guard: int = COMPLEX_GUARD) -> SteinbergLikeModule:
    params = {"module": name, "ring": ring.name, "n": n, "m": m,
              "w": [list(v) for v in w] if w else None, "guard": guard}
    return _CACHE.get_or_build("module", params, lambda: module_by_name(ring, name, n, m, w, guard=guard))


def _hjson(h: Dict[int, HomologyResult]) -> Dict[str, str]:
    return {str(d): str(r) for d, r in sorted(h.items())}


# ----------------------------
# ring-core / linalg
# ----------------------------

@register("ring")
def check_ring(p: dict) -> dict:
    """Axioms, unit set, opposite involution, stable-rank-1 gate."""
    ring = _ring(p)
    failures = check_axioms(ring)
    mul = np.asarray(ring.mul)
    two_sided = {a for a in range(ring.size)
                 if np.any((mul[a, :] == ring.one) & (mul[:, a] == ring.one))}
    double = opposite(opposite(ring))
    involution = np.array_equal(np.asarray(double.add), np.asarray(ring.add)) and \
        np.array_equal(np.asarray(double.mul), mul)
    try:
        stable_rank_one = check_stable_rank_one(ring)
    except GuardExceeded:
        stable_rank_one = None
    units_ok = two_sided == set(ring.units)
    return {"ring": ring.to_json(), "axiom_failures": failures, "units_match": units_ok,
            "opposite_involution": involution, "stable_rank_one": stable_rank_one,
            "passed": not failures and units_ok and involution}


@register("nested_decomposition")
def check_nested(p: dict) -> dict:
    """R^3 = <e1> + <e2,e3> = <e1,e2> + <e3>."""
    ring = _ring(p)
    e = [standard_vector(ring, 3, i) for i in range(3)]

    def sub(*vs):
        return span_submodule(ring, list(vs), 3, witness=list(vs))

    result = check_nested_decomposition(sub(e[0]), sub(e[1], e[2]), sub(e[0], e[1]), sub(e[2]))
    return {**result, "passed": all(result.values())}


# ----------------------------
# builders
# ----------------------------

def _submodule(ring: RingSpec, rows, n: int):
    rows = [tuple(r) for r in rows]
    return span_submodule(ring, rows, n) if rows else None


def request_from(p: dict) -> ComplexRequest:
    ring, n, m = _ring(p), int(p["n"]), int(p.get("m", 0))
    kind = str(p.get("builder", "B"))
    ambient = n + m if kind in ("Brel", "BX", "Trel") else n
    gamma = tuple(tuple(g) for g in p.get("gamma") or ())
    return ComplexRequest(ring, kind, n, m, gamma, _submodule(ring, p.get("v") or (), ambient),
                          _submodule(ring, p.get("w") or (), ambient), _guard(p))


@register("build")
def check_build(p: dict) -> dict:
    req = request_from(p)
    x = cached_complex(req)
    return {"request": req.params(), "complex": x.name, "vertices": len(x.vertices), "dim": x.dim,
            "f_vector": list(x.f_vector()), "euler_characteristic": x.euler_characteristic(),
            "meta": {k: v for k, v in x.meta.items() if isinstance(v, (int, str, bool, list, type(None)))},
            "passed": x.verify_closed()}


@register("homology")
def check_homology(p: dict) -> dict:
    """Reduced homology of a built complex, or homology relative to Brel / B for BX."""
    req = request_from(p)
    x = cached_complex(req)
    coeff = _coeff(p, default="Z")
    relative = p.get("relative_to")
    if relative == "Brel":
        h = relative_homology(x, cached_basis_complex(req.ring, req.n, req.m, req.guard, compare=False), coeff)
    elif relative == "B":
        h = relative_homology(x, embed_basis_complex(req.ring, req.n, req.m, req.guard), coeff)
    elif relative:
        raise PreconditionError(f"relative_to must be Brel or B, got {relative!r}")
    else:
        h = reduced_homology(x, coeff)
    return {"complex": x.name, "coefficient": str(coeff), "relative_to": relative,
            "f_vector": list(x.f_vector()), "homology": _hjson(h), "passed": True}


@register("b_equals_u")
def check_b_equals_u(p: dict) -> dict:
    ring, n, m = _ring(p), int(p["n"]), int(p.get("m", 0))
    x = cached_basis_complex(ring, n, m, _guard(p), compare=True)
    return {"complex": x.name, "f_vector": list(x.f_vector()), "eligible": x.meta.get("eligible"),
            "bases": x.meta.get("bases"), "passed": bool(x.meta.get("b_equals_u"))}


@register("cm_basis")
def check_cm_basis(p: dict) -> dict:
    ring, n, m = _ring(p), int(p["n"]), int(p.get("m", 0))
    x = cached_basis_complex(ring, n, m, _guard(p), compare=False)
    return verify_cm(x, n - 1)


@register("cm_tits")
def check_cm_tits(p: dict) -> dict:
    ring, n, m = _ring(p), int(p["n"]), int(p.get("m", 0))
    req = ComplexRequest(ring, "Trel" if m else "T", n, m, guard=_guard(p))
    return verify_cm(cached_complex(req), n - 1 if m else n - 2)


@register("bx_negative")
def check_bx_negative(p: dict) -> dict:
    """The relative vanishing range is sharp: reduced H_1 of BX^1_2 is nonzero."""
    ring, n, m = _ring(p), int(p.get("n", 2)), int(p.get("m", 1))
    x = cached_complex(ComplexRequest(ring, "BX", n, m, guard=_guard(p)))
    degree = int(p.get("degree", n - 1))
    h = reduced_homology(x, INTEGERS, [degree])[degree]
    return {"complex": x.name, "f_vector": list(x.f_vector()), "degree": degree, "homology": str(h),
            "externally_additive": x.meta.get("externally_additive"), "passed": not h.is_zero()}


@register("relative_vanishing")
def check_relative_vanishing(p: dict) -> dict:
    """H_k(BX^m_n, A) = 0 for k < n, A = B^m_n (base Brel) or the embedded B_n (base B)."""
    ring, n, m, guard = _ring(p), int(p["n"]), int(p["m"]), _guard(p)
    base = str(p.get("base", "Brel"))
    x = cached_complex(ComplexRequest(ring, "BX", n, m, guard=guard))
    if base == "Brel":
        a = cached_basis_complex(ring, n, m, guard, compare=False)
    elif base == "B":
        a = _CACHE.get_or_build("embedded", {"ring": ring.name, "n": n, "m": m, "guard": guard},
                                lambda: embed_basis_complex(ring, n, m, guard))
    else:
        raise PreconditionError(f"relative_vanishing base must be Brel or B, got {base!r}")
    h = relative_homology(x, a, INTEGERS, range(0, n))
    return {"pair": f"({x.name}, {a.name})", "homology": _hjson(h),
            "passed": all(r.is_zero() for r in h.values())}


@register("fiber_isos")
def check_fiber_isos(p: dict) -> dict:
    return verify_fiber_isos(_ring(p), int(p["n"]), int(p.get("m", 0)), _guard(p))


@register("span_map")
def check_span_map(p: dict) -> dict:
    pm = span_map(_ring(p), int(p["n"]), int(p.get("m", 0)), _guard(p))
    return {**pm.to_json(), "passed": pm.is_surjective()}


@register("complete_join")
def check_complete_join(p: dict) -> dict:
    """Vector -> line onto frames, and dropping the fixed coordinates, are complete joins."""
    ring, n, m, guard = _ring(p), int(p["n"]), int(p.get("m", 1)), _guard(p)
    frames = complete_join_check(frame_projection(ring, n, guard))
    coords = complete_join_check(coordinate_projection(ring, n, m, guard))
    return {"frame_projection": frames, "coordinate_projection": coords, "passed": frames and coords}


# ----------------------------
# Duality
# ----------------------------

def _equivariance_matrices(ring: RingSpec, n: int):
    if ring.size ** (n * n) <= DUAL_APARTMENT_FULL_SCAN:
        return enumerate_gl(ring, n).elements
    return standard_generators(ring, n)


@register("duality")
def check_duality(p: dict) -> dict:
    ring, n, guard = _ring(p), int(p["n"]), _guard(p)
    iso = dual_tits_iso(ring, n, guard)
    equivariance = check_dual_equivariance(iso, ring, standard_generators(ring, n))
    frames = frame_coframe_iso(ring, n, guard)
    out = {"dual_tits": iso.to_json(), "equivariance": equivariance,
           "frame_coframe": {"name": frames.name, "vertices": len(frames.source.vertices),
                             "isomorphism": frames.is_isomorphism()}}
    passed = iso.is_isomorphism() and equivariance["passed"] and frames.is_isomorphism()
    if n >= 2:
        out["dual_apartments"] = verify_dual_apartments(ring, n, guard, _equivariance_matrices(ring, n))
        passed = passed and out["dual_apartments"]["passed"]
    out["passed"] = passed
    return out


@register("cutting_down")
def check_cutting_down(p: dict) -> dict:
    """V = <e1>, W = <e3>, C = <e1, e2> in R^3."""
    ring = _ring(p)
    e = [standard_vector(ring, 3, i) for i in range(3)]
    v = span_submodule(ring, [e[0]], 3, witness=[e[0]])
    w = span_submodule(ring, [e[2]], 3, witness=[e[2]])
    c = span_submodule(ring, [e[0], e[1]], 3, witness=[e[0], e[1]])
    return cutting_down_iso(v, w, c, _guard(p))


@register("dualizing_splitting")
def check_dualizing_splitting(p: dict) -> dict:
    """V = <e1> inside C = <e1, .., e_c> of R^n; c defaults to n."""
    ring, n = _ring(p), int(p.get("n", 2))
    k = int(p.get("c", n))
    if not 1 <= k <= n:
        raise PreconditionError(f"dualizing_splitting: c = {k} must lie in 1..{n}")
    e = [standard_vector(ring, n, i) for i in range(k)]
    v = span_submodule(ring, e[:1], n, witness=e[:1])
    c = span_submodule(ring, e, n, witness=e)
    out = dualizing_splitting_iso(v, c, _guard(p))
    out["ambient_rank"] = k
    return out


# ----------------------------
# Steinberg modules
# ----------------------------

@register("steinberg_rank")
def check_steinberg_rank(p: dict) -> dict:
    """Module rank from the cycle lattice against the dense sympy oracle."""
    ring, n, m = _ring(p), int(p["n"]), int(p.get("m", 0))
    st = cached_module(ring, "St", n, m, guard=_guard(p))
    oracle_rank, torsion = dense_top_homology_rank(st.complex, st.degree)
    expected = p.get("expected")
    out = {**st.to_json(), "rank": st.rank, "oracle_rank": oracle_rank, "oracle_torsion": list(torsion),
           "expected": expected}
    out["passed"] = st.rank == oracle_rank and not torsion and (expected is None or st.rank == int(expected))
    return out


@register("apartments_generate")
def check_apartments(p: dict) -> dict:
    ring, n = _ring(p), int(p["n"])
    return verify_apartments_generate(ring, n, st=cached_module(ring, "St", n, guard=_guard(p)))


@register("relative_generate")
def check_relative_generate(p: dict) -> dict:
    ring, n, m, guard = _ring(p), int(p["n"]), int(p["m"]), _guard(p)
    st = cached_module(ring, "St", n, m, guard=guard)
    return verify_relative_generate(ring, n, m, st=st, guard=guard)


@register("negation")
def check_negation(p: dict) -> dict:
    ring, n, m, guard = _ring(p), int(p["n"]), int(p.get("m", 0)), _guard(p)
    count = int(p.get("samples", NEGATION_SAMPLES))
    st = cached_module(ring, "St", n, m, guard=guard)
    if m == 0:
        witnesses = [transposition_witness(st, mat) for mat in st.group.elements[:count]]
    else:
        witnesses = [negation_witness(st, s) for s in enumerate_symbols(ring, n, m, guard=guard)[:count]]
    return {"module": st.label, "witnesses": witnesses, "passed": bool(witnesses) and all(w["passed"] for w in witnesses)}


@register("coinvariants")
def check_coinvariants(p: dict) -> dict:
    ring, n, m = _ring(p), int(p["n"]), int(p.get("m", 0))
    name = str(p.get("module", "St"))
    st = cached_module(ring, name, n, m, p.get("w"), guard=_guard(p))
    out = verify_coinvariants_vanish(st, _coeff(p))
    expected = p.get("expected_integral")
    if expected is not None:
        out["expected_integral"] = str(expected)
        out["passed"] = out["passed"] and out["integral_text"] == str(expected)
    return out


# ----------------------------
# Group homology
# ----------------------------

def _bar_guards() -> Tuple[int, int]:
    return (guard_value("bar_columns", BAR_COLUMN_GUARD),
            guard_value("integral_bar_group_order", INTEGRAL_ORDER_GUARD))


@register("coefficient_necessity")
def check_coefficient_necessity(p: dict) -> dict:
    """H_1(GL_2, GL_1; Z) != 0 while the F_3 (2 inverted) version vanishes."""
    ring, n = _ring(p), int(p.get("n", 2))
    degree = int(p.get("degree", n - 1))
    columns, integral_order = _bar_guards()
    cur = enumerate_gl(ring, n, guard_value("gl_full_enumeration", GL_FULL_GUARD))
    prev = enumerate_gl(ring, n - 1) if n > 1 else trivial_group(ring)
    sub = stabilized_subgroup(prev, cur)
    control = _coeff(p, "control", "Fp:3")
    integral = relative_group_homology(cur, sub, INTEGERS, degree, columns, integral_order)[degree]
    tamed = relative_group_homology(cur, sub, control, degree, columns, integral_order)[degree]
    return {"pair": sub.name, "degree": degree, "integral": str(integral), "control": str(control),
            "control_homology": str(tamed), "passed": not integral.is_zero() and tamed.is_zero()}


@register("stability")
def check_stability(p: dict) -> dict:
    ring, coeff = _ring(p), _coeff(p)
    columns, integral_order = _bar_guards()
    table = stability_table(ring, int(p.get("n_max", 3)), int(p.get("i_max", 2)), coeff, columns,
                            integral_order, guard_value("h2_group_order", H2_ORDER_GUARD))
    return {**table.to_json(), "csv": table.to_csv(), "passed": table.verdict == CONSISTENT_VERDICT}


@register("group_order")
def check_group_order(p: dict) -> dict:
    group = parse_group(str(p["group"]), guard_value("gl_full_enumeration", GL_FULL_GUARD))
    expected = int(p["expected"])
    return {**group.to_json(), "expected": expected, "closed": group.is_closed(),
            "passed": group.order == expected and group.is_closed()}


@register("h1_abelianization")
def check_h1_abelianization(p: dict) -> dict:
    """Bar-complex H_1(G; Z) against G/[G, G] from the coset graph."""
    group = parse_group(str(p["group"]), guard_value("gl_full_enumeration", GL_FULL_GUARD))
    columns, integral_order = _bar_guards()
    h1 = bar_homology(group, INTEGERS, 1, columns, integral_order)[1]
    ab = abelianization(group)
    return {"group": group.name, "bar_h1": str(h1), "abelianization": str(ab), "passed": h1 == ab}


# ----------------------------
# Engine self-checks
# ----------------------------

def _determinantal_divisors(rows: List[List[int]]) -> List[int]:
    """D_k = gcd of all k x k minors, for k = 1 .. min(dims)."""
    mat = SymMatrix(rows)
    out = []
    for k in range(1, min(mat.rows, mat.cols) + 1):
        g = 0
        for rs in itertools.combinations(range(mat.rows), k):
            for cs in itertools.combinations(range(mat.cols), k):
                g = math.gcd(g, int(mat.extract(list(rs), list(cs)).det()))
        out.append(g)
    return out


def _minors_agree(divisors: List[int], determinantal: List[int]) -> bool:
    prod = 1
    for k, dk in enumerate(determinantal):
        if k < len(divisors):
            prod *= divisors[k]
            if dk != prod:
                return False
        elif dk != 0:
            return False
    return True


@register("engine_selfcheck")
def check_engine(p: dict) -> dict:
    """Sparse SNF against sympy invariant factors; small cases also against gcd-of-minors."""
    rng = np.random.default_rng(int(p.get("seed", 0)))
    count, max_dim = int(p.get("count", 500)), int(p.get("max_dim", 8))
    max_entry, minors_dim = int(p.get("max_entry", 10)), int(p.get("minors_dim", 4))
    failures, minors_checked = [], 0
    for t in range(count):
        r, c = (int(x) for x in rng.integers(1, max_dim + 1, size=2))
        rows = rng.integers(-max_entry, max_entry + 1, size=(r, c)).tolist()
        ours = sorted(abs(int(d)) for d in smith_normal_form(SparseIntMatrix.from_dense(rows)).divisors)
        ref = sorted(abs(int(v)) for v in invariant_factors(SymMatrix(rows), domain=ZZ) if v != 0)
        ok = ours == ref
        if ok and max(r, c) <= minors_dim:
            minors_checked += 1
            ok = _minors_agree(ours, _determinantal_divisors(rows))
        if not ok:
            failures.append({"trial": t, "matrix": rows, "ours": ours, "reference": ref})
    return {"matrices": count, "minors_checked": minors_checked, "failures": failures[:3],
            "passed": not failures}


def _torsion_count(h: Optional[HomologyResult], prime: int) -> int:
    return 0 if h is None else sum(1 for t in h.torsion if t % prime == 0)


@register("euler_betti")
def check_euler_betti(p: dict) -> dict:
    """d o d = 0, reduced Euler characteristic = alternating Betti sum, and the
    universal-coefficient count dim H_i(F_p) = rank H_i + t_p(H_i) + t_p(H_(i-1))."""
    ring = _ring(p)
    req = ComplexRequest(ring, str(p["builder"]), int(p["n"]), int(p.get("m", 0)), guard=_guard(p))
    x = cached_complex(req)
    try:
        cc = chain_complex_of(x, reduced=True, verify=True)
    except SimplicialError as e:
        return {"complex": x.name, "boundary_squared_zero": False, "error": str(e), "passed": False}
    h = homology_of(cc, INTEGERS)
    alternating = sum((-1) ** d * r.rank for d, r in h.items())
    euler_ok = x.euler_characteristic() - 1 == alternating
    uct = {}
    for prime in p.get("primes", [2, 3]):
        hp = homology_of(cc, CoefficientDomain("Fp", int(prime)))
        uct[str(prime)] = all(hp[d].rank == h[d].rank + _torsion_count(h[d], prime)
                              + _torsion_count(h.get(d - 1), prime) for d in h)
    return {"complex": x.name, "f_vector": list(x.f_vector()), "boundary_squared_zero": True,
            "reduced_euler": x.euler_characteristic() - 1, "alternating_betti": alternating,
            "homology": _hjson(h), "uct": uct, "passed": euler_ok and all(uct.values())}


# ----------------------------
# Batteries
# ----------------------------

def expand_entry(entry: dict) -> List[Entry]:
    name = entry.get("check")
    if name not in CHECKS:
        raise PreconditionError(f"unknown check {name!r} in battery")
    anchor = str(entry.get("anchor", "plumbing"))
    shared = dict(entry.get("params") or {})
    cases = list(entry.get("cases") or [{}])
    grid = entry.get("grid") or {}
    keys = sorted(grid)
    combos = [dict(zip(keys, values)) for values in itertools.product(*(grid[k] for k in keys))] or [{}]
    return [(name, anchor, {**shared, **case, **combo}) for case in cases for combo in combos]


def battery(profile: str, cfg: Optional[dict] = None) -> List[Entry]:
    cfg = load_config() if cfg is None else cfg
    profiles = cfg.get("profiles") or {}
    if profile not in PROFILES or profile not in profiles:
        raise PreconditionError(f"unknown profile {profile!r}; expected one of {', '.join(PROFILES)}")
    out: List[Entry] = []
    for entry in profiles[profile].get("include") or []:
        out.extend(battery(entry, cfg))
    for entry in profiles[profile].get("checks") or []:
        out.extend(expand_entry(entry))
    return out


def record_name(name: str, params: dict) -> str:
    shown = ",".join(f"{k}={params[k]}" for k in sorted(params) if k != "guard")
    return f"{name}[{shown}]" if shown else name


def run_entry(entry: Entry) -> CheckRecord:
    name, anchor, params = entry
    fn = CHECKS[name]
    logger.info("check %s", record_name(name, params))
    record = run_check(record_name(name, params), anchor, lambda: fn(params))
    logger.info("check %s: %s (%.2fs)", record.name, record.status, record.wall_time_sec)
    return record


def _init_worker(cache_dir: Optional[Path], cache_mode: str, guards: dict, level: int) -> None:
    logging.basicConfig(level=level, format="%(asctime)s - %(levelname)s - %(message)s")
    configure(cache_dir, cache_mode, guards)


def workers_from_env(flag: Optional[int]) -> int:
    env = os.getenv(WORKERS_ENV, "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            logger.warning("%s=%r is not an integer; ignored", WORKERS_ENV, env)
    return max(1, int(flag or 1))


def run_battery(entries: Sequence[Entry], workers: int = 1) -> List[CheckRecord]:
    """Records come back in battery order whatever the worker count."""
    if workers <= 1 or len(entries) <= 1:
        return [run_entry(e) for e in entries]
    init = (_CACHE.directory, _CACHE.mode, dict(_GUARDS), logging.getLogger().level)
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=init) as pool:
        return list(pool.map(run_entry, entries))


def attach_tables(report: VerificationReport) -> None:
    """Move CSV text out of witnesses into report tables (written next to the JSON)."""
    for i, record in enumerate(report.records):
        text = record.witness.pop("csv", None)
        if text is None:
            continue
        label = record.witness.get("coefficient", str(i)).replace(":", "")
        key = f"stability-{record.witness.get('ring', '')}-{label}".replace("/", "")
        report.tables[key] = text


def suite(profile: str, workers: int = 1, cfg: Optional[dict] = None) -> VerificationReport:
    entries = battery(profile, cfg)
    logger.info("suite %s: %d checks, %d worker(s)", profile, len(entries), workers)
    report = VerificationReport(f"suite:{profile}")
    report.extend(run_battery(entries, workers))
    attach_tables(report)
    return report
