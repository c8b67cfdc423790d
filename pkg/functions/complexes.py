#!/usr/bin/env python3
# ==============================================================================
# [FILE] functions/complexes.py
# [PROJECT] StabVerify
# [ROLE] Simplicial complexes, posets (networkx DAGs), links, joins, order
#        complexes, simplicial / poset maps, complete-join check
# [VERSION] v1.0
# [UPDATED] 2026-10-16
# ==============================================================================

from __future__ import annotations

import itertools
import logging
from functools import cached_property
from typing import Callable, Dict, Hashable, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx

from functions.errors import PreconditionError, SimplicialError

logger = logging.getLogger(__name__)

Simplex = Tuple[int, ...]


def payload_sort_key(p: Hashable):
    """Deterministic order on vertex payloads: vectors, submodules, pairs of them."""
    if hasattr(p, "sort_key"):
        return (1, p.sort_key)
    if isinstance(p, tuple) and p and all(hasattr(x, "sort_key") for x in p):
        return (2, tuple(x.sort_key for x in p))
    if isinstance(p, tuple) and p and all(isinstance(x, tuple) for x in p):
        return (3, tuple(payload_sort_key(x) for x in p))
    return (0, p)


class SimplicialComplex:
    """Downward-closed set of simplices; simplices are sorted vertex-id tuples."""

    def __init__(self, vertices: Sequence[Hashable], faces: Sequence[Iterable[Simplex]],
                 name: str = "", meta: Optional[dict] = None):
        self.vertices: List[Hashable] = list(vertices)
        self.index: Dict[Hashable, int] = {p: i for i, p in enumerate(self.vertices)}
        if len(self.index) != len(self.vertices):
            raise SimplicialError(f"{name}: duplicate vertex payloads")
        self.faces: List[List[Simplex]] = [sorted(set(fs)) for fs in faces]
        while self.faces and not self.faces[-1]:
            self.faces.pop()
        self.face_set: Set[Simplex] = {s for fs in self.faces for s in fs}
        self.name = name
        self.meta: dict = meta or {}

    @classmethod
    def from_simplices(cls, simplices: Iterable[Iterable[Hashable]], name: str = "",
                       vertices: Iterable[Hashable] = (), meta: Optional[dict] = None,
                       sort_key: Callable = payload_sort_key) -> "SimplicialComplex":
        """Build from payload collections (facets suffice); the downward closure is added."""
        simplices = [frozenset(s) for s in simplices]
        payloads = set(vertices)
        for s in simplices:
            payloads |= s
        ordered = sorted(payloads, key=sort_key)
        index = {p: i for i, p in enumerate(ordered)}
        faces: Dict[int, Set[Simplex]] = {}
        for s in simplices:
            ids = tuple(sorted(index[p] for p in s))
            if not ids or ids in faces.get(len(ids) - 1, ()):
                continue
            for k in range(1, len(ids) + 1):
                bucket = faces.setdefault(k - 1, set())
                bucket.update(itertools.combinations(ids, k))
        for p in ordered:
            faces.setdefault(0, set()).add((index[p],))
        top = max(faces) if faces else -1
        return cls(ordered, [faces.get(d, set()) for d in range(top + 1)], name, meta)

    # -- structure ------------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.faces) - 1

    def __len__(self) -> int:
        return len(self.face_set)

    def __contains__(self, simplex: Simplex) -> bool:
        return tuple(simplex) in self.face_set

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SimplicialComplex) and self.payload_simplices() == other.payload_simplices()

    def __hash__(self) -> int:
        return hash(frozenset(self.payload_simplices()))

    def __repr__(self) -> str:
        return f"SimplicialComplex({self.name!r}, f={self.f_vector()})"

    def f_vector(self) -> Tuple[int, ...]:
        return tuple(len(fs) for fs in self.faces)

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * n for d, n in enumerate(self.f_vector()))

    def simplices(self) -> Iterator[Simplex]:
        for fs in self.faces:
            yield from fs

    def payloads(self, simplex: Simplex) -> Tuple[Hashable, ...]:
        return tuple(self.vertices[i] for i in simplex)

    def simplex_of(self, payloads: Iterable[Hashable]) -> Simplex:
        try:
            return tuple(sorted(self.index[p] for p in payloads))
        except KeyError as e:
            raise PreconditionError(f"{self.name}: unknown vertex payload {e.args[0]!r}") from None

    def payload_simplices(self) -> Set[frozenset]:
        return {frozenset(self.payloads(s)) for s in self.face_set}

    @cached_property
    def facets(self) -> List[Simplex]:
        covered: Set[Simplex] = set()
        for d in range(len(self.faces) - 1, 0, -1):
            for s in self.faces[d]:
                covered.update(itertools.combinations(s, d))
        return sorted((s for s in self.face_set if s not in covered), key=lambda s: (len(s), s))

    @cached_property
    def _vertex_facets(self) -> Dict[int, Set[Simplex]]:
        star: Dict[int, Set[Simplex]] = {i: set() for i in range(len(self.vertices))}
        for f in self.facets:
            for v in f:
                star[v].add(f)
        return star

    def verify_closed(self) -> bool:
        for s in self.face_set:
            if len(s) > 1 and any(t not in self.face_set for t in itertools.combinations(s, len(s) - 1)):
                return False
            if any(not 0 <= v < len(self.vertices) for v in s):
                return False
        return True

    def is_pure(self, d: int) -> bool:
        return self.dim == d and all(len(f) == d + 1 for f in self.facets)

    def contains_complex(self, other: "SimplicialComplex") -> bool:
        """Subcomplex test by vertex payloads."""
        for s in other.face_set:
            ids = []
            for p in other.payloads(s):
                if p not in self.index:
                    return False
                ids.append(self.index[p])
            if tuple(sorted(ids)) not in self.face_set:
                return False
        return True


def link(x: SimplicialComplex, sigma: Simplex) -> SimplicialComplex:
    """Link_X(sigma) = {tau : tau and sigma disjoint, tau + sigma in X}."""
    sigma = tuple(sorted(sigma))
    if sigma not in x.face_set:
        raise PreconditionError(f"{x.name}: {sigma} is not a simplex")
    star = set.intersection(*(x._vertex_facets[v] for v in sigma))
    rest = [[x.vertices[v] for v in f if v not in sigma] for f in star]
    return SimplicialComplex.from_simplices([r for r in rest if r], name=f"Lk({x.name},{sigma})")


def join(x: SimplicialComplex, y: SimplicialComplex) -> SimplicialComplex:
    if set(x.index) & set(y.index):
        raise PreconditionError("join: vertex registries collide")
    fx = [x.payloads(f) for f in x.facets] or [()]
    fy = [y.payloads(f) for f in y.facets] or [()]
    facets = [a + b for a in fx for b in fy if a + b]
    return SimplicialComplex.from_simplices(facets, name=f"{x.name}*{y.name}")


def zero_sphere(a: Hashable, b: Hashable, name: str = "S0") -> SimplicialComplex:
    return SimplicialComplex.from_simplices([[a], [b]], name=name)


# ----------------------------
# Posets
# ----------------------------

class Poset:
    """Finite strict partial order; `graph` holds the full relation, `cover` its Hasse diagram."""

    def __init__(self, elements: Sequence[Hashable], less_pairs: Iterable[Tuple[int, int]], name: str = ""):
        self.elements: List[Hashable] = list(elements)
        self.index: Dict[Hashable, int] = {p: i for i, p in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise SimplicialError(f"{name}: duplicate poset elements")
        self.name = name
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.elements)))
        g.add_edges_from(less_pairs)
        if not nx.is_directed_acyclic_graph(g):
            raise SimplicialError(f"{name}: order relation has a cycle")
        closure = nx.transitive_closure_dag(g)
        if closure.number_of_edges() != g.number_of_edges():
            g = closure
        self.graph = g
        self.cover = nx.transitive_reduction(g)

    @classmethod
    def from_relation(cls, elements: Iterable[Hashable], less: Callable[[Hashable, Hashable], bool],
                      name: str = "", sort_key: Callable = payload_sort_key) -> "Poset":
        ordered = sorted(set(elements), key=sort_key)
        pairs = [(i, j) for i, a in enumerate(ordered) for j, b in enumerate(ordered)
                 if i != j and less(a, b)]
        return cls(ordered, pairs, name)

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"Poset({self.name!r}, {len(self)} elements, {self.cover.number_of_edges()} covers)"

    def less(self, i: int, j: int) -> bool:
        return self.graph.has_edge(i, j)

    def covering_relations(self) -> List[Tuple[int, int]]:
        return sorted(self.cover.edges())

    @property
    def dim(self) -> int:
        """Dimension of the order complex (longest chain length minus one)."""
        if not self.elements:
            return -1
        return nx.dag_longest_path_length(self.graph)

    def subposet(self, ids: Iterable[int], name: str = "") -> "Poset":
        ids = sorted(set(ids))
        pos = {old: new for new, old in enumerate(ids)}
        pairs = [(pos[a], pos[b]) for a, b in self.graph.edges() if a in pos and b in pos]
        return Poset([self.elements[i] for i in ids], pairs, name or self.name)

    def upper(self, i: int) -> "Poset":
        return self.subposet(self.graph.successors(i), f"{self.name}>{i}")

    def lower(self, i: int) -> "Poset":
        return self.subposet(self.graph.predecessors(i), f"{self.name}<{i}")

    def interval(self, i: int, j: int) -> "Poset":
        """Open interval (x_i, x_j)."""
        between = set(self.graph.successors(i)) & set(self.graph.predecessors(j))
        return self.subposet(between, f"{self.name}({i},{j})")

    def chains(self) -> Iterator[Tuple[int, ...]]:
        """All nonempty chains, each listed bottom to top."""
        succ = {i: sorted(self.graph.successors(i)) for i in range(len(self.elements))}

        def extend(chain: Tuple[int, ...]):
            yield chain
            for nxt in succ[chain[-1]]:
                yield from extend(chain + (nxt,))

        for i in range(len(self.elements)):
            yield from extend((i,))


def order_complex(p: Poset) -> SimplicialComplex:
    """Simplices are the chains; vertex ids agree with the poset's element ids."""
    faces: Dict[int, Set[Simplex]] = {}
    for chain in p.chains():
        faces.setdefault(len(chain) - 1, set()).add(tuple(sorted(chain)))
    top = max(faces) if faces else -1
    return SimplicialComplex(p.elements, [faces.get(d, set()) for d in range(top + 1)],
                             name=f"|{p.name}|")


def simplex_poset(x: SimplicialComplex, max_dim: Optional[int] = None, name: str = "") -> Poset:
    """Poset of simplices under proper inclusion; elements are payload tuples in vertex-id order."""
    keep = [s for s in sorted(x.face_set, key=lambda s: (len(s), s))
            if max_dim is None or len(s) - 1 <= max_dim]
    pos = {s: i for i, s in enumerate(keep)}
    pairs = []
    for s, i in pos.items():
        for k in range(1, len(s)):
            for t in itertools.combinations(s, k):
                if t in pos:
                    pairs.append((pos[t], i))
    return Poset([x.payloads(s) for s in keep], pairs, name or f"Simp({x.name})")


# ----------------------------
# Maps
# ----------------------------

class PosetMap:
    """Element assignment between posets, checked on construction."""

    def __init__(self, source: Poset, target: Poset, mapping: Sequence[int],
                 reversing: bool = False, name: str = ""):
        if len(mapping) != len(source):
            raise PreconditionError(f"{name}: mapping length does not match the source")
        self.source, self.target = source, target
        self.mapping: List[int] = list(mapping)
        self.reversing = reversing
        self.name = name
        for a, b in source.graph.edges():
            fa, fb = self.mapping[a], self.mapping[b]
            if reversing:
                fa, fb = fb, fa
            if fa != fb and not target.less(fa, fb):
                raise SimplicialError(
                    f"{name}: {source.elements[a]!r} < {source.elements[b]!r} is not respected")

    @classmethod
    def from_function(cls, source: Poset, target: Poset, fn: Callable[[Hashable], Hashable],
                      reversing: bool = False, name: str = "") -> "PosetMap":
        mapping = []
        for e in source.elements:
            image = fn(e)
            if image not in target.index:
                raise SimplicialError(f"{name}: image {image!r} of {e!r} is not in the target")
            mapping.append(target.index[image])
        return cls(source, target, mapping, reversing, name)

    def image(self, i: int) -> Hashable:
        return self.target.elements[self.mapping[i]]

    def is_surjective(self) -> bool:
        return set(self.mapping) == set(range(len(self.target)))

    def is_injective(self) -> bool:
        return len(set(self.mapping)) == len(self.mapping)

    def is_bijective(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def is_isomorphism(self) -> bool:
        """Bijective and the order (or reversed order) is reflected as well as preserved."""
        if not self.is_bijective():
            return False
        expected = self.source.graph.number_of_edges()
        return self.target.graph.number_of_edges() == expected

    def inverse(self) -> "PosetMap":
        if not self.is_bijective():
            raise PreconditionError(f"{self.name}: only bijections have inverses")
        inv = [0] * len(self.mapping)
        for i, j in enumerate(self.mapping):
            inv[j] = i
        return PosetMap(self.target, self.source, inv, self.reversing, f"{self.name}^-1")

    def compose(self, after: "PosetMap") -> "PosetMap":
        """after o self."""
        return PosetMap(self.source, after.target, [after.mapping[j] for j in self.mapping],
                        self.reversing != after.reversing, f"{after.name}o{self.name}")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "source_elements": len(self.source),
            "target_elements": len(self.target),
            "reversing": self.reversing,
            "injective": self.is_injective(),
            "surjective": self.is_surjective(),
            "isomorphism": self.is_isomorphism(),
        }


class SimplicialMap:
    def __init__(self, source: SimplicialComplex, target: SimplicialComplex,
                 mapping: Sequence[int], name: str = ""):
        if len(mapping) != len(source.vertices):
            raise PreconditionError(f"{name}: vertex map length does not match the source")
        self.source, self.target = source, target
        self.mapping: List[int] = list(mapping)
        self.name = name
        for s in source.face_set:
            if self.image(s) not in target.face_set:
                raise SimplicialError(f"{name}: image of {source.payloads(s)!r} is not a simplex")

    @classmethod
    def from_function(cls, source: SimplicialComplex, target: SimplicialComplex,
                      fn: Callable[[Hashable], Hashable], name: str = "") -> "SimplicialMap":
        mapping = []
        for p in source.vertices:
            image = fn(p)
            if image not in target.index:
                raise SimplicialError(f"{name}: vertex image {image!r} is not in the target")
            mapping.append(target.index[image])
        return cls(source, target, mapping, name)

    def image(self, simplex: Simplex) -> Simplex:
        return tuple(sorted({self.mapping[v] for v in simplex}))

    def is_surjective_on_vertices(self) -> bool:
        return set(self.mapping) == set(range(len(self.target.vertices)))

    def is_isomorphism(self) -> bool:
        if sorted(self.mapping) != list(range(len(self.target.vertices))):
            return False
        images = {self.image(s) for s in self.source.face_set}
        return len(images) == len(self.source.face_set) == len(self.target.face_set) and \
            all(len(self.image(s)) == len(s) for s in self.source.face_set)


def complete_join_check(pi: SimplicialMap) -> bool:
    """Injective on simplices, and over every simplex of the base the simplices of the
    source are exactly the transversals of the vertex fibers."""
    if not pi.is_surjective_on_vertices():
        raise PreconditionError(f"{pi.name}: not surjective on vertices")
    fiber_size: Dict[int, int] = {}
    for v in pi.mapping:
        fiber_size[v] = fiber_size.get(v, 0) + 1
    over: Dict[Simplex, int] = {}
    for s in pi.source.face_set:
        img = pi.image(s)
        if len(img) != len(s):
            logger.debug("%s collapses %s", pi.name, pi.source.payloads(s))
            return False
        over[img] = over.get(img, 0) + 1
    for sigma in pi.target.face_set:
        expected = 1
        for v in sigma:
            expected *= fiber_size[v]
        if over.get(sigma, 0) != expected:
            logger.debug("%s: fiber over %s has %d simplices, expected %d",
                         pi.name, pi.target.payloads(sigma), over.get(sigma, 0), expected)
            return False
    return True


def f_vector(x: SimplicialComplex) -> Tuple[int, ...]:
    return x.f_vector()


def is_pure(x: SimplicialComplex, d: int) -> bool:
    return x.is_pure(d)
