"""Finite causal diamond posets over a graph (or 2-complex) base."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Hashable, Iterable, Mapping

Vertex = Hashable


class PosetError(ValueError):
    pass


@dataclass(frozen=True)
class BaseComplex:
    """Vertices, oriented edges ``(u, v)`` and optional triangular faces.

    A face is a triple of edge indices whose edges close up into a cycle.
    """

    vertices: tuple
    edges: tuple
    faces: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        object.__setattr__(self, "faces", tuple(tuple(f) for f in self.faces))
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise PosetError("duplicate vertex ids")
        if not vs:
            raise PosetError("base complex has no vertices")
        for i, e in enumerate(self.edges):
            if len(e) != 2 or e[0] not in vs or e[1] not in vs:
                raise PosetError(f"edge {i} has an undeclared endpoint")
            if e[0] == e[1]:
                raise PosetError(f"edge {i} is a loop")
        for k, f in enumerate(self.faces):
            if len(f) != 3 or any(not 0 <= i < len(self.edges) for i in f):
                raise PosetError(f"face {k} references an unknown edge")
            self.face_boundary(k)
        if len(self.component_of(self.vertices[0], vs)) != len(vs):
            raise PosetError("base complex is not connected")

    @cached_property
    def adjacency(self) -> dict:
        adj: dict = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return {v: tuple(sorted(n)) for v, n in adj.items()}

    @cached_property
    def _edge_lookup(self) -> dict:
        look = {}
        for i, (u, v) in enumerate(self.edges):
            look.setdefault((u, v), (i, 1))
            look.setdefault((v, u), (i, -1))
        return look

    def edge_index(self, u, v) -> tuple[int, int]:
        """Index of an edge joining u and v and the traversal sign (+1 along it)."""
        try:
            return self._edge_lookup[(u, v)]
        except KeyError:
            raise PosetError(f"no base edge joins {u!r} and {v!r}") from None

    def face_boundary(self, k: int) -> list[tuple[int, int]]:
        """Oriented boundary of face k as (edge index, sign) pairs forming a closed walk."""
        idx = list(self.faces[k])
        first = self.edges[idx[0]]
        walk = [(idx[0], 1)]
        cur = first[1]
        rest = idx[1:]
        while rest:
            for j in rest:
                u, v = self.edges[j]
                if u == cur:
                    walk.append((j, 1))
                    cur = v
                    break
                if v == cur:
                    walk.append((j, -1))
                    cur = u
                    break
            else:
                raise PosetError(f"face {k} boundary is not a closed edge cycle")
            rest.remove(j)
        if cur != first[0]:
            raise PosetError(f"face {k} boundary is not a closed edge cycle")
        return walk

    def component_of(self, v, allowed: Iterable) -> set:
        allowed = set(allowed)
        seen = {v}
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for y in self.adjacency[x]:
                if y in allowed and y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    def induced_edges(self, support: Iterable) -> list[int]:
        s = set(support)
        return [i for i, (u, v) in enumerate(self.edges) if u in s and v in s]

    def induced_faces(self, support: Iterable) -> list[int]:
        s = set(support)
        return [
            k for k, f in enumerate(self.faces)
            if all(self.edges[i][0] in s and self.edges[i][1] in s for i in f)
        ]

    def is_connected_subset(self, support: Iterable) -> bool:
        s = set(support)
        if not s:
            return False
        return len(self.component_of(next(iter(sorted(s))), s)) == len(s)

    def is_contractible_subset(self, support: Iterable) -> bool:
        """Connected with vanishing first Betti number of the induced subcomplex."""
        s = sorted(set(support))
        if not self.is_connected_subset(s):
            return False
        cycles = len(self.induced_edges(s)) - len(s) + 1
        if cycles == 0:
            return True
        faces = self.induced_faces(s)
        if not faces:
            return False
        # rank of the face boundary map over Q bounds how many cycles get filled
        import numpy as np

        edges = {e: k for k, e in enumerate(self.induced_edges(s))}
        mat = np.zeros((len(faces), len(edges)))
        for r, f in enumerate(faces):
            for e, sgn in self.face_boundary(f):
                mat[r, edges[e]] += sgn
        return int(np.linalg.matrix_rank(mat)) == cycles

    def spanning_tree(self) -> tuple[dict, list[int]]:
        """BFS tree from the least vertex; returns (parent map, non-tree edge indices)."""
        root = min(self.vertices)
        parent = {root: None}
        tree_edges = set()
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in self.adjacency[x]:
                if y not in parent:
                    parent[y] = x
                    tree_edges.add(self.edge_index(x, y)[0])
                    queue.append(y)
        non_tree = [i for i in range(len(self.edges)) if i not in tree_edges]
        return parent, non_tree

    def tree_walk(self, support: Iterable, start, end) -> list:
        """Vertex walk from start to end inside support (BFS, least ids first)."""
        s = set(support)
        prev = {start: None}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            if x == end:
                break
            for y in self.adjacency[x]:
                if y in s and y not in prev:
                    prev[y] = x
                    queue.append(y)
        if end not in prev:
            raise PosetError(f"{end!r} not reachable from {start!r} inside support")
        walk = [end]
        while walk[-1] != start:
            walk.append(prev[walk[-1]])
        return walk[::-1]


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    witnesses: tuple = ()


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    def add(self, kind: str, message: str, *witnesses) -> None:
        self.violations.append(Violation(kind, message, tuple(witnesses)))

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __len__(self) -> int:
        return len(self.violations)

    def messages(self) -> list[str]:
        return [v.message for v in self.violations]

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"kind": v.kind, "message": v.message, "witnesses": list(v.witnesses)}
                for v in self.violations
            ],
        }


def buffer_disjoint(base: BaseComplex, s1: frozenset, s2: frozenset) -> bool:
    if s1 & s2:
        return False
    return not any(y in s2 for x in s1 for y in base.adjacency[x])


class CausalPoset:
    """Diamonds given by vertex supports, ordered by inclusion.

    ``disjoint`` lists the pairs of ids in the relation; when omitted the buffer
    rule is used (disjoint supports with no base edge between them).
    """

    def __init__(
        self,
        base: BaseComplex,
        supports: Mapping[int, Iterable],
        disjoint: Iterable[tuple[int, int]] | None = None,
    ):
        self.base = base
        self._supports = {int(k): frozenset(v) for k, v in supports.items()}
        self.ids = tuple(sorted(self._supports))
        verts = set(base.vertices)
        for k, s in self._supports.items():
            if not s:
                raise PosetError(f"diamond {k} has empty support")
            if not s <= verts:
                raise PosetError(f"diamond {k} support has undeclared vertices")
        below = {k: set() for k in self.ids}
        for a, b in combinations(self.ids, 2):
            sa, sb = self._supports[a], self._supports[b]
            if sa <= sb:
                below[b].add(a)
            if sb <= sa:
                below[a].add(b)
        self._below = {k: frozenset(v) for k, v in below.items()}
        above = {k: set() for k in self.ids}
        for b, items in below.items():
            for a in items:
                above[a].add(b)
        self._above = {k: frozenset(v) for k, v in above.items()}
        perp = {k: set() for k in self.ids}
        if disjoint is None:
            for a, b in combinations(self.ids, 2):
                if buffer_disjoint(base, self._supports[a], self._supports[b]):
                    perp[a].add(b)
                    perp[b].add(a)
        else:
            for a, b in disjoint:
                a, b = int(a), int(b)
                if a not in perp or b not in perp:
                    raise PosetError(f"disjoint pair ({a}, {b}) names an unknown diamond")
                perp[a].add(b)
                perp[b].add(a)
        self._perp = {k: frozenset(v) for k, v in perp.items()}

    def __contains__(self, o) -> bool:
        return o in self._supports

    def __len__(self) -> int:
        return len(self.ids)

    def _check(self, o) -> None:
        if o not in self._supports:
            raise PosetError(f"no such diamond: {o!r}")

    def support(self, o) -> frozenset:
        self._check(o)
        return self._supports[o]

    def leq(self, a, b) -> bool:
        """a ⊆ b."""
        return a == b or a in self._below[b]

    def comparable(self, a, b) -> bool:
        return a == b or a in self._below[b] or b in self._below[a]

    def perp(self, a, b) -> bool:
        return b in self._perp.get(a, ())

    def below(self, o) -> frozenset:
        return self._below[o]

    def above(self, o) -> frozenset:
        return self._above[o]

    def neighbours(self, o) -> tuple:
        """Diamonds comparable with o (excluding o), ascending."""
        return tuple(sorted(self._below[o] | self._above[o]))

    @cached_property
    def comparability_edges(self) -> tuple:
        """Pairs (b, a) with a strictly below b, sorted."""
        return tuple(sorted((b, a) for b in self.ids for a in self._below[b]))

    @cached_property
    def chains(self) -> tuple:
        """Strict chains (o, a, c) with o ⊂ a ⊂ c."""
        out = []
        for a in self.ids:
            for o in sorted(self._below[a]):
                for c in sorted(self._above[a]):
                    out.append((o, a, c))
        return tuple(sorted(out))

    def perp_pairs(self) -> list[tuple[int, int]]:
        return sorted((a, b) for a in self.ids for b in self._perp[a] if a < b)

    def minimal_containing(self, vertices: Iterable, within: Iterable | None = None):
        """Least (by size, then id) diamond whose support contains the vertices."""
        vs = set(vertices)
        pool = self.ids if within is None else within
        best = None
        for k in pool:
            s = self._supports[k]
            if vs <= s:
                key = (len(s), k)
                if best is None or key < best[0]:
                    best = (key, k)
        return None if best is None else best[1]

    def shortest_path(self, src, dst, allowed: Iterable | None = None) -> list | None:
        """BFS over the comparability graph, ascending ids; returns diamond list."""
        ok = None if allowed is None else set(allowed)
        prev = {src: None}
        queue = deque([src])
        while queue:
            x = queue.popleft()
            if x == dst:
                break
            for y in self.neighbours(x):
                if y not in prev and (ok is None or y in ok):
                    prev[y] = x
                    queue.append(y)
        if dst not in prev:
            return None
        out = [dst]
        while out[-1] != src:
            out.append(prev[out[-1]])
        return out[::-1]

    def is_pathwise_connected(self, subset: Iterable | None = None) -> bool:
        nodes = list(self.ids if subset is None else sorted(set(subset)))
        if not nodes:
            return False
        seen = {nodes[0]}
        allowed = set(nodes)
        queue = deque([nodes[0]])
        while queue:
            x = queue.popleft()
            for y in self.neighbours(x):
                if y in allowed and y not in seen:
                    seen.add(y)
                    queue.append(y)
        return len(seen) == len(nodes)

    def to_cover_dict(self) -> dict:
        return {
            "diamonds": [{"id": k, "support": sorted(self._supports[k])} for k in self.ids],
            "disjoint": [list(p) for p in self.perp_pairs()],
        }


def causal_complement(P: CausalPoset, o) -> frozenset:
    P._check(o)
    return P._perp[o]


def validate_net(P: CausalPoset) -> ValidationReport:
    rep = ValidationReport()
    base = P.base
    seen_support: dict = {}
    for o in P.ids:
        s = P.support(o)
        if s in seen_support:
            rep.add("antisymmetry", f"diamonds {seen_support[s]} and {o} share a support", seen_support[s], o)
        else:
            seen_support[s] = o
        if not base.is_connected_subset(s):
            rep.add("support", f"support of {o} not connected", o)
        elif not base.is_contractible_subset(s):
            rep.add("support", f"support of {o} not simply connected", o)
    for o in P.ids:
        if P.perp(o, o):
            rep.add("irreflexive", f"diamond {o} disjoint from itself", o)
    for a, b in P.perp_pairs():
        if P.comparable(a, b):
            rep.add(
                "perp-comparable",
                f"disjointness/comparability conflict between {a} and {b}", a, b,
            )
    for o in P.ids:
        for a in sorted(causal_complement(P, o)):
            for sub in sorted(P.below(o)):
                if not P.perp(sub, a):
                    rep.add(
                        "heredity",
                        f"disjointness not hereditary: {o} ⊥ {a} but not {sub} ⊥ {a}",
                        o, a, sub,
                    )
    for o in P.ids:
        comp = causal_complement(P, o)
        if not comp:
            rep.add("complement", f"empty causal complement at {o}", o)
        elif not P.is_pathwise_connected(comp):
            rep.add("complement-connected", f"disconnected causal complement at {o}", o)
    covered = set().union(*(P.support(o) for o in P.ids)) if P.ids else set()
    for v in base.vertices:
        if v not in covered:
            rep.add("cover", f"vertex {v} not covered by any diamond", v)
    if P.ids and not P.is_pathwise_connected():
        rep.add("connected", "poset not pathwise connected")
    return rep


def _fixture_complex(kind: str, sizes: tuple[int, ...]) -> BaseComplex:
    if kind == "line":
        (n,) = sizes
        if n < 3:
            raise PosetError("fixture too small for required disjointness")
        return BaseComplex(tuple(range(n)), tuple((i, i + 1) for i in range(n - 1)))
    if kind == "circle":
        (n,) = sizes
        if n < 6:
            raise PosetError("fixture too small for required disjointness")
        return BaseComplex(tuple(range(n)), tuple((i, (i + 1) % n) for i in range(n)))
    if kind == "wedge":
        n1, n2 = sizes
        if n1 < 6 or n2 < 6:
            raise PosetError("fixture too small for required disjointness")
        edges = [(i, (i + 1) % n1) for i in range(n1)]
        second = [0] + list(range(n1, n1 + n2 - 1)) + [0]
        edges += list(zip(second[:-1], second[1:]))
        return BaseComplex(tuple(range(n1 + n2 - 1)), tuple(edges))
    raise PosetError(f"unknown fixture kind {kind!r}")


def _tree_subsets(base: BaseComplex) -> set:
    """Connected proper vertex subsets inducing a contractible subcomplex."""
    n = len(base.vertices)
    found = set()
    frontier = [frozenset([v]) for v in base.vertices]
    found.update(frontier)
    while frontier:
        nxt = []
        for s in frontier:
            for x in s:
                for y in base.adjacency[x]:
                    if y in s:
                        continue
                    t = s | {y}
                    if t in found or len(t) == n:
                        continue
                    if not base.is_contractible_subset(t):
                        continue
                    found.add(t)
                    nxt.append(t)
        frontier = nxt
    return found


def build_net(kind: str, *sizes: int) -> CausalPoset:
    """Fixture nets on line, circle or wedge-of-two-circles graphs.

    Diamonds are the contractible proper connected subsets whose buffer-rule
    complement is nonempty, pruned to a fixpoint.  Ids follow (size, sorted support).
    """
    base = _fixture_complex(kind, tuple(int(s) for s in sizes))
    cands = _tree_subsets(base)
    while True:
        keep = {s for s in cands if any(buffer_disjoint(base, s, t) for t in cands)}
        if keep == cands:
            break
        cands = keep
    ordered = sorted(cands, key=lambda s: (len(s), sorted(s)))
    return CausalPoset(base, {i: s for i, s in enumerate(ordered)})
