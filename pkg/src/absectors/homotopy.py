"""Poset paths, curve approximation and edge-path presentations of pi_1."""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .poset import CausalPoset, PosetError

Letter = tuple  # (generator, +1 | -1)


class PathError(ValueError):
    pass


@dataclass(frozen=True)
class PosetPath:
    """Steps ``(target, source)`` traversed in order; ``start`` anchors empty paths."""

    start: int
    steps: tuple = ()

    def __post_init__(self) -> None:
        steps = tuple((int(t), int(s)) for t, s in self.steps)
        object.__setattr__(self, "steps", steps)
        cur = self.start
        for t, s in steps:
            if s != cur:
                raise PathError("non-composable steps")
            cur = t

    @classmethod
    def trivial(cls, o: int) -> "PosetPath":
        return cls(o, ())

    @classmethod
    def through(cls, diamonds: Sequence[int]) -> "PosetPath":
        """Path visiting the given diamonds in order."""
        ds = list(diamonds)
        return cls(ds[0], tuple(zip(ds[1:], ds[:-1])))

    @property
    def source(self) -> int:
        return self.start

    @property
    def target(self) -> int:
        return self.steps[-1][0] if self.steps else self.start

    @property
    def is_loop(self) -> bool:
        return self.source == self.target

    @property
    def diamonds(self) -> list[int]:
        return [self.start] + [t for t, _ in self.steps]

    def __len__(self) -> int:
        return len(self.steps)

    def __mul__(self, other: "PosetPath") -> "PosetPath":
        return compose_paths(self, other)

    def reverse(self) -> "PosetPath":
        return reverse_path(self)

    def check(self, P: CausalPoset) -> None:
        for t, s in self.steps:
            if t not in P or s not in P or not P.comparable(t, s):
                raise PathError(f"invalid path: step ({t}, {s}) is not a comparable pair")


def compose_paths(p: PosetPath, q: PosetPath) -> PosetPath:
    """p * q: run q first, then p."""
    if q.target != p.source:
        raise PathError("non-composable paths")
    return PosetPath(q.start, q.steps + p.steps)


def reverse_path(p: PosetPath) -> PosetPath:
    return PosetPath(p.target, tuple((s, t) for t, s in reversed(p.steps)))


def approximate_curve(P: CausalPoset, curve: Sequence, closed: bool = False) -> PosetPath:
    """Poset path shadowing a vertex walk in the base complex.

    Each edge v_i v_{i+1} gets the least diamond D_i containing it; consecutive
    D's are linked through the least diamond S_i inside both that holds v_i.
    """
    verts = [v for i, v in enumerate(curve) if i == 0 or v != curve[i - 1]]
    if not verts:
        raise PathError("empty curve")
    if closed and len(verts) > 1 and verts[-1] != verts[0]:
        verts.append(verts[0])
    if closed and len(verts) > 1 and verts[-1] == verts[0] and len(verts) == 2:
        verts = verts[:1]
    for u, v in zip(verts, verts[1:]):
        try:
            P.base.edge_index(u, v)
        except PosetError:
            raise PathError(f"curve vertices {u!r}, {v!r} are not joined by a base edge") from None
    if len(verts) == 1:
        o = P.minimal_containing([verts[0]])
        if o is None:
            raise PathError("cover too coarse")
        return PosetPath.trivial(o)
    big = []
    for u, v in zip(verts, verts[1:]):
        d = P.minimal_containing([u, v])
        if d is None:
            raise PathError(f"cover too coarse: no diamond contains edge {u!r}-{v!r}")
        big.append(d)

    def link(d1, d2, v):
        pool = P.below(d1) | {d1}
        pool = [x for x in pool if P.leq(x, d2)]
        s = P.minimal_containing([v], within=pool)
        if s is None:
            raise PathError(f"cover too coarse at vertex {v!r}")
        return s

    seq = []
    is_closed = closed or verts[0] == verts[-1]
    if is_closed:
        first = link(big[-1], big[0], verts[0])
    else:
        first = link(big[0], big[0], verts[0])
    seq.append(first)
    for i, d in enumerate(big):
        seq.append(d)
        if i + 1 < len(big):
            seq.append(link(d, big[i + 1], verts[i + 1]))
    seq.append(first if is_closed else link(big[-1], big[-1], verts[-1]))
    cleaned = [seq[0]]
    for d in seq[1:]:
        if d != cleaned[-1]:
            cleaned.append(d)
    path = PosetPath.through(cleaned)
    path.check(P)
    return path


def free_reduce(word: Iterable[Letter]) -> tuple:
    out: list = []
    for g, e in word:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def invert_word(word: Sequence[Letter]) -> tuple:
    return tuple((g, -e) for g, e in reversed(word))


def cyclic_reduce(word: Sequence[Letter]) -> tuple:
    w = list(free_reduce(word))
    while len(w) >= 2 and w[0][0] == w[-1][0] and w[0][1] == -w[-1][1]:
        w = w[1:-1]
    return tuple(w)


def word_to_str(word: Sequence[Letter]) -> str:
    if not word:
        return "1"
    return " ".join(f"g{g}" if e == 1 else f"g{g}^-1" for g, e in word)


def abelianize(word: Sequence[Letter], n: int) -> list[int]:
    vec = [0] * n
    for g, e in word:
        vec[g] += e
    return vec


def integer_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over Q of an integer matrix by fraction-free elimination."""
    mat = [list(r) for r in rows if any(r)]
    if not mat:
        return 0
    ncol = len(mat[0])
    rank = 0
    for c in range(ncol):
        piv = next((r for r in range(rank, len(mat)) if mat[r][c] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        p = mat[rank]
        for r in range(len(mat)):
            if r != rank and mat[r][c] != 0:
                f = mat[r][c]
                mat[r] = [p[c] * x - f * y for x, y in zip(mat[r], p)]
        rank += 1
        if rank == len(mat):
            break
    return rank


def _step_letter(P: CausalPoset, index: dict, t: int, s: int):
    if t == s:
        return None
    if P.leq(s, t):
        return (index[(t, s)], 1)
    if P.leq(t, s):
        return (index[(s, t)], -1)
    raise PathError(f"invalid path: step ({t}, {s}) is not a comparable pair")


class _Tietze:
    """Eliminates generators that occur exactly once in some relator."""

    def __init__(self, n: int, trivial: Iterable[int]):
        self.n = n
        self.defs: dict[int, tuple] = {g: () for g in trivial}

    def _fresh(self, g: int) -> bool:
        return all(x not in self.defs for x, _ in self.defs[g])

    def _subst(self, word) -> tuple:
        out: list = []
        for g, e in word:
            if g in self.defs:
                sub = self.defs[g] if e == 1 else invert_word(self.defs[g])
                for letter in sub:
                    if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
                        out.pop()
                    else:
                        out.append(letter)
            elif out and out[-1][0] == g and out[-1][1] == -e:
                out.pop()
            else:
                out.append((g, e))
        return tuple(out)

    def resolve(self, g: int) -> tuple:
        stack = [g]
        while stack:
            x = stack[-1]
            stale = [y for y, _ in self.defs[x] if y in self.defs and not self._fresh(y)]
            if stale:
                stack.extend(stale)
            else:
                self.defs[x] = self._subst(self.defs[x])
                stack.pop()
        return self.defs[g]

    def expand(self, word) -> tuple:
        for g, _ in word:
            if g in self.defs:
                self.resolve(g)
        return self._subst(word)

    def run(self, relators: list) -> list:
        rels = list(relators)
        limit = 3
        while True:
            changed = False
            nxt = []
            order = sorted(range(len(rels)), key=lambda i: (len(rels[i]), i))
            for i in order:
                w = cyclic_reduce(self.expand(rels[i]))
                if not w:
                    continue
                counts = Counter(g for g, _ in w)
                singles = [k for k, (g, _) in enumerate(w) if counts[g] == 1]
                if singles and len(w) <= limit:
                    k = max(singles, key=lambda j: w[j][0])
                    g, e = w[k]
                    rest = w[k + 1:] + w[:k]
                    self.defs[g] = invert_word(rest) if e == 1 else tuple(rest)
                    changed = True
                else:
                    nxt.append(w)
            rels = nxt
            if changed:
                continue
            if not rels or limit > max(len(r) for r in rels):
                break
            limit = max(len(r) for r in rels) if limit >= 8 else limit + 1
        return [cyclic_reduce(self.expand(r)) for r in rels if cyclic_reduce(self.expand(r))]


@dataclass
class Pi1Presentation:
    """Edge-path presentation of the poset's fundamental group at ``base``.

    ``generators`` are non-tree comparability edges (b, a), a ⊂ b; ``relators`` are
    words over them from 2-simplices.  The Tietze-reduced form lives in
    ``free_generators`` / ``residual_relators`` with ``expansion`` mapping every
    comparability edge to a word in the reduced generators.  Words are written in
    composition order: the last step is the leftmost letter.
    """

    poset: CausalPoset
    base: int
    parent: dict
    tree: frozenset
    generators: tuple
    relators: tuple
    free_generators: tuple
    residual_relators: tuple
    expansion: dict
    h1_rank: int
    edge_index: dict = field(repr=False, default_factory=dict)

    @property
    def is_free(self) -> bool:
        return not self.residual_relators

    @property
    def rank(self) -> int:
        return len(self.free_generators)

    def tree_path(self, a: int) -> PosetPath:
        """Tree path base -> a."""
        if a not in self.parent:
            raise PathError(f"no such diamond: {a!r}")
        return tree_path_to(self.parent, a)

    def edge_loop(self, b: int, a: int) -> PosetPath:
        """Tree-closed loop base -> a -> b -> base."""
        return reverse_path(self.tree_path(b)) * PosetPath(a, ((b, a),)) * self.tree_path(a)

    def generator_loop(self, k: int) -> PosetPath:
        """Loop at base whose class is the k-th reduced generator."""
        (b, a), sign = self.free_generators[k]
        loop = self.edge_loop(b, a)
        return loop if sign == 1 else reverse_path(loop)

    def raw_word(self, p: PosetPath) -> tuple:
        letters = []
        for t, s in reversed(p.steps):
            letter = _step_letter(self.poset, self.edge_index, t, s)
            if letter is not None:
                letters.append(letter)
        return tuple(letters)

    def word(self, p: PosetPath) -> tuple:
        """Reduced word of any path, with tree edges erased."""
        out: list = []
        for t, s in reversed(p.steps):
            if t == s:
                continue
            if self.poset.leq(s, t):
                sub = self.expansion[(t, s)]
            elif self.poset.leq(t, s):
                sub = invert_word(self.expansion[(s, t)])
            else:
                raise PathError(f"invalid path: step ({t}, {s}) is not a comparable pair")
            for letter in sub:
                if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
                    out.pop()
                else:
                    out.append(letter)
        return tuple(out)

    def summary(self) -> dict:
        return {
            "base": self.base,
            "generators": len(self.generators),
            "relators": len(self.relators),
            "tree_edges": len(self.tree),
            "free_generators": [
                {"gen": k, "edge": list(e), "sign": s} for k, (e, s) in enumerate(self.free_generators)
            ],
            "residual_relators": [word_to_str(r) for r in self.residual_relators],
            "h1_rank": self.h1_rank,
            "free": self.is_free,
        }


def bfs_parents(P: CausalPoset, root: int) -> dict:
    """Spanning tree of the comparability graph: BFS from root, ascending ids."""
    parent = {root: None}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in P.neighbours(x):
            if y not in parent:
                parent[y] = x
                queue.append(y)
    return parent


def tree_path_to(parent: dict, a: int) -> PosetPath:
    """Path root -> a along a parent map."""
    chain = [a]
    while parent[chain[-1]] is not None:
        chain.append(parent[chain[-1]])
    return PosetPath.through(chain[::-1])


def pi1_presentation(P: CausalPoset, base: int | None = None) -> Pi1Presentation:
    if base is None:
        base = P.ids[0]
    if base not in P:
        raise PathError(f"no such diamond: {base!r}")
    if not P.is_pathwise_connected():
        raise PathError("poset not pathwise connected")
    edges = P.comparability_edges
    index = {e: i for i, e in enumerate(edges)}
    parent = bfs_parents(P, base)
    tree = {(x, y) if P.leq(y, x) else (y, x) for y, x in parent.items() if x is not None}
    generators = tuple(e for e in edges if e not in tree)
    relators = []
    for o, a, c in P.chains:
        # loop o -> a -> c -> o, composition order
        relators.append(((index[(c, o)], -1), (index[(c, a)], 1), (index[(a, o)], 1)))
    tz = _Tietze(len(edges), (index[e] for e in tree))
    residual = tz.run(relators)
    survivors = [i for i in range(len(edges)) if i not in tz.defs]
    provisional = {g: k for k, g in enumerate(survivors)}
    expansion_raw = {}
    for e in edges:
        i = index[e]
        w = tz.expand(((i, 1),))
        expansion_raw[e] = tuple((provisional[g], s) for g, s in w)
    residual = [tuple((provisional[g], s) for g, s in r) for r in residual]
    order, signs = _orient_generators(P, parent, expansion_raw, len(survivors))
    rename = {old: new for new, old in enumerate(order)}

    def recode(w):
        return tuple((rename[g], s * signs[g]) for g, s in w)

    expansion = {e: recode(w) for e, w in expansion_raw.items()}
    residual_t = tuple(recode(r) for r in residual)
    free = tuple((edges[survivors[old]], signs[old]) for old in order)
    rank = len(free) - integer_rank([abelianize(r, len(free)) for r in residual_t])
    return Pi1Presentation(
        poset=P,
        base=base,
        parent=parent,
        tree=frozenset(tree),
        generators=generators,
        relators=tuple(relators),
        free_generators=free,
        residual_relators=residual_t,
        expansion=expansion,
        h1_rank=rank,
        edge_index=index,
    )


def _orient_generators(P, parent, expansion, n):
    """Order and orient reduced generators along the base complex's fundamental cycles."""
    order, signs = [], {g: 1 for g in range(n)}
    for cycle in base_fundamental_cycles(P.base):
        try:
            loop = approximate_curve(P, cycle, closed=True)
        except PathError:
            continue
        w: list = []
        for t, s in reversed(loop.steps):
            sub = expansion[(t, s)] if P.leq(s, t) else invert_word(expansion[(s, t)])
            for letter in sub:
                if w and w[-1][0] == letter[0] and w[-1][1] == -letter[1]:
                    w.pop()
                else:
                    w.append(letter)
        w = cyclic_reduce(w)
        if len(w) == 1 and w[0][0] not in order:
            order.append(w[0][0])
            signs[w[0][0]] = w[0][1]
    order += [g for g in range(n) if g not in order]
    return order, signs


def base_fundamental_cycles(base) -> list[list]:
    """Closed vertex walks: each non-tree edge u->v followed by the tree path back."""
    parent, non_tree = base.spanning_tree()

    def to_root(v):
        out = [v]
        while parent[out[-1]] is not None:
            out.append(parent[out[-1]])
        return out

    cycles = []
    for i in non_tree:
        u, v = base.edges[i]
        up_v, up_u = to_root(v), to_root(u)
        common = set(up_u)
        meet = next(x for x in up_v if x in common)
        back = up_v[: up_v.index(meet) + 1] + up_u[: up_u.index(meet)][::-1]
        cycles.append([u] + back)
    return cycles


def _as_base_loop(pres: Pi1Presentation, p: PosetPath) -> PosetPath:
    if not p.is_loop:
        raise PathError("not a loop at base")
    if p.source == pres.base:
        return p
    t = pres.tree_path(p.source)
    return reverse_path(t) * p * t


def loop_class(pres: Pi1Presentation, p: PosetPath) -> tuple:
    """Reduced word of a loop in the reduced generators (conjugated to base along the tree)."""
    return pres.word(_as_base_loop(pres, p))


def are_homotopic(pres: Pi1Presentation, p: PosetPath, q: PosetPath):
    """True, False, or the string "unknown" when the reduced group is not free."""
    if not p.is_loop or not q.is_loop:
        raise PathError("not a loop at base")
    if p.source != q.source:
        raise PathError("not a loop at base")
    wp, wq = loop_class(pres, p), loop_class(pres, q)
    if wp == wq:
        return True
    if pres.is_free:
        return False
    return "unknown"
