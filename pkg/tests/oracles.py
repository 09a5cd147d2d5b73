"""Independent reference computations used to check the package.

Nothing here calls into the routes it is meant to check: fixtures are enumerated
by brute force over all vertex subsets, Betti numbers come from sparse modular
elimination of the full order complex, loop words are read off base curves, and
field words are evaluated in a concrete matrix representation.
"""

from __future__ import annotations

from functools import reduce
from itertools import combinations

import numpy as np

PRIME = 2_147_483_647


def fixture_graph(kind, *sizes):
    if kind == "line":
        (n,) = sizes
        return list(range(n)), [(i, i + 1) for i in range(n - 1)]
    if kind == "circle":
        (n,) = sizes
        return list(range(n)), [(i, (i + 1) % n) for i in range(n)]
    n1, n2 = sizes
    edges = [(i, (i + 1) % n1) for i in range(n1)]
    ring = [0] + list(range(n1, n1 + n2 - 1)) + [0]
    edges += list(zip(ring, ring[1:]))
    return list(range(n1 + n2 - 1)), edges


def brute_force_diamonds(kind, *sizes) -> set:
    verts, edges = fixture_graph(kind, *sizes)
    adj = {v: set() for v in verts}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)

    def connected(s):
        s = set(s)
        start = next(iter(s))
        seen, stack = {start}, [start]
        while stack:
            x = stack.pop()
            for y in adj[x] & s - seen:
                seen.add(y)
                stack.append(y)
        return seen == s

    cands = set()
    for r in range(1, len(verts)):
        for sub in combinations(verts, r):
            s = frozenset(sub)
            inner = sum(1 for u, v in edges if u in s and v in s)
            if inner == len(s) - 1 and connected(s):
                cands.add(s)

    def apart(s, t):
        return not (s & t) and not any(adj[x] & t for x in s)

    while True:
        keep = {s for s in cands if any(apart(s, t) for t in cands)}
        if keep == cands:
            return cands
        cands = keep


def _rank_mod_p(rows, p=PRIME) -> int:
    """Rank of a sparse matrix given as dict rows, by elimination mod p."""
    pivots: dict[int, dict] = {}
    for row in rows:
        r = {k: v % p for k, v in row.items() if v % p}
        while r:
            col = min(r)
            if col not in pivots:
                inv = pow(r[col], p - 2, p)
                pivots[col] = {k: v * inv % p for k, v in r.items()}
                break
            f = r[col]
            for k, v in pivots[col].items():
                nv = (r.get(k, 0) - f * v) % p
                if nv:
                    r[k] = nv
                else:
                    r.pop(k, None)
    return len(pivots)


def order_complex_betti1(P) -> int:
    """b1 of the order complex: E - V + c - rank(boundary_2), with c = components."""
    ids = list(P.ids)
    sup = {o: P.support(o) for o in ids}
    edges = [(b, a) for b in ids for a in ids if a != b and sup[a] <= sup[b]]
    idx = {e: i for i, e in enumerate(edges)}
    parent = {o: o for o in ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for b, a in edges:
        parent[find(a)] = find(b)
    comps = len({find(o) for o in ids})
    rows = []
    for b, a in edges:
        for c in ids:
            if c != b and sup[b] <= sup[c]:
                rows.append({idx[(b, a)]: 1, idx[(c, a)]: -1, idx[(c, b)]: 1})
    return len(edges) - len(ids) + comps - _rank_mod_p(rows)


def base_curve_of_loop(P, loop) -> list:
    """Base walk visiting the largest vertex of each diamond, moving inside the bigger support."""
    adj = P.base.adjacency

    def walk(support, s, t):
        prev = {s: None}
        queue = [s]
        while queue:
            x = queue.pop(0)
            for y in sorted(adj[x], reverse=True):
                if y in support and y not in prev:
                    prev[y] = x
                    queue.append(y)
        out = [t]
        while out[-1] != s:
            out.append(prev[out[-1]])
        return out[::-1]

    rep = {o: max(P.support(o)) for o in P.ids}
    curve = [rep[loop.start]]
    for t, s in loop.steps:
        big = P.support(t) if P.support(s) <= P.support(t) else P.support(s)
        curve += walk(big, curve[-1], rep[t])[1:]
    return curve


def graph_curve_word(verts, edges, curve) -> tuple:
    """Word of a closed base walk in the free group on the non-tree edges (BFS tree from min vertex).

    Letter k is the k-th non-tree edge in edge order; exponent is the traversal sign.
    Letters are listed in composition order (last traversal first).
    """
    adj = {v: [] for v in verts}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    root = min(verts)
    seen = {root}
    tree = set()
    queue = [root]
    while queue:
        x = queue.pop(0)
        for y in sorted(adj[x]):
            if y not in seen:
                seen.add(y)
                tree.add(frozenset((x, y)))
                queue.append(y)
    non_tree = [e for e in edges if frozenset(e) not in tree]
    letters = []
    for u, v in zip(curve, curve[1:]):
        for k, (a, b) in enumerate(non_tree):
            if (a, b) == (u, v):
                letters.append((k, 1))
            elif (a, b) == (v, u):
                letters.append((k, -1))
    out = []
    for x in reversed(letters):
        if out and out[-1][0] == x[0] and out[-1][1] == -x[1]:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def brute_intertwiners(z, z2, tol=1e-9) -> int:
    """Dimension of all families t_a (n2 x n) with t_b z(b,a) = z2(b,a) t_a, one block per pair."""
    P = z.poset
    ids = list(P.ids)
    pos = {a: i for i, a in enumerate(ids)}
    n, n2 = z.dim, z2.dim
    blk = n * n2
    rows = []
    for b, a in P.comparability_edges:
        A = z.value(b, a)
        B = z2.value(b, a)
        M = np.zeros((blk, blk * len(ids)), dtype=complex)
        M[:, pos[b] * blk:(pos[b] + 1) * blk] += np.kron(np.eye(n2), A.T)
        M[:, pos[a] * blk:(pos[a] + 1) * blk] -= np.kron(B, np.eye(n))
        rows.append(M)
    K = np.vstack(rows)
    s = np.linalg.svd(K, compute_uv=False)
    return K.shape[1] - int(np.sum(s > tol * max(1.0, s[0])))


def exact_commutant_dimension(mats) -> int:
    import sympy

    n = len(mats[0])
    syms = sympy.symbols(f"x0:{n * n}")
    X = sympy.Matrix(n, n, syms)
    eqs = []
    for m in mats:
        M = sympy.Matrix(m)
        eqs.extend(list(X * M - M * X))
    A, _ = sympy.linear_eq_to_matrix(eqs, syms)
    return n * n - A.rank()


class MatrixModel:
    """Concrete unitaries: phi_o = Gamma_o (x) exp(i H_o), H_o a sum of on-site terms over supp(o).

    The Gamma_o pairwise anticommute and disjoint supports act on different
    sites, so every relation of the field algebra holds.
    """

    def __init__(self, P, diamonds, seed=0):
        rng = np.random.default_rng(seed)
        self.diamonds = sorted(diamonds)
        sites = sorted(set().union(*(P.support(o) for o in self.diamonds)))
        self.site_pos = {v: i for i, v in enumerate(sites)}
        k = len(self.diamonds)
        gammas = _clifford(k)
        dim_sites = 2 ** len(sites)
        self.phi = {}
        for i, o in enumerate(self.diamonds):
            H = np.zeros((dim_sites, dim_sites), dtype=complex)
            for v in P.support(o):
                h = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
                h = h + h.conj().T
                H += _embed(h, self.site_pos[v], len(sites))
            w, V = np.linalg.eigh(H)
            U = V @ np.diag(np.exp(1j * w)) @ V.conj().T
            self.phi[o] = np.kron(gammas[i], U)
        self.dim = gammas[0].shape[0] * dim_sites

    def evaluate(self, word) -> np.ndarray:
        out = np.eye(self.dim, dtype=complex) * word.scalar
        for o, dag in word.letters:
            m = self.phi[o]
            out = out @ (m.conj().T if dag else m)
        return out


def _embed(h, pos, nsites):
    mats = [np.eye(2)] * nsites
    mats = list(mats)
    mats[pos] = h
    return reduce(np.kron, mats)


def _clifford(k):
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    Z = np.diag([1.0, -1.0]).astype(complex)
    m = max(1, (k + 1) // 2)
    out = []
    for j in range(m):
        for P in (X, Y):
            mats = [Z] * j + [P] + [np.eye(2)] * (m - j - 1)
            out.append(reduce(np.kron, mats))
    return out[:k]
