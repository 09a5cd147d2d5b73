"""Discrete flat potentials: primitives on diamonds, the A-hat cocycle and loop integrals.

Orientation: with primitives normalised by dphi = A, the cocycle is taken as
``A_hat[o, a] = phi_a - phi_o`` on a (a ⊆ o).  Summing it along a poset loop
then gives the circulation of A along the shadowed base curve.
"""

from __future__ import annotations

import cmath
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .homotopy import PathError, Pi1Presentation, PosetPath
from .poset import BaseComplex, CausalPoset

TOL = 1e-12


class PotentialError(ValueError):
    pass


@dataclass(frozen=True)
class FlatPotential:
    """One real weight per oriented base edge (radians per traversal)."""

    base: BaseComplex
    weights: tuple

    def __post_init__(self) -> None:
        w = tuple(float(x) for x in self.weights)
        if len(w) != len(self.base.edges):
            raise PotentialError("one weight per base edge required")
        object.__setattr__(self, "weights", w)

    @classmethod
    def zero(cls, base: BaseComplex) -> "FlatPotential":
        return cls(base, (0.0,) * len(base.edges))

    @classmethod
    def from_edges(cls, base: BaseComplex, weights: Mapping) -> "FlatPotential":
        """Weights keyed by vertex pairs; a reversed pair contributes with flipped sign."""
        w = [0.0] * len(base.edges)
        for (u, v), x in weights.items():
            i, s = base.edge_index(u, v)
            w[i] += s * float(x)
        return cls(base, tuple(w))

    def along(self, u, v) -> float:
        i, s = self.base.edge_index(u, v)
        return s * self.weights[i]

    def face_defects(self) -> list[float]:
        return [
            sum(s * self.weights[e] for e, s in self.base.face_boundary(k))
            for k in range(len(self.base.faces))
        ]

    def is_closed(self, tol: float = TOL) -> bool:
        return all(abs(d) <= tol for d in self.face_defects())

    def scaled(self, factor: float) -> "FlatPotential":
        return FlatPotential(self.base, tuple(factor * x for x in self.weights))

    def __add__(self, other: "FlatPotential") -> "FlatPotential":
        return FlatPotential(self.base, tuple(x + y for x, y in zip(self.weights, other.weights)))


def direct_edge_sum(A: FlatPotential, curve: Sequence) -> float:
    return sum(A.along(u, v) for u, v in zip(curve, curve[1:]))


PrimitiveTable = dict  # diamond id -> {vertex: phi}


def local_primitives(P: CausalPoset, A: FlatPotential, tol: float = TOL) -> PrimitiveTable:
    if not A.is_closed(tol):
        raise PotentialError("potential not closed")
    table = {}
    for o in P.ids:
        sup = P.support(o)
        if not P.base.is_contractible_subset(sup):
            raise PotentialError(f"diamond support not contractible: {o}")
        root = min(sup)
        phi = {root: 0.0}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in P.base.adjacency[x]:
                if y in sup:
                    val = phi[x] + A.along(x, y)
                    if y not in phi:
                        phi[y] = val
                        queue.append(y)
                    elif abs(phi[y] - val) > 1e-9:
                        raise PotentialError(f"diamond support not contractible: {o}")
        table[o] = phi
    return table


@dataclass(frozen=True)
class AbelianCocycle:
    """Real cocycle on comparable pairs; ``values[(o, a)]`` for a strictly below o."""

    poset: CausalPoset
    values: Mapping

    def value(self, b: int, a: int) -> float:
        if a == b:
            return 0.0
        if (b, a) in self.values:
            return self.values[(b, a)]
        if (a, b) in self.values:
            return -self.values[(a, b)]
        raise PathError(f"invalid path: step ({b}, {a}) is not a comparable pair")

    def evaluate(self, p: PosetPath) -> float:
        return float(sum(self.value(t, s) for t, s in p.steps))

    def chain_defect(self) -> float:
        worst = 0.0
        for o, a, c in self.poset.chains:
            worst = max(worst, abs(self.values[(c, a)] + self.values[(a, o)] - self.values[(c, o)]))
        return worst


def abelian_cocycle(P: CausalPoset, primitives: PrimitiveTable, tol: float = TOL) -> AbelianCocycle:
    vals = {}
    for o, a in P.comparability_edges:
        po, pa = primitives[o], primitives[a]
        diffs = [pa[v] - po[v] for v in sorted(P.support(a))]
        if max(diffs) - min(diffs) > tol:
            raise PotentialError("primitive mismatch (support not connected?)")
        vals[(o, a)] = diffs[0]
    return AbelianCocycle(P, vals)


def potential_cocycle(P: CausalPoset, A: FlatPotential) -> AbelianCocycle:
    return abelian_cocycle(P, local_primitives(P, A))


def transition_phase(ahat: AbelianCocycle, o: int, a: int) -> complex:
    return cmath.exp(1j * ahat.value(o, a))


def loop_integral(ahat: AbelianCocycle, p: PosetPath) -> float:
    if not p.is_loop:
        raise PathError("open path")
    return ahat.evaluate(p)


def gauge_transform(A: FlatPotential, chi: Mapping) -> FlatPotential:
    """A + d(chi); vertices missing from chi count as 0."""
    w = [
        x + chi.get(v, 0.0) - chi.get(u, 0.0)
        for x, (u, v) in zip(A.weights, A.base.edges)
    ]
    return FlatPotential(A.base, tuple(w))


def generator_periods(A: FlatPotential, pres: Pi1Presentation) -> list[float]:
    ahat = potential_cocycle(pres.poset, A)
    return [loop_integral(ahat, pres.generator_loop(k)) for k in range(pres.rank)]


def same_character(A: FlatPotential, A2: FlatPotential, pres: Pi1Presentation, tol: float = TOL) -> bool:
    for x, y in zip(generator_periods(A, pres), generator_periods(A2, pres)):
        if abs(cmath.exp(-1j * x) - cmath.exp(-1j * y)) > tol:
            return False
    return True


def shadow_curve(P: CausalPoset, p: PosetPath) -> list:
    """Base walk through the support base points visited by p."""
    base = P.base
    walk = [min(P.support(p.start))]
    for t, s in p.steps:
        big = P.support(t) if P.leq(s, t) else P.support(s)
        seg = base.tree_walk(big, walk[-1], min(P.support(t)))
        walk.extend(seg[1:])
    return walk


def potential_from_character(P: CausalPoset, pres: Pi1Presentation, chi, tol: float = 1e-9) -> FlatPotential:
    """Potential on the non-tree base edges whose generator periods are ``chi``."""
    base = P.base
    targets = [float(chi[k]) for k in range(pres.rank)]
    _, non_tree = base.spanning_tree()
    if pres.rank == 0:
        return FlatPotential.zero(base)
    col = {e: j for j, e in enumerate(non_tree)}
    rows = []
    for k in range(pres.rank):
        counts = [0.0] * len(non_tree)
        walk = shadow_curve(P, pres.generator_loop(k))
        for u, v in zip(walk, walk[1:]):
            i, s = base.edge_index(u, v)
            if i in col:
                counts[col[i]] += s
        rows.append(counts)
    face_rows = []
    for k in range(len(base.faces)):
        r = [0.0] * len(non_tree)
        for e, s in base.face_boundary(k):
            if e in col:
                r[col[e]] += s
        face_rows.append(r)
    M = np.array(rows + face_rows, dtype=float)
    rhs = np.array(targets + [0.0] * len(face_rows))
    sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    if np.max(np.abs(M @ sol - rhs), initial=0.0) > tol:
        raise PotentialError("torsion not supported")
    w = [0.0] * len(base.edges)
    for e, j in col.items():
        w[e] = float(sol[j])
    return FlatPotential(base, tuple(w))
