"""Matrix-valued 1-cocycles on a causal poset and their holonomy data."""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from math import isqrt, sqrt
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .flatpot import AbelianCocycle
from .homotopy import (
    PathError,
    Pi1Presentation,
    PosetPath,
    bfs_parents,
    reverse_path,
    tree_path_to,
)
from .poset import CausalPoset, ValidationReport

TOL = 1e-9
EXACT = 1e-12


class CocycleError(ValueError):
    pass


def _dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


class UnitaryCocycle:
    """n x n unitaries on ordered comparable pairs (b, a), b != a.

    Values for both orientations are stored; diagonal pairs evaluate to the identity.
    """

    def __init__(self, poset: CausalPoset, dim: int, values: Mapping, tolerance: float = TOL):
        if dim < 1:
            raise CocycleError("dimension must be positive")
        self.poset = poset
        self.dim = int(dim)
        self.tolerance = tolerance
        self.values = {
            (int(b), int(a)): np.asarray(m, dtype=complex).reshape(dim, dim)
            for (b, a), m in values.items()
        }

    @classmethod
    def from_rule(cls, P: CausalPoset, dim: int, rule: Callable, tolerance: float = TOL):
        """Fill (b, a) with a ⊂ b from ``rule(b, a)`` and the reverse pairs by adjoints."""
        vals = {}
        for b, a in P.comparability_edges:
            m = np.asarray(rule(b, a), dtype=complex).reshape(dim, dim)
            vals[(b, a)] = m
            vals[(a, b)] = _dagger(m)
        return cls(P, dim, vals, tolerance)

    @classmethod
    def identity(cls, P: CausalPoset, dim: int = 1) -> "UnitaryCocycle":
        eye = np.eye(dim, dtype=complex)
        return cls.from_rule(P, dim, lambda b, a: eye)

    @classmethod
    def from_abelian(cls, ahat: AbelianCocycle, sign: int = -1) -> "UnitaryCocycle":
        """U(1) cocycle exp(sign * i * A_hat)."""
        return cls.from_rule(ahat.poset, 1, lambda b, a: [[cmath.exp(sign * 1j * ahat.value(b, a))]])

    def value(self, b: int, a: int) -> np.ndarray:
        if b == a:
            return np.eye(self.dim, dtype=complex)
        try:
            return self.values[(b, a)]
        except KeyError:
            if self.poset.comparable(b, a):
                raise CocycleError("cocycle not total") from None
            raise PathError(f"invalid path: step ({b}, {a}) is not a comparable pair") from None

    def __call__(self, b: int, a: int) -> np.ndarray:
        return self.value(b, a)

    def conjugated(self, V: np.ndarray) -> "UnitaryCocycle":
        V = np.asarray(V, dtype=complex)
        return UnitaryCocycle(
            self.poset, self.dim, {k: V @ m @ _dagger(V) for k, m in self.values.items()}, self.tolerance
        )

    def direct_sum(self, other: "UnitaryCocycle") -> "UnitaryCocycle":
        n, m = self.dim, other.dim
        vals = {}
        for k, x in self.values.items():
            blk = np.zeros((n + m, n + m), dtype=complex)
            blk[:n, :n] = x
            blk[n:, n:] = other.values[k]
            vals[k] = blk
        return UnitaryCocycle(self.poset, n + m, vals, self.tolerance)

    def max_distance(self, other: "UnitaryCocycle") -> float:
        if other.dim != self.dim:
            raise CocycleError("incompatible dimensions")
        return max(
            (float(np.max(np.abs(m - other.value(*k)))) for k, m in self.values.items()),
            default=0.0,
        )


def check_cocycle(z: UnitaryCocycle, tol: float | None = None) -> ValidationReport:
    tol = z.tolerance if tol is None else tol
    P = z.poset
    for b, a in P.comparability_edges:
        if (b, a) not in z.values or (a, b) not in z.values:
            raise CocycleError("cocycle not total")
    rep = ValidationReport()
    eye = np.eye(z.dim)
    for (b, a), m in sorted(z.values.items()):
        if not P.comparable(b, a):
            rep.add("domain", f"value on non-comparable pair ({b},{a})", b, a)
            continue
        if np.max(np.abs(m @ _dagger(m) - eye)) > tol:
            rep.add("unitarity", f"unitarity violation at ({b},{a})", b, a)
    for b, a in P.comparability_edges:
        if np.max(np.abs(z.values[(a, b)] - _dagger(z.values[(b, a)]))) > tol:
            rep.add("adjoint", f"adjoint symmetry violation at ({b},{a})", b, a)
    for o, a, c in P.chains:
        lhs = z.values[(c, o)]
        rhs = z.values[(c, a)] @ z.values[(a, o)]
        if np.max(np.abs(lhs - rhs)) > tol:
            rep.add("cocycle", f"cocycle equation violated on chain {o} < {a} < {c}", o, a, c)
    return rep


def evaluate_path(z: UnitaryCocycle, p: PosetPath) -> np.ndarray:
    """z(p) = z(step_k) ... z(step_1)."""
    out = np.eye(z.dim, dtype=complex)
    for t, s in p.steps:
        out = z.value(t, s) @ out
    return out


@dataclass(frozen=True)
class PathFrame:
    pole: int
    paths: Mapping

    def path(self, a: int) -> PosetPath:
        try:
            return self.paths[a]
        except KeyError:
            raise CocycleError("incomplete path frame") from None

    def check(self, P: CausalPoset) -> None:
        for a in P.ids:
            p = self.path(a)
            if p.source != self.pole or p.target != a:
                raise CocycleError(f"frame path for {a} does not run from the pole")


def build_frame(P: CausalPoset, pole: int | None = None) -> PathFrame:
    """Tree paths of a BFS spanning tree rooted at the pole."""
    pole = P.ids[0] if pole is None else pole
    parent = bfs_parents(P, pole)
    return PathFrame(pole, {a: tree_path_to(parent, a) for a in P.ids if a in parent})


def _frame_values(z: UnitaryCocycle, frame: PathFrame) -> dict:
    frame.check(z.poset)
    return {a: evaluate_path(z, frame.path(a)) for a in z.poset.ids}


def split_components(z: UnitaryCocycle, frame: PathFrame) -> tuple[UnitaryCocycle, UnitaryCocycle]:
    """(charged part z_c, topological part u_z) relative to the frame."""
    Z = _frame_values(z, frame)
    zc, uz = {}, {}
    for (b, a), m in z.values.items():
        zc[(b, a)] = Z[b] @ _dagger(Z[a])
        uz[(b, a)] = _dagger(Z[b]) @ m @ Z[a]
    return (
        UnitaryCocycle(z.poset, z.dim, zc, z.tolerance),
        UnitaryCocycle(z.poset, z.dim, uz, z.tolerance),
    )


def join(u: UnitaryCocycle, zc: UnitaryCocycle, frame: PathFrame) -> UnitaryCocycle:
    if u.dim != zc.dim:
        raise CocycleError("incompatible dimensions")
    Z = _frame_values(zc, frame)
    vals = {}
    for (b, a), m in zc.values.items():
        vals[(b, a)] = Z[b] @ u.value(b, a) @ _dagger(Z[b]) @ m
    return UnitaryCocycle(zc.poset, zc.dim, vals, zc.tolerance)


def _null_space(K: np.ndarray, tol: float) -> np.ndarray:
    if K.size == 0:
        return np.eye(K.shape[1], dtype=complex)
    _, s, vh = np.linalg.svd(K)
    scale = max(1.0, float(s[0])) if s.size else 1.0
    rank = int(np.sum(s > tol * scale))
    return vh[rank:].conj().T


def commutant_basis(mats: Sequence[np.ndarray], tol: float = TOL) -> list[np.ndarray]:
    mats = [np.asarray(m, dtype=complex) for m in mats]
    n = mats[0].shape[0]
    eye = np.eye(n)
    # row-major vec: vec(XU) = (I ⊗ U^T) vec X, vec(UX) = (U ⊗ I) vec X
    K = np.vstack([np.kron(eye, m.T) - np.kron(m, eye) for m in mats])
    ns = _null_space(K, tol)
    return [ns[:, k].reshape(n, n) for k in range(ns.shape[1])]


def commutant_dimension(mats: Iterable[np.ndarray], tol: float = TOL) -> int:
    mats = list(mats)
    if not mats:
        raise CocycleError("empty matrix set")
    return len(commutant_basis(mats, tol))


def _span_rank(vectors: list[np.ndarray], tol: float) -> int:
    if not vectors:
        return 0
    s = np.linalg.svd(np.array(vectors), compute_uv=False)
    return int(np.sum(s > tol * max(1.0, float(s[0]))))


def _orth_basis(vectors: list[np.ndarray], tol: float) -> list[np.ndarray]:
    if not vectors:
        return []
    u, s, vh = np.linalg.svd(np.array(vectors), full_matrices=False)
    r = int(np.sum(s > tol * max(1.0, float(s[0]))))
    return list(vh[:r])


def generated_algebra(gens: Sequence[np.ndarray], tol: float = TOL) -> list[np.ndarray]:
    """Basis of the *-algebra generated by unitaries, saturated under products."""
    n = gens[0].shape[0]
    letters = [np.asarray(g, dtype=complex) for g in gens] + [_dagger(np.asarray(g)) for g in gens]
    basis = _orth_basis([np.eye(n, dtype=complex).ravel()] + [g.ravel() for g in letters], tol)
    rounds = n * n
    for step in range(rounds + 1):
        grown = basis + [(b.reshape(n, n) @ g).ravel() for b in basis for g in letters]
        new = _orth_basis(grown, tol)
        if len(new) == len(basis):
            return [b.reshape(n, n) for b in basis]
        basis = new
    raise CocycleError("algebra saturation did not stabilise")


def center_dimension(algebra: list[np.ndarray], commutant: list[np.ndarray], tol: float = TOL) -> int:
    a = [m.ravel() for m in algebra]
    c = [m.ravel() for m in commutant]
    return len(a) + len(c) - _span_rank(a + c, tol)


class HolonomyRep:
    """Images of the presentation generators (non-tree comparability edges)."""

    def __init__(self, presentation: Pi1Presentation, images: Mapping, tolerance: float = TOL):
        self.presentation = presentation
        self.images = {e: np.asarray(m, dtype=complex) for e, m in images.items()}
        dims = {m.shape[0] for m in self.images.values()}
        self.tolerance = tolerance
        if len(dims) > 1:
            raise CocycleError("incompatible dimensions")
        self.dim = dims.pop() if dims else 1

    @classmethod
    def from_free(cls, pres: Pi1Presentation, free_images: Sequence, tolerance: float = TOL):
        """Rep specified on the reduced generators; residual relators must hold."""
        mats = [np.asarray(m, dtype=complex) for m in free_images]
        if len(mats) != pres.rank:
            raise CocycleError("one image per reduced generator required")
        n = mats[0].shape[0] if mats else 1
        word_val = _word_evaluator(mats, n)
        for r in pres.residual_relators:
            if np.max(np.abs(word_val(r) - np.eye(n))) > tolerance:
                raise CocycleError("not flat")
        images = {e: word_val(pres.expansion[e]) for e in pres.generators}
        rep = cls(pres, images, tolerance)
        rep.dim = n
        return rep

    def evaluate(self, p: PosetPath) -> np.ndarray:
        """Holonomy of a loop (conjugated to the base along the tree)."""
        from .homotopy import loop_class

        return self.evaluate_word(loop_class(self.presentation, p))

    def free_images(self) -> list[np.ndarray]:
        pres = self.presentation
        out = []
        for k in range(pres.rank):
            (b, a), sign = pres.free_generators[k]
            m = self.images.get((b, a), np.eye(self.dim))
            out.append(m if sign == 1 else _dagger(m))
        return out

    def evaluate_word(self, word) -> np.ndarray:
        return _word_evaluator(self.free_images(), self.dim)(word)

    @property
    def topologically_trivial(self) -> bool:
        eye = np.eye(self.dim)
        return all(np.max(np.abs(m - eye)) <= self.tolerance for m in self.images.values())


def _word_evaluator(mats: list[np.ndarray], n: int):
    def val(word):
        out = np.eye(n, dtype=complex)
        for g, e in word:
            out = out @ (mats[g] if e == 1 else _dagger(mats[g]))
        return out

    return val


def _relator_defect(pres: Pi1Presentation, image_of: Callable, n: int) -> float:
    edges = pres.poset.comparability_edges
    eye = np.eye(n)
    worst = 0.0
    for word in pres.relators:
        out = np.eye(n, dtype=complex)
        for g, e in word:
            m = image_of(edges[g])
            out = out @ (m if e == 1 else _dagger(m))
        worst = max(worst, float(np.max(np.abs(out - eye))))
    return worst


def holonomy_rep(z: UnitaryCocycle, pres: Pi1Presentation, tol: float | None = None) -> HolonomyRep:
    tol = z.tolerance if tol is None else tol
    images = {e: evaluate_path(z, pres.edge_loop(*e)) for e in pres.generators}
    eye = np.eye(z.dim, dtype=complex)
    if _relator_defect(pres, lambda e: images.get(e, eye), z.dim) > tol:
        raise CocycleError("not a cocycle on this poset (homotopy violation)")
    rep = HolonomyRep(pres, images, tol)
    rep.dim = z.dim
    return rep


def topological_dimension(z: UnitaryCocycle, pres: Pi1Presentation, tol: float = TOL) -> int:
    return rep_topological_dimension(holonomy_rep(z, pres, tol), tol)


def rep_topological_dimension(rep: HolonomyRep, tol: float = TOL) -> int:
    gens = rep.free_images() or [np.eye(rep.dim, dtype=complex)]
    algebra = generated_algebra(gens, tol)
    comm = commutant_basis(gens, tol)
    if center_dimension(algebra, comm, tol) != 1:
        raise CocycleError("holonomy algebra not a factor")
    c = len(comm)
    m = isqrt(c)
    if m * m != c or rep.dim % m:
        raise CocycleError("holonomy algebra not a factor")
    tau = rep.dim / sqrt(c)
    return int(round(tau))


def intertwiner_space(
    z: UnitaryCocycle, z2: UnitaryCocycle, pres: Pi1Presentation | None = None, tol: float = TOL
) -> list[dict]:
    """Basis of families t with t_target z(step) = z2(step) t_source."""
    P = z.poset
    root = pres.base if pres is not None else P.ids[0]
    parent = pres.parent if pres is not None else bfs_parents(P, root)
    if len(parent) != len(P):
        raise PathError("poset not pathwise connected")
    tree = {(x, y) if P.leq(y, x) else (y, x) for y, x in parent.items() if x is not None}
    n, n2 = z.dim, z2.dim
    paths = {a: tree_path_to(parent, a) for a in P.ids}
    Z = {a: evaluate_path(z, p) for a, p in paths.items()}
    Z2 = {a: evaluate_path(z2, p) for a, p in paths.items()}
    blocks = [np.zeros((0, n2 * n), dtype=complex)]
    for b, a in P.comparability_edges:
        if (b, a) in tree:
            continue
        A = _dagger(Z[b]) @ z.value(b, a) @ Z[a]
        B = _dagger(Z2[b]) @ z2.value(b, a) @ Z2[a]
        # X A - B X = 0, row-major vec
        blocks.append(np.kron(np.eye(n2), A.T) - np.kron(B, np.eye(n)))
    ns = _null_space(np.vstack(blocks), tol)
    basis = []
    for k in range(ns.shape[1]):
        X = ns[:, k].reshape(n2, n)
        basis.append({a: Z2[a] @ X @ _dagger(Z[a]) for a in P.ids})
    return basis


def intertwines(t: Mapping, z: UnitaryCocycle, z2: UnitaryCocycle, tol: float = TOL) -> bool:
    for (b, a), m in z.values.items():
        if np.max(np.abs(t[b] @ m - z2.value(b, a) @ t[a])) > tol:
            return False
    return True


@dataclass
class FlatBundleData:
    """Transition unitaries on comparability edges (b, a), a ⊂ b."""

    presentation: Pi1Presentation
    transitions: dict
    dim: int

    def simplex_defect(self) -> float:
        return _relator_defect(self.presentation, lambda e: self.transitions[e], self.dim)

    def as_cocycle(self) -> UnitaryCocycle:
        P = self.presentation.poset
        return UnitaryCocycle.from_rule(P, self.dim, lambda b, a: self.transitions[(b, a)])


def flat_bundle_from_holonomy(pres: Pi1Presentation, rep: HolonomyRep, tol: float = TOL) -> FlatBundleData:
    eye = np.eye(rep.dim, dtype=complex)
    transitions = {e: eye for e in pres.tree}
    for e in pres.generators:
        transitions[e] = rep.images.get(e, eye)
    bundle = FlatBundleData(pres, transitions, rep.dim)
    if bundle.simplex_defect() > tol:
        raise CocycleError("not flat")
    return bundle


def character_data(rep: HolonomyRep) -> dict[int, float]:
    """Principal argument of each reduced generator's image (dimension 1 only)."""
    if rep.dim != 1:
        raise CocycleError("character data needs a one-dimensional representation")
    return {k: float(np.angle(m[0, 0])) for k, m in enumerate(rep.free_images())}


def frame_loop(frame: PathFrame, b: int, a: int) -> PosetPath:
    """Pole -> a -> b -> pole."""
    return reverse_path(frame.path(b)) * PosetPath(a, ((b, a),)) * frame.path(a)


def assemble_multiplet(rep: HolonomyRep, zeta: UnitaryCocycle, frame: PathFrame, tol: float = TOL) -> UnitaryCocycle:
    """Hol ⋈ (zeta ⊕ ... ⊕ zeta) with the topological part read off along frame loops."""
    if rep.dim < 1:
        raise CocycleError("dimension must be positive")
    if zeta.dim != 1:
        raise CocycleError("incompatible dimensions")
    pres = rep.presentation
    if not holonomy_rep(zeta, pres, tol).topologically_trivial:
        raise CocycleError("charged input is not topologically trivial")
    P = zeta.poset
    hol = {}
    for b, a in P.comparability_edges:
        hol[(b, a)] = rep.evaluate(frame_loop(frame, b, a))
    u = UnitaryCocycle.from_rule(P, rep.dim, lambda b, a: hol[(b, a)], tol)
    eye = np.eye(rep.dim, dtype=complex)
    zc = UnitaryCocycle.from_rule(P, rep.dim, lambda b, a: zeta.value(b, a)[0, 0] * eye, tol)
    return join(u, zc, frame)
