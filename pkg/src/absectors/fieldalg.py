"""Signed words in localized unitaries phi_o and the Dirac charge transporters.

Relations: phi_o is unitary, and letters at causally disjoint diamonds
anticommute whatever their dagger flags.  The normal form is the reduced word of
the graph group followed by the lexicographically least reordering of its
partial-commutation class; every swap of disjoint letters contributes -1.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .homotopy import PathError, PosetPath, reverse_path
from .poset import CausalPoset, ValidationReport

Letter = tuple  # (diamond id, dagger flag)


class FieldAlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class FieldWord:
    scalar: complex = 1.0
    letters: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "scalar", complex(self.scalar))
        object.__setattr__(self, "letters", tuple((int(o), bool(d)) for o, d in self.letters))

    @classmethod
    def letter(cls, o: int, dag: bool = False) -> "FieldWord":
        return cls(1.0, ((o, dag),))

    @classmethod
    def one(cls) -> "FieldWord":
        return cls(1.0, ())

    def __mul__(self, other) -> "FieldWord":
        if isinstance(other, FieldWord):
            return FieldWord(self.scalar * other.scalar, self.letters + other.letters)
        return FieldWord(self.scalar * complex(other), self.letters)

    def __rmul__(self, other) -> "FieldWord":
        return FieldWord(self.scalar * complex(other), self.letters)

    def adjoint(self) -> "FieldWord":
        return FieldWord(self.scalar.conjugate(), tuple((o, not d) for o, d in reversed(self.letters)))

    @property
    def charge(self) -> int:
        return sum(-1 if d else 1 for _, d in self.letters)

    @property
    def is_scalar(self) -> bool:
        return not self.letters

    @property
    def diamonds(self) -> set:
        return {o for o, _ in self.letters}

    def close_to(self, other: "FieldWord", tol: float = 1e-12) -> bool:
        return self.letters == other.letters and abs(self.scalar - other.scalar) <= tol

    def __str__(self) -> str:
        body = " ".join(f"φ{o}*" if d else f"φ{o}" for o, d in self.letters) or "1"
        return f"({self.scalar:g}) {body}"


def _key(letter: Letter) -> tuple:
    o, dag = letter
    return (o, 0 if dag else 1)


def reduce_letters(letters: Sequence[Letter], P: CausalPoset) -> tuple[int, list]:
    """Cancel inverse pairs reachable through disjoint letters; returns (sign, reduced)."""
    sign = 1
    out: list = []
    for x in letters:
        j = len(out) - 1
        while j >= 0:
            y = out[j]
            if y[0] == x[0]:
                if y[1] != x[1]:
                    if (len(out) - 1 - j) % 2:
                        sign = -sign
                    del out[j]
                    break
                j = -1
                break
            if not P.perp(y[0], x[0]):
                j = -1
                break
            j -= 1
        else:
            j = -1
        if j < 0:
            out.append(x)
    return sign, out


def sort_letters(letters: Sequence[Letter], P: CausalPoset) -> tuple[int, list]:
    """Lexicographically least rearrangement by disjoint swaps; returns (sign, word)."""
    rest = list(letters)
    out = []
    sign = 1
    while rest:
        best = None
        for i, x in enumerate(rest):
            if all(P.perp(y[0], x[0]) for y in rest[:i]):
                if best is None or _key(x) < _key(rest[best]):
                    best = i
        if best % 2:
            sign = -sign
        out.append(rest.pop(best))
    return sign, out


def normal_form(w: FieldWord, P: CausalPoset) -> FieldWord:
    s1, reduced = reduce_letters(w.letters, P)
    s2, ordered = sort_letters(reduced, P)
    return FieldWord(w.scalar * s1 * s2, tuple(ordered))


def random_rewrites(w: FieldWord, P: CausalPoset, rng: random.Random, steps: int = 40) -> FieldWord:
    """Apply a random sequence of sound moves: adjacent cancellation or signed disjoint swap."""
    scalar, letters = w.scalar, list(w.letters)
    for _ in range(steps):
        moves = []
        for i in range(len(letters) - 1):
            x, y = letters[i], letters[i + 1]
            if x[0] == y[0] and x[1] != y[1]:
                moves.append(("cancel", i))
            elif x[0] != y[0] and P.perp(x[0], y[0]):
                moves.append(("swap", i))
        if not moves:
            break
        kind, i = rng.choice(moves)
        if kind == "cancel":
            del letters[i:i + 2]
        else:
            letters[i], letters[i + 1] = letters[i + 1], letters[i]
            scalar = -scalar
    return FieldWord(scalar, tuple(letters))


def _power_letters(o: int, n: int) -> tuple:
    return ((o, False),) * n if n >= 0 else ((o, True),) * (-n)


class FieldCocycle:
    """z(b, a) = sigma(b, a) Phi_b^* Phi_a with Phi_o = phi_o^n (phi_o^*|n| if n < 0).

    ``phases`` holds sigma on pairs (b, a) with a ⊂ b; None means sigma = 1.
    """

    def __init__(self, poset: CausalPoset, charge: int, phases: Mapping | None = None):
        self.poset = poset
        self.charge = int(charge)
        self.phases = None if phases is None else {k: complex(v) for k, v in phases.items()}

    def phase(self, b: int, a: int) -> complex:
        if b == a or self.phases is None:
            return 1.0
        if (b, a) in self.phases:
            return self.phases[(b, a)]
        if (a, b) in self.phases:
            return self.phases[(a, b)].conjugate()
        raise PathError(f"invalid path: step ({b}, {a}) is not a comparable pair")

    def field(self, o: int) -> FieldWord:
        return FieldWord(1.0, _power_letters(o, self.charge))

    def value(self, b: int, a: int) -> FieldWord:
        P = self.poset
        if b != a and not P.comparable(b, a):
            raise PathError(f"invalid path: step ({b}, {a}) is not a comparable pair")
        w = self.field(b).adjoint() * self.field(a) * self.phase(b, a)
        return normal_form(w, P)

    def __call__(self, b: int, a: int) -> FieldWord:
        return self.value(b, a)

    def evaluate(self, p: PosetPath) -> FieldWord:
        out = FieldWord.one()
        for t, s in p.steps:
            out = normal_form(self.value(t, s) * out, self.poset)
        return out

    def scalar_cocycle(self) -> dict:
        """The phase cocycle on pairs (b, a), a ⊂ b."""
        return {e: self.phase(*e) for e in self.poset.comparability_edges}


def check_field_cocycle(z: FieldCocycle, tol: float = 1e-12) -> ValidationReport:
    rep = ValidationReport()
    P = z.poset
    for o, a, c in P.chains:
        lhs = normal_form(z.value(c, a) * z.value(a, o), P)
        if not lhs.close_to(z.value(c, o), tol):
            rep.add("cocycle", f"cocycle equation violated on chain {o} < {a} < {c}", o, a, c)
    return rep


def transporter(P: CausalPoset, conjugate: bool = False) -> FieldCocycle:
    return FieldCocycle(P, -1 if conjugate else 1)


def trivial_cocycle(P: CausalPoset) -> FieldCocycle:
    return FieldCocycle(P, 0)


def power(z: FieldCocycle, n: int) -> FieldCocycle:
    if n == 0:
        raise FieldAlgebraError("power needs a nonzero exponent")
    phases = None if z.phases is None else {k: v ** n for k, v in z.phases.items()}
    return FieldCocycle(z.poset, z.charge * n, phases)


def _path(P: CausalPoset, src: int, dst: int) -> PosetPath:
    ds = P.shortest_path(src, dst)
    if ds is None:
        raise PathError("poset not pathwise connected")
    return PosetPath.through(ds)


def auxiliary_diamond(P: CausalPoset, *regions: int):
    """Least id disjoint from every given diamond, or None."""
    for x in P.ids:
        if all(P.perp(x, r) for r in regions):
            return x
    return None


def tensor_product(z: FieldCocycle, z2: FieldCocycle, pair: tuple, P: CausalPoset, aux: int | None = None) -> FieldWord:
    """z(o,a) z(p1) z2(o,a) z(p1)^* with p1: aux -> a."""
    o, a = pair
    if aux is None:
        aux = auxiliary_diamond(P, o, a)
    if aux is None or not (P.perp(aux, o) and P.perp(aux, a)):
        raise FieldAlgebraError("insufficient causal disjointness")
    zp1 = z.evaluate(_path(P, aux, a))
    w = z.value(o, a) * zp1 * z2.value(o, a) * zp1.adjoint()
    return normal_form(w, P)


def statistics_choice(P: CausalPoset, a: int):
    """Deterministic (o, o1) with o ⊥ a and o1 ⊥ o, o1 ⊥ a; None if impossible."""
    for o in P.ids:
        if not P.perp(o, a):
            continue
        o1 = auxiliary_diamond(P, o, a)
        if o1 is not None:
            return o, o1
    return None


def statistics_phase(z: FieldCocycle, a: int, P: CausalPoset, o: int | None = None, o1: int | None = None) -> complex:
    """eps_a = [z(q)^* x z(p)^*][z(p) x z(q)] with p trivial at a and q: a -> o."""
    if o is None or o1 is None:
        choice = statistics_choice(P, a)
        if choice is None:
            raise FieldAlgebraError("insufficient causal disjointness")
        o, o1 = choice
    if not (P.perp(o, a) and P.perp(o1, o) and P.perp(o1, a)):
        raise FieldAlgebraError("insufficient causal disjointness")
    zq = z.evaluate(_path(P, a, o))
    zp = FieldWord.one()
    zp1 = z.evaluate(_path(P, o1, a))
    left = zq.adjoint() * zp1 * zp.adjoint() * zp1.adjoint()
    right = zp * zp1 * zq * zp1.adjoint()
    eps = normal_form(left * right, P)
    if not eps.is_scalar:
        raise FieldAlgebraError("statistics undefined for this cocycle")
    return eps.scalar


def localization_region(P: CausalPoset, A: FieldWord):
    """Least diamond containing the supports of all letters of A."""
    if A.is_scalar:
        return None
    verts = set().union(*(P.support(o) for o in A.diamonds))
    return P.minimal_containing(verts)


def localized_endomorphism(
    z: FieldCocycle,
    o: int,
    A: FieldWord,
    P: CausalPoset,
    a: int | None = None,
    path: PosetPath | None = None,
) -> FieldWord:
    """rho(o)_a(A) = z(p) A z(p-bar) with p: e -> o for some e ⊥ a."""
    if a is None:
        a = localization_region(P, A)
    if a is None:
        return normal_form(A, P)
    if path is None:
        if P.perp(o, a):
            e = o
        else:
            e = next((x for x in P.ids if P.perp(x, a)), None)
            if e is None:
                raise FieldAlgebraError("insufficient causal disjointness")
        path = _path(P, e, o)
    if path.target != o or not P.perp(path.source, a):
        raise FieldAlgebraError("insufficient causal disjointness")
    zp = z.evaluate(path)
    zbar = z.evaluate(reverse_path(path))
    return normal_form(zp * A * zbar, P)
