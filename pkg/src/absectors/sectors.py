"""Twists, twisted transporters and the sector <-> twist correspondence."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping

from .cocycle import (
    HolonomyRep,
    PathFrame,
    UnitaryCocycle,
    holonomy_rep,
    rep_topological_dimension,
)
from .fieldalg import (
    FieldCocycle,
    FieldWord,
    statistics_choice,
    statistics_phase,
)
from .flatpot import AbelianCocycle, potential_cocycle, potential_from_character
from .homotopy import PathError, Pi1Presentation, PosetPath
from .poset import CausalPoset, ValidationReport

TOL = 1e-9


class Twist:
    """Unit phases sigma[(o, a)] on pairs with a ⊂ o; the reverse pair is the conjugate."""

    def __init__(self, poset: CausalPoset, values: Mapping):
        self.poset = poset
        self.values = {(int(o), int(a)): complex(v) for (o, a), v in values.items()}

    @classmethod
    def trivial(cls, P: CausalPoset) -> "Twist":
        return cls(P, {e: 1.0 for e in P.comparability_edges})

    def value(self, b: int, a: int) -> complex:
        if b == a:
            return 1.0
        if (b, a) in self.values:
            return self.values[(b, a)]
        if (a, b) in self.values:
            return self.values[(a, b)].conjugate()
        raise PathError(f"invalid path: step ({b}, {a}) is not a comparable pair")

    def evaluate(self, p: PosetPath) -> complex:
        out = 1.0 + 0j
        for t, s in p.steps:
            out *= self.value(t, s)
        return out

    def power(self, n: int) -> "Twist":
        return Twist(self.poset, {k: v ** n for k, v in self.values.items()})

    def check(self, tol: float = 1e-12) -> ValidationReport:
        rep = ValidationReport()
        for k, v in sorted(self.values.items()):
            if abs(abs(v) - 1.0) > tol:
                rep.add("unitarity", f"twist value at {k} is not a unit phase", *k)
        for o, a, c in self.poset.chains:
            if abs(self.value(c, a) * self.value(a, o) - self.value(c, o)) > tol:
                rep.add("cocycle", f"twist cocycle relation violated on chain {o} < {a} < {c}", o, a, c)
        return rep


def twist_from_potential(ahat: AbelianCocycle) -> Twist:
    """sigma = exp(-i A_hat)."""
    return Twist(ahat.poset, {k: cmath.exp(-1j * v) for k, v in ahat.values.items()})


def twisted_morphism(sigma: Twist, pair: tuple, w: FieldWord) -> FieldWord:
    """Gauge action of sigma_{oa} on w: scalar picks up sigma^charge."""
    o, a = pair
    return FieldWord(w.scalar * sigma.value(o, a) ** w.charge, w.letters)


def twisted_transporter(P: CausalPoset, sigma: Twist) -> FieldCocycle:
    return FieldCocycle(P, 1, {e: sigma.value(*e) for e in P.comparability_edges})


def _phase_twist(z: FieldCocycle) -> Twist:
    return Twist(z.poset, {e: z.phase(*e) for e in z.poset.comparability_edges})


@dataclass
class Factorization:
    """z = u ⋈ z_c with z_c ≅ z_n through the scalar family ``intertwiner``."""

    phase_part: Twist
    charged: FieldCocycle
    intertwiner: dict
    frame: PathFrame

    def reconstruct(self) -> FieldCocycle:
        return join_field(self.phase_part, self.charged, self.frame)

    def intertwiner_defect(self) -> float:
        """max |t_b z_n(b,a) - z_c(b,a) t_a| over pairs (words compared letterwise)."""
        P = self.charged.poset
        bare = FieldCocycle(P, self.charged.charge)
        worst = 0.0
        for b, a in P.comparability_edges:
            lhs = bare.value(b, a) * self.intertwiner[b]
            rhs = self.charged.value(b, a) * self.intertwiner[a]
            if lhs.letters != rhs.letters:
                return math.inf
            worst = max(worst, abs(lhs.scalar - rhs.scalar))
        return worst


def factorize(z: FieldCocycle, frame: PathFrame) -> Factorization:
    P = z.poset
    frame.check(P)
    sigma = _phase_twist(z)
    S = {a: sigma.evaluate(frame.path(a)) for a in P.ids}
    u = Twist(P, {(b, a): S[b].conjugate() * sigma.value(b, a) * S[a] for b, a in P.comparability_edges})
    zc = FieldCocycle(P, z.charge, {(b, a): S[b] * S[a].conjugate() for b, a in P.comparability_edges})
    return Factorization(u, zc, S, frame)


def join_field(u: Twist, zc: FieldCocycle, frame: PathFrame) -> FieldCocycle:
    """Scalar topological parts commute with everything, so the join multiplies phases."""
    P = zc.poset
    return FieldCocycle(P, zc.charge, {e: u.value(*e) * zc.phase(*e) for e in P.comparability_edges})


def sector_to_twist(z: FieldCocycle, frame: PathFrame | None = None) -> Twist:
    """Without a frame: the exact ratio z / z_n.  With a frame: the frame-gauged phase part."""
    if frame is None:
        return _phase_twist(z)
    return factorize(z, frame).phase_part


def twist_to_sector(sigma: Twist, charge: int = 1) -> FieldCocycle:
    return FieldCocycle(sigma.poset, charge, dict(sigma.values))


def generator_values(pres: Pi1Presentation, sigma: Twist) -> list[complex]:
    return [sigma.evaluate(pres.generator_loop(k)) for k in range(pres.rank)]


def field_holonomy(z: FieldCocycle, p: PosetPath) -> complex:
    w = z.evaluate(p)
    if not w.is_scalar:
        raise PathError("not a loop at base")
    return w.scalar


def roundtrip(P: CausalPoset, pres: Pi1Presentation, sigma: Twist, frame: PathFrame) -> dict:
    """Both compositions of the correspondence, measured on generator loops and pairs."""
    z = twist_to_sector(sigma)
    back = sector_to_twist(z)
    before = generator_values(pres, sigma)
    after = [field_holonomy(z, pres.generator_loop(k)) for k in range(pres.rank)]
    again = generator_values(pres, back)
    fac = factorize(z, frame)
    z2 = twist_to_sector(fac.phase_part)
    # z2 ≅ z via t_a = S_a: t_b z2(b,a) = z(b,a) t_a
    worst_eq = 0.0
    for b, a in P.comparability_edges:
        lhs = z2.value(b, a) * fac.intertwiner[b]
        rhs = z.value(b, a) * fac.intertwiner[a]
        worst_eq = max(worst_eq, abs(lhs.scalar - rhs.scalar) if lhs.letters == rhs.letters else math.inf)
    loops_gauged = generator_values(pres, fac.phase_part)
    err = max(
        [abs(x - y) for x, y in zip(before, after)]
        + [abs(x - y) for x, y in zip(before, again)]
        + [abs(x - y) for x, y in zip(before, loops_gauged)],
        default=0.0,
    )
    return {
        "generators": [
            {
                "gen": k,
                "twist_phase": cmath.phase(before[k]),
                "sector_phase": cmath.phase(after[k]),
                "roundtrip_phase": cmath.phase(again[k]),
                "gauged_phase": cmath.phase(loops_gauged[k]),
            }
            for k in range(pres.rank)
        ],
        "max_loop_error": err,
        "equivalence_defect": worst_eq,
        "reconstruction_defect": _max_phase_gap(fac.reconstruct(), z),
    }


def _max_phase_gap(z1: FieldCocycle, z2: FieldCocycle) -> float:
    return max(
        (abs(z1.phase(*e) - z2.phase(*e)) for e in z1.poset.comparability_edges),
        default=0.0,
    )


@dataclass
class SectorReport:
    charge: int | None
    kappa: int | None
    d: int | None
    tau: int
    character: list  # unit complex per reduced generator
    trivial: bool
    periods: list = field(default_factory=list)
    periods_roundtrip: bool | None = None

    def to_dict(self) -> dict:
        return {
            "charge": self.charge,
            "kappa": self.kappa,
            "d": self.d,
            "tau": self.tau,
            "character": [
                {"gen": k, "phase": float(cmath.phase(c)) + 0.0} for k, c in enumerate(self.character)
            ],
            "trivial": self.trivial,
            "periods": [float(x) + 0.0 for x in self.periods],
        }


def _kappa(z: FieldCocycle, P: CausalPoset) -> int:
    for a in P.ids:
        if statistics_choice(P, a) is not None:
            eps = statistics_phase(z, a, P)
            if abs(eps - 1) < 1e-12:
                return 1
            if abs(eps + 1) < 1e-12:
                return -1
            raise ValueError("statistics undefined for this cocycle")
    raise ValueError("insufficient causal disjointness")


def _periods_check(P, pres, periods, character, tol) -> bool:
    A = potential_from_character(P, pres, periods)
    sigma = twist_from_potential(potential_cocycle(P, A))
    vals = generator_values(pres, sigma)
    return all(abs(x - y) <= tol for x, y in zip(vals, character))


def analyze(z, P: CausalPoset, pres: Pi1Presentation, frame: PathFrame | None = None, tol: float = TOL) -> SectorReport:
    if isinstance(z, FieldCocycle):
        character = [field_holonomy(z, pres.generator_loop(k)) for k in range(pres.rank)]
        rep = HolonomyRep.from_free(pres, [[[c]] for c in character], tol) if pres.rank else None
        tau = rep_topological_dimension(rep, tol) if rep is not None else 1
        trivial = all(abs(c - 1) <= tol for c in character)
        periods = [-cmath.phase(c) for c in character]
        ok = _periods_check(P, pres, periods, character, tol)
        if frame is not None:
            fac = factorize(z, frame)
            if fac.intertwiner_defect() > tol:
                raise ValueError("charged component not equivalent to the bare transporter")
        return SectorReport(z.charge, _kappa(z, P), 1, tau, character, trivial, periods, ok)
    if isinstance(z, UnitaryCocycle):
        hol = holonomy_rep(z, pres, tol)
        tau = rep_topological_dimension(hol, tol)
        if z.dim == 1:
            character = [complex(m[0, 0]) for m in hol.free_images()]
            periods = [-cmath.phase(c) for c in character]
            ok = _periods_check(P, pres, periods, character, tol)
        else:
            character, periods, ok = [], [], None
        return SectorReport(None, None, None, tau, character, hol.topologically_trivial, periods, ok)
    raise TypeError("expected a FieldCocycle or UnitaryCocycle")


def field_to_matrix(z: FieldCocycle) -> UnitaryCocycle:
    """U(1) matrix model of the phase cocycle of z (drops the field letters)."""
    return UnitaryCocycle.from_rule(z.poset, 1, lambda b, a: [[z.phase(b, a)]])

