import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from absectors.cocycle import (
    CocycleError,
    HolonomyRep,
    PathFrame,
    UnitaryCocycle,
    assemble_multiplet,
    build_frame,
    character_data,
    check_cocycle,
    commutant_dimension,
    evaluate_path,
    flat_bundle_from_holonomy,
    holonomy_rep,
    intertwiner_space,
    intertwines,
    join,
    rep_topological_dimension,
    split_components,
    topological_dimension,
)
from absectors.flatpot import FlatPotential, potential_cocycle
from absectors.homotopy import PosetPath, approximate_curve
from conftest import frame, net, pres
from oracles import brute_intertwiners, exact_commutant_dimension

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def haar(n, rng):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def potential_cocycle_u1(P, rng):
    A = FlatPotential(P.base, tuple(rng.uniform(-3, 3, len(P.base.edges))))
    return UnitaryCocycle.from_abelian(potential_cocycle(P, A))


def coboundary(z, rng):
    V = {a: haar(z.dim, rng) for a in z.poset.ids}
    return UnitaryCocycle(z.poset, z.dim, {(b, a): V[b] @ m @ V[a].conj().T for (b, a), m in z.values.items()})


def random_cocycle(fx, dim, seed):
    rng = np.random.default_rng(seed)
    P, pr = net(*fx), pres(*fx)
    zeta = coboundary(UnitaryCocycle.identity(P), rng)
    rep = HolonomyRep.from_free(pr, [haar(dim, rng) for _ in range(pr.rank)])
    return coboundary(assemble_multiplet(rep, zeta, frame(*fx)), rng)


def test_potential_cocycle_is_valid_and_has_expected_holonomy(circle6):
    A = FlatPotential.from_edges(circle6.base, {(i, (i + 1) % 6): 0.1 * (i + 1) for i in range(6)})
    z = UnitaryCocycle.from_abelian(potential_cocycle(circle6, A))
    assert check_cocycle(z).ok
    loop = approximate_curve(circle6, list(range(6)), closed=True)
    assert evaluate_path(z, loop)[0, 0] == pytest.approx(np.exp(-2.1j), abs=1e-12)


def test_check_cocycle_reports_violations(circle6):
    z = UnitaryCocycle.identity(circle6)
    b, a = circle6.comparability_edges[0]
    z.values[(b, a)] = np.array([[2.0]])
    kinds = check_cocycle(z).kinds()
    assert {"unitarity", "adjoint"} <= kinds
    w = UnitaryCocycle.identity(circle6)
    w.values[(b, a)] = np.array([[1j]])
    w.values[(a, b)] = np.array([[-1j]])
    assert "cocycle" in check_cocycle(w).kinds()


def test_missing_value_raises(circle6):
    z = UnitaryCocycle.identity(circle6)
    b, a = circle6.comparability_edges[0]
    del z.values[(b, a)]
    with pytest.raises(CocycleError, match="cocycle not total"):
        check_cocycle(z)
    with pytest.raises(CocycleError, match="cocycle not total"):
        z.value(b, a)


def test_incomplete_frame(circle6):
    with pytest.raises(CocycleError, match="incomplete path frame"):
        split_components(UnitaryCocycle.identity(circle6), PathFrame(0, {0: PosetPath.trivial(0)}))


def test_join_dimension_mismatch(circle6):
    f = frame("circle", 6)
    with pytest.raises(CocycleError, match="incompatible dimensions"):
        join(UnitaryCocycle.identity(circle6, 2), UnitaryCocycle.identity(circle6, 1), f)


@pytest.mark.parametrize("fx,dim", [(("circle", 6), 1), (("circle", 8), 2), (("wedge", 6, 6), 2)])
@pytest.mark.parametrize("seed", range(3))
def test_split_join_roundtrip(fx, dim, seed):
    z = random_cocycle(fx, dim, seed)
    zc, u = split_components(z, frame(*fx))
    assert check_cocycle(zc).ok and check_cocycle(u).ok
    assert holonomy_rep(zc, pres(*fx)).topologically_trivial
    assert join(u, zc, frame(*fx)).max_distance(z) <= 1e-12


@pytest.mark.parametrize("seed", range(3))
def test_holonomy_is_coboundary_invariant_up_to_conjugation(seed):
    z = random_cocycle(("wedge", 6, 6), 2, seed)
    rng = np.random.default_rng(100 + seed)
    z2 = coboundary(z, rng)
    pr = pres("wedge", 6, 6)
    h1 = holonomy_rep(z, pr).free_images()
    h2 = holonomy_rep(z2, pr).free_images()
    for a, b in zip(h1, h2):
        assert np.sort_complex(np.linalg.eigvals(a)) == pytest.approx(np.sort_complex(np.linalg.eigvals(b)), abs=1e-9)


@pytest.mark.parametrize("seed", range(4))
def test_intertwiner_dimension_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    P, pr = net("circle", 6), pres("circle", 6)
    za = potential_cocycle_u1(P, rng)
    zc, _ = split_components(za, frame("circle", 6))
    one = UnitaryCocycle.identity(P)
    two = UnitaryCocycle.identity(P, 2)
    cases = [(one, za), (one, zc), (two, two), (za, coboundary(za, rng)), (za.direct_sum(one), one.direct_sum(za))]
    for z, z2 in cases:
        basis = intertwiner_space(z, z2, pr)
        assert len(basis) == brute_intertwiners(z, z2)
        for t in basis:
            assert intertwines(t, z, z2, 1e-9)


def test_intertwiner_examples(circle6):
    one = UnitaryCocycle.identity(circle6)
    A = FlatPotential.from_edges(circle6.base, {(0, 1): 2.1})
    za = UnitaryCocycle.from_abelian(potential_cocycle(circle6, A))
    assert len(intertwiner_space(one, za)) == 0
    assert len(intertwiner_space(UnitaryCocycle.identity(circle6, 2), UnitaryCocycle.identity(circle6, 2))) == 4


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3))
def test_commutant_dimension_against_exact_rank(seed, n):
    rng = np.random.default_rng(seed)
    blocks = [np.diag(np.exp(1j * rng.integers(0, 3, n) * np.pi / 2)) for _ in range(2)]
    assert commutant_dimension(blocks) == exact_commutant_dimension(
        [[[complex(round(x.real), round(x.imag)) for x in row] for row in b] for b in blocks]
    )


def test_commutant_examples():
    assert commutant_dimension([np.eye(2)]) == 4
    assert commutant_dimension([X, Z]) == 1
    assert commutant_dimension([Z]) == 2


def test_tau_cases():
    pr = pres("circle", 6)
    assert rep_topological_dimension(HolonomyRep.from_free(pr, [np.eye(1)])) == 1
    ph = np.exp(0.7j)
    assert rep_topological_dimension(HolonomyRep.from_free(pr, [ph * np.eye(2)])) == 1
    pw = pres("wedge", 6, 6)
    pauli = HolonomyRep.from_free(pw, [X, Z])
    assert commutant_dimension(pauli.free_images()) == 1
    assert rep_topological_dimension(pauli) == 2


def test_not_a_factor():
    pr = pres("circle", 6)
    with pytest.raises(CocycleError, match="holonomy algebra not a factor"):
        rep_topological_dimension(HolonomyRep.from_free(pr, [Z]))


def test_pauli_multiplet_and_bundle():
    fx = ("wedge", 6, 6)
    P, pw, f = net(*fx), pres(*fx), frame(*fx)
    rep = HolonomyRep.from_free(pw, [X, Z])
    z = assemble_multiplet(rep, UnitaryCocycle.identity(P), f)
    assert check_cocycle(z).ok
    assert topological_dimension(z, pw) == 2
    bundle = flat_bundle_from_holonomy(pw, rep)
    assert bundle.simplex_defect() <= 1e-12
    assert check_cocycle(bundle.as_cocycle()).ok
    back = holonomy_rep(bundle.as_cocycle(), pw).free_images()
    assert np.allclose(back[0], X) and np.allclose(back[1], Z)


def test_non_flat_rep_rejected():
    fx = ("circle", 6)
    P, pr = net(*fx), pres(*fx)
    z = UnitaryCocycle.identity(P)
    o, a, c = P.chains[0]
    z.values[(c, o)] = np.array([[1j]])
    z.values[(o, c)] = np.array([[-1j]])
    with pytest.raises(CocycleError, match="homotopy violation"):
        holonomy_rep(z, pr)


def test_character_data(circle6):
    pr = pres("circle", 6)
    rep = HolonomyRep.from_free(pr, [[[np.exp(-2.1j)]]])
    assert character_data(rep)[0] == pytest.approx(-2.1)
    with pytest.raises(CocycleError):
        character_data(HolonomyRep.from_free(pr, [np.eye(2)]))


def test_multiplet_rejects_twisted_charge(circle6):
    pr = pres("circle", 6)
    A = FlatPotential.from_edges(circle6.base, {(0, 1): 1.0})
    za = UnitaryCocycle.from_abelian(potential_cocycle(circle6, A))
    with pytest.raises(CocycleError, match="not topologically trivial"):
        assemble_multiplet(HolonomyRep.from_free(pr, [np.eye(1)]), za, build_frame(circle6))
