import pytest
from hypothesis import given, settings, strategies as st

from absectors.homotopy import (
    PathError,
    PosetPath,
    abelianize,
    approximate_curve,
    are_homotopic,
    base_fundamental_cycles,
    compose_paths,
    cyclic_reduce,
    free_reduce,
    integer_rank,
    invert_word,
    loop_class,
    pi1_presentation,
    reverse_path,
)
from absectors.poset import build_net
from conftest import net, pres
from oracles import base_curve_of_loop, fixture_graph, graph_curve_word, order_complex_betti1

GRAPHS = [("circle", 6), ("circle", 8), ("wedge", 6, 6)]


def conj_class(word):
    w = cyclic_reduce(word)
    if not w:
        return ()
    return min(w[i:] + w[:i] for i in range(len(w)))


def random_loop(P, pr, data, max_len=25):
    cur = pr.base
    ds = [cur]
    for _ in range(data.draw(st.integers(0, max_len))):
        cur = data.draw(st.sampled_from(sorted(P.neighbours(cur))))
        ds.append(cur)
    walk = PosetPath.through(ds)
    return reverse_path(pr.tree_path(cur)) * walk


@pytest.mark.parametrize("fx", [("line", 5)] + GRAPHS)
def test_h1_rank_matches_order_complex(fx):
    assert pres(*fx).h1_rank == order_complex_betti1(net(*fx))


def test_circle_group_is_free_of_rank_one():
    pr = pres("circle", 6)
    assert pr.is_free and pr.rank == 1
    assert pres("wedge", 6, 6).rank == 2
    assert pres("line", 5).rank == 0


@pytest.mark.parametrize("fx", GRAPHS)
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_loop_word_matches_base_curve_oracle(fx, data):
    P, pr = net(*fx), pres(*fx)
    loop = random_loop(P, pr, data)
    verts, edges = fixture_graph(*fx)
    expect = graph_curve_word(verts, edges, base_curve_of_loop(P, loop))
    assert conj_class(loop_class(pr, loop)) == conj_class(expect)


@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_backtracks_and_chain_fills_preserve_class(data):
    P, pr = net("wedge", 6, 6), pres("wedge", 6, 6)
    loop = random_loop(P, pr, data)
    ds = loop.diamonds
    i = data.draw(st.integers(0, len(ds) - 1))
    x = data.draw(st.sampled_from(sorted(P.neighbours(ds[i]))))
    moved = ds[: i + 1] + [x] + ds[i:]
    assert are_homotopic(pr, loop, PosetPath.through(moved)) is True
    # replace a step by a two-step route through a chain
    for j in range(len(ds) - 1):
        s, t = ds[j], ds[j + 1]
        lo, hi = (s, t) if P.leq(s, t) else (t, s)
        mids = [m for m in P.ids if m not in (lo, hi) and P.leq(lo, m) and P.leq(m, hi)]
        if mids:
            filled = ds[: j + 1] + [mids[0]] + ds[j + 1:]
            assert are_homotopic(pr, loop, PosetPath.through(filled)) is True
            break


@pytest.mark.parametrize("fx", GRAPHS)
def test_fundamental_cycles_give_single_generators(fx):
    P, pr = net(*fx), pres(*fx)
    for k, cyc in enumerate(base_fundamental_cycles(P.base)):
        loop = approximate_curve(P, cyc, closed=True)
        assert conj_class(loop_class(pr, loop)) == ((k, 1),)
        assert conj_class(loop_class(pr, pr.generator_loop(k))) == ((k, 1),)


def test_winding_classes_distinct():
    P, pr = net("circle", 8), pres("circle", 8)
    once = approximate_curve(P, list(range(8)), closed=True)
    twice = approximate_curve(P, list(range(8)) * 2, closed=True)
    back = approximate_curve(P, list(range(8))[::-1], closed=True)
    assert are_homotopic(pr, once, twice) is False
    assert conj_class(loop_class(pr, twice)) == ((0, 1), (0, 1))
    assert conj_class(loop_class(pr, back)) == ((0, -1),)


def test_approximate_curve_needs_base_edges():
    P = net("circle", 6)
    with pytest.raises(PathError, match="not joined by a base edge"):
        approximate_curve(P, [0, 2])


def test_cover_too_coarse():
    from absectors.poset import CausalPoset

    P0 = net("circle", 6)
    singles = {o: sorted(P0.support(o)) for o in P0.ids if len(P0.support(o)) == 1}
    P = CausalPoset(P0.base, singles)
    with pytest.raises(PathError, match="cover too coarse"):
        approximate_curve(P, [0, 1])


def test_composition_order_and_errors():
    p = PosetPath.through([0, 6])
    q = PosetPath.through([6, 1])
    pq = compose_paths(q, p)
    assert pq.diamonds == [0, 6, 1]
    with pytest.raises(PathError, match="non-composable paths"):
        compose_paths(p, p)
    assert reverse_path(pq).diamonds == [1, 6, 0]


def test_invalid_step_is_rejected():
    P = net("circle", 6)
    with pytest.raises(PathError, match="invalid path"):
        PosetPath.through([0, 3]).check(P)


def test_not_a_loop():
    pr = pres("circle", 6)
    with pytest.raises(PathError, match="not a loop at base"):
        are_homotopic(pr, PosetPath.through([0, 6]), PosetPath.trivial(0))


def test_disconnected_poset_rejected():
    from absectors.poset import CausalPoset

    P0 = net("circle", 8)
    P = CausalPoset(P0.base, {0: [0], 1: [4], 2: [0, 1]})
    with pytest.raises(PathError, match="poset not pathwise connected"):
        pi1_presentation(P)


def test_presentation_independent_of_base():
    P = net("circle", 6)
    for b in (0, 7, 14):
        assert pi1_presentation(P, base=b).h1_rank == 1


@given(st.lists(st.tuples(st.integers(0, 3), st.sampled_from([1, -1])), max_size=20))
def test_free_reduce_properties(word):
    w = free_reduce(word)
    assert free_reduce(w) == w
    assert free_reduce(tuple(w) + invert_word(w)) == ()
    assert abelianize(w, 4) == abelianize(word, 4)


def test_integer_rank():
    assert integer_rank([[2, 0], [0, 3]]) == 2
    assert integer_rank([[1, 1], [2, 2]]) == 1
    assert integer_rank([]) == 0


@pytest.mark.parametrize("n", [6, 7, 9])
def test_circle_family_rank(n):
    assert pi1_presentation(build_net("circle", n)).h1_rank == 1
