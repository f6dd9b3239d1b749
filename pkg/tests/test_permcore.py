import itertools
import math

import pytest
from hypothesis import given, strategies as st

import oracles
from normtower.permcore import (
    Cell,
    DegreeMismatch,
    LabeledAction,
    Permutation,
    PermGroup,
    compose,
    direct_product,
    group_from_generators,
    wreath_top,
)


def perms(n):
    return st.permutations(list(range(n))).map(Permutation)


def groups(max_degree=7, max_gens=3):
    return st.integers(1, max_degree).flatmap(
        lambda n: st.lists(perms(n), max_size=max_gens).map(lambda gs: PermGroup(n, gs))
    )


# -- permutations -------------------------------------------------------------


def test_compose_is_left_action():
    p = Permutation.from_cycles(3, (0, 1))
    q = Permutation.from_cycles(3, (1, 2))
    r = compose(p, q)
    assert r.images == (1, 2, 0)
    assert all(r(x) == p(q(x)) for x in range(3))
    # the other convention gives a different answer, so the choice is observable
    assert compose(q, p).images == (2, 0, 1)


def test_compose_identity_and_inverse():
    p = Permutation([2, 0, 3, 1])
    assert compose(Permutation.identity(4), p) == p
    assert compose(p, p.inverse()).is_identity()


def test_compose_degree_mismatch():
    with pytest.raises(DegreeMismatch):
        compose(Permutation([1, 0]), Permutation([0, 1, 2]))


def test_rejects_non_bijection():
    with pytest.raises(ValueError):
        Permutation([0, 0, 1])


@given(st.integers(1, 8).flatmap(lambda n: st.tuples(perms(n), perms(n), perms(n))))
def test_associative_and_inverse_antihom(t):
    p, q, r = t
    assert compose(compose(p, q), r) == compose(p, compose(q, r))
    assert compose(p, q).inverse() == compose(q.inverse(), p.inverse())


def test_cycles_roundtrip():
    p = Permutation.from_cycles(6, (0, 3, 1), (2, 5))
    assert Permutation.from_cycles(6, *p.cycles()) == p
    assert p.order() == 6


# -- groups -------------------------------------------------------------------


def test_trivial_group_from_empty_list():
    G = group_from_generators([], degree=3)
    assert G.order() == 1


def test_sym4_from_transposition_and_four_cycle():
    G = group_from_generators([Permutation.from_cycles(4, (0, 1)), Permutation.from_cycles(4, (0, 1, 2, 3))])
    assert G.order() == 24


def test_generator_degree_mismatch():
    with pytest.raises(DegreeMismatch):
        group_from_generators([Permutation([1, 0]), Permutation([1, 2, 0])])


@given(groups())
def test_order_and_membership_match_closure(G):
    elems = oracles.closure([g.images for g in G.generators], G.degree)
    assert G.order() == len(elems)
    for p in itertools.islice(itertools.permutations(range(G.degree)), 200):
        assert G.contains_raw(p) == (p in elems)


@given(groups(max_degree=6))
def test_elements_enumerates_group(G):
    assert {g.images for g in G.elements()} == oracles.closure([g.images for g in G.generators], G.degree)


def test_equality_is_mutual_membership():
    a = PermGroup(4, [Permutation.from_cycles(4, (0, 1)), Permutation.from_cycles(4, (0, 1, 2, 3))])
    b = PermGroup.symmetric(4)
    assert a == b
    assert a != PermGroup(4, [Permutation.from_cycles(4, (0, 1, 2, 3))])


def test_symmetric_order_large():
    assert PermGroup.symmetric(16).order() == math.factorial(16)


def test_restriction_and_json_roundtrip():
    G = PermGroup(5, [Permutation.from_cycles(5, (3, 4))])
    assert G.restriction([3, 4]).order() == 2
    with pytest.raises(ValueError):
        G.restriction([2, 3])
    assert PermGroup.from_json(G.to_json()) == G


# -- labelled actions ---------------------------------------------------------


def sym2():
    return LabeledAction(PermGroup.symmetric(2))


def test_product_of_one_factor():
    a = LabeledAction(PermGroup.symmetric(3))
    assert direct_product([a]).group == a.group


def test_product_of_two_sym2():
    P = direct_product([sym2(), sym2()])
    assert P.degree == 4 and P.group.order() == 4
    assert [c.name for c in P.cells] == ["0:all", "1:all"]


def test_product_of_trivial_factors():
    t = LabeledAction(PermGroup.trivial(3))
    assert direct_product([t, t]).group.order() == 1


def test_cells_must_partition():
    with pytest.raises(ValueError):
        LabeledAction(PermGroup.trivial(3), (Cell("a", "x", (0, 1)),))
    with pytest.raises(ValueError):
        LabeledAction(PermGroup.trivial(2), (Cell("a", "x", (0,)), Cell("a", "y", (1,))))


def test_product_keeps_tags():
    a = LabeledAction(PermGroup.trivial(2), (Cell("u", "Delta_0", (0,)), Cell("v", "Delta1_0", (1,))))
    P = direct_product([a, a])
    assert [c.tag for c in P.cells] == ["Delta_0", "Delta1_0"] * 2
    assert len(P.cells_tagged("Delta_0")) == 2


@given(st.lists(groups(max_degree=4, max_gens=2), min_size=1, max_size=3))
def test_product_order_multiplies(gs):
    P = direct_product([LabeledAction(g) for g in gs])
    assert P.group.order() == math.prod(g.order() for g in gs)


def test_sym2_wr_sym2():
    W = wreath_top(sym2(), 2)
    assert W.degree == 4 and W.group.order() == 8
    assert W.group.order() == len(oracles.closure([g.images for g in W.group.generators], 4))


def test_wreath_with_one_copy():
    a = LabeledAction(PermGroup.symmetric(3))
    assert wreath_top(a, 1).group == a.group


def test_sym2_wr_sym3():
    W = wreath_top(sym2(), 3)
    assert W.degree == 6 and W.group.order() == 48


def test_wreath_rejects_different_copies():
    with pytest.raises(ValueError):
        wreath_top(sym2(), 2, [sym2(), LabeledAction(PermGroup.trivial(2))])


@given(groups(max_degree=3, max_gens=2), st.integers(1, 3))
def test_wreath_order_formula(G, k):
    W = wreath_top(LabeledAction(G), k)
    assert W.group.order() == oracles.wreath_order(G.order(), k)
