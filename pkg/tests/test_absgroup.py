import itertools

import pytest
from hypothesis import given, strategies as st

import oracles
from normtower import absgroup as A
from normtower.permcore import Permutation, PermGroup


def cyclic_table(n):
    return [[(a + b) % n for b in range(n)] for a in range(n)]


def test_table_validation():
    with pytest.raises(ValueError):
        A.FiniteGroup([])
    with pytest.raises(ValueError):
        A.FiniteGroup([[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        A.FiniteGroup([[0, 1], [1, 1]])
    # a loop that is not associative: identity 0, every row a permutation
    bad = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(ValueError):
        A.FiniteGroup(bad)


def test_basic_arithmetic():
    G = A.catalog("sym3")
    assert len(G) == 6 and G.is_centreless()
    assert sorted(G.element_order(x) for x in range(6)) == [1, 2, 2, 2, 3, 3]
    for g, x in itertools.product(range(6), repeat=2):
        assert G.mul(G.conj(g, x), g) == G.mul(g, x)
    assert G.closure(G.generators) == frozenset(range(6))
    assert A.FiniteGroup.from_json(G.to_json()).table == G.table


@pytest.mark.parametrize("name", ["sym3", "cyclic4", "klein4", "dihedral8", "dihedral10", "alt4", "dihedral12"])
def test_automorphisms_match_brute_force(name):
    G = A.catalog(name)
    assert sorted(A.automorphisms(G, 100)) == sorted(oracles.table_automorphisms(G.table))


@pytest.mark.parametrize(
    "name,centre,aut",
    [("cyclic4", 4, 2), ("klein4", 4, 6), ("dihedral8", 2, 8), ("dihedral12", 2, 12), ("sym4", 1, 24)],
)
def test_controls(name, centre, aut):
    G = A.catalog(name)
    assert len(G.center()) == centre
    assert len(A.aut_abstract(G).group) == aut
    if centre > 1:
        with pytest.raises(A.NotCentreless):
            A.automorphism_tower(G)


def test_aut_table_is_composition():
    G = A.catalog("dihedral10")
    R = A.aut_abstract(G)
    assert R.maps[0] == tuple(range(len(G)))
    for i, j in itertools.product(range(len(R.maps)), repeat=2):
        comp = tuple(R.maps[i][R.maps[j][x]] for x in range(len(G)))
        assert R.maps[R.group.mul(i, j)] == comp
    assert len(set(R.inner)) == len(G)
    assert A.inner_is_normal_and_selfcentralising(G)


def test_order_bound():
    with pytest.raises(A.OrderBoundExceeded):
        A.automorphisms(A.catalog("sym4"), bound=10)


TAUS = {
    "trivial": (0, [1]),
    "sym3": (0, [6]),
    "dihedral10": (1, [10, 20]),
    "alt4": (1, [12, 24]),
    "dihedral14": (1, [14, 42]),
    "dihedral18": (1, [18, 54]),
    "dih_z3z3": (1, [18, 432]),
    "frobenius20": (0, [20]),
    "frobenius21": (1, [21, 42]),
    "dihedral22": (1, [22, 110]),
    "sym4": (0, [24]),
}


def test_catalogue_lists_every_centreless_group():
    assert sorted(TAUS) == sorted(A.CENTRELESS_UP_TO_24)


@pytest.mark.parametrize("name", A.CENTRELESS_UP_TO_24)
def test_tower_equals_normalisers(name):
    G = A.catalog(name)
    r = A.check_tower_equals_normalisers(G, A.CATALOG_BOUND)
    assert r.passed
    assert (r.tau, r.automorphism_orders) == TAUS[name]
    assert r.normaliser_orders == r.automorphism_orders


@given(st.sampled_from(["sym3", "dihedral10", "alt4", "dihedral12"]), st.randoms(use_true_random=False))
def test_relabelled_tables_give_same_aut_order(name, rng):
    G = A.catalog(name)
    n = len(G)
    p = [0] + rng.sample(range(1, n), n - 1)
    inv = [0] * n
    for i, x in enumerate(p):
        inv[x] = i
    table = [[p[G.mul(inv[a], inv[b])] for b in range(n)] for a in range(n)]
    H = A.FiniteGroup(table)
    assert len(A.automorphisms(H)) == len(A.automorphisms(G))
    assert sorted(H.class_sizes()) == sorted(G.class_sizes())


def test_regular_representation_round_trip():
    G = A.catalog("alt4")
    R = G.regular_representation()
    assert R.order() == 12 and R.degree == 12
    H = A.from_perm_group(R)
    assert len(A.automorphisms(H)) == len(A.automorphisms(G)) == 24


def test_cyclic_group_from_table():
    G = A.FiniteGroup(cyclic_table(5))
    assert len(A.automorphisms(G)) == 4 and len(G.center()) == 5


def test_from_perm_group_matches_order():
    G = A.from_perm_group(PermGroup(4, [Permutation.from_cycles(4, (0, 1, 2, 3))]))
    assert len(G) == 4 and all(G.element_order(x) in (1, 2, 4) for x in range(4))
