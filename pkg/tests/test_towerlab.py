import pytest

import oracles
from normtower.graphs import Graph, path_graph, rigid_family
from normtower.grouptop import check_perm_iso
from normtower.permcore import LabeledAction, PermGroup, wreath_top
from normtower import towerlab as T

FAM = rigid_family(5)
SEED = FAM[0]


def elems(G):
    return [g.images for g in G.elements()]


def test_components():
    assert T.delta(0) == (0,) and T.delta(2) == (0, 1, 2, 3)
    assert T.delta1(2) == (4, 5, 6, 7)
    assert [c.points for c in T.stage_cells(2)] == [(0,), (1,), (2, 3)]


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_F_orders(n):
    assert T.f_group(n).order() == 2 ** (2 ** n - 1)
    assert T.f_group(n).degree == 2 ** n


def test_F_is_an_iterated_wreath():
    assert T.f_group(1) == PermGroup.symmetric(2)
    w = T.wreath_witness(2)
    two = wreath_top(LabeledAction(PermGroup.symmetric(2)), 2).group
    assert w is not None and check_perm_iso(two, T.f_group(2), w)
    for n in (1, 2, 3):
        assert T.wreath_witness(n) is not None


@pytest.mark.parametrize("n", [1, 2])
def test_stage_tower_against_brute_force(n):
    d = 2 ** n
    want = oracles.normaliser_tower_orders(elems(PermGroup.symmetric(d)), elems(T.h_group(n)))
    assert T.stage_tower(n).orders() == want
    assert T.stage_tower(n, "backtrack").orders() == want


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_stage_heights_and_conditions(n):
    s = T.build_stage(SEED, n)
    assert T.stage_tower_height(s) == n
    rep = T.check_conditions(s)
    assert rep.passed, rep.failed()
    assert {c.label for c in rep.checks} >= ({"1", "2", "6"} | ({"3", "4", "5", "7"} if n else set()))
    assert s.graph.graph.n == SEED.n * 2 ** n


@pytest.mark.parametrize("n,failing", [(2, ["2", "3", "6"]), (3, ["2", "3", "5", "6"])])
def test_tampered_stage_fails(n, failing):
    rep = T.check_conditions(T.tamper(T.build_stage(SEED, n)))
    assert not rep.passed
    assert rep.failed() == failing


def test_stage_input_checks():
    with pytest.raises(T.InvalidSeed):
        T.build_stage(path_graph(4), 1)
    with pytest.raises(T.InvalidSeed):
        T.build_stage(Graph.from_edges(6, [(0, 1)]), 1)
    with pytest.raises(T.StageLimit):
        T.build_stage(SEED, 4)
    with pytest.raises(T.StageLimit):
        T.build_stage(SEED, -1)


@pytest.mark.parametrize("n", [1, 2])
def test_vertex_level_matches_component_level(n):
    s = T.build_stage(SEED, n)
    assert T.vertex_level_check(s.graph, PermGroup.symmetric(s.degree))


def test_stage_json():
    d = T.build_stage(SEED, 2).to_json()
    assert d["F_order"] == 8 and d["tower"]["height"] == 2 and d["components"] == 4


@pytest.mark.parametrize("n,m", [(2, 1), (3, 1), (3, 2)])
def test_D_height_and_wreath_level(n, m):
    D = T.build_D(SEED, n, m)
    assert D.tower.height == m
    assert D.tower.levels[m] == D.expected_level()
    k = 2 ** m
    want = T.f_group(m).order() ** 3 * 6
    for g in range(m + 1, n):
        want *= T.f_group(g).order()
    # F_m on Delta_m, F_m wr Sym(3), then F_g for m < g < n
    assert D.expected_level().order() == want * T.f_group(m).order()
    assert sum(len(b) for b in D.wreath_blocks()) == 3 * k


def test_D_input_checks():
    with pytest.raises(T.StageLimit):
        T.build_D(SEED, 2, 2)
    with pytest.raises(T.StageLimit):
        T.build_D(SEED, 4, 1)


@pytest.mark.parametrize("alpha", [0, 1, 2])
def test_assembly_height(alpha):
    a = T.assemble_main(FAM, 3, alpha)
    assert a.tower().height == alpha
    sub = T.subtowers(a)
    assert sub.get("F_block", 0) == 0
    if alpha > 1:
        assert sub["B_pair"] == 1


def test_assembly_input_checks():
    with pytest.raises(ValueError):
        T.assemble_main(FAM, 3, 3)
    with pytest.raises(ValueError):
        T.assemble_main(rigid_family(2), 3, 1)


def test_partitions_and_prediction():
    a = T.assemble_main(FAM, 3, 2)
    assert T.partition_for(3, 2, 1) == [[1, 2], [0], [3]]
    assert T.partition_for(3, 1, 2) == [[1, 2], [0], [3]]
    assert T.predict(a, T.identity_partition(3)) == 2
    assert T.predict(a, [[0, 1, 2, 3]]) is None
    with pytest.raises(ValueError):
        T.relabel_by_E(a, [[0, 1]])


@pytest.mark.parametrize("L,alpha,beta", [(3, a, b) for a in range(3) for b in (1, 2)] + [(4, 1, 3), (4, 3, 2)])
@pytest.mark.parametrize("rep", ["min", "max"])
def test_relabel(L, alpha, beta, rep):
    fam = rigid_family(L + 1)
    a = T.assemble_main(fam, L, alpha)
    r = T.relabel_by_E(a, T.partition_for(L, alpha, beta), rep)
    assert r.predicted == r.measured == beta
    assert r.ok and r.shape_match is not False
    if beta != alpha:
        assert r.shape_match


def test_assembly_vertex_level():
    a = T.assemble_main(FAM, 3, 2)
    assert T.vertex_level_check(a.graph(), a.ambient())


def test_extended_stage_four():
    s = T.build_stage(SEED, 4, max_stage=T.EXTENDED_MAX_STAGE)
    assert T.stage_tower_height(s) == 4 and s.F.order() == 2 ** 15
    assert T.check_conditions(s).passed
