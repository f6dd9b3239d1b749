import random

import pytest
from hypothesis import given, strategies as st

import oracles
from normtower.normtrees import (
    EMPTY,
    InvalidTree,
    IsoError,
    PartialTreeIso,
    Tree,
    aut_order,
    build_normal,
    end_extend,
    enumerate_extensions,
    extend_iso,
    is_end_extension,
    is_isomorphism,
    leaf_permutation,
    root_map,
    trees_isomorphic,
    validate_normal,
)

heights = st.integers(0, 6)


def test_build_normal_shape():
    assert build_normal(0) == EMPTY
    assert build_normal(4).level_sizes() == [1, 2, 4, 8]
    with pytest.raises(ValueError):
        build_normal(-1)


def test_invalid_trees():
    with pytest.raises(InvalidTree):
        Tree(((None,), ()))
    with pytest.raises(InvalidTree):
        Tree(((None,), (1,)))
    with pytest.raises(InvalidTree):
        Tree(((0,),))


@given(heights)
def test_build_normal_is_normal(n):
    v = validate_normal(build_normal(n))
    assert v.normal and not v.violations


def test_validation_catches_each_defect():
    two_roots = Tree(((None, None), (0, 0, 1, 1)))
    three_children = Tree(((None,), (0, 0, 0)))
    dead_end = Tree(((None,), (0, 0), (0, 0)))
    for t in (two_roots, three_children, dead_end):
        assert not validate_normal(t).normal
    # a single node at the top level still has to split below it
    assert validate_normal(Tree(((None,),))).normal


@given(heights, st.integers(0, 3))
def test_end_extension(n, extra):
    t = build_normal(n)
    big = end_extend(t, n + extra)
    assert is_end_extension(t, big)
    assert big == build_normal(n + extra)
    assert validate_normal(big).normal


def test_end_extend_refuses_shrinking():
    with pytest.raises(ValueError):
        end_extend(build_normal(3), 2)


def test_restrict_and_subtree():
    t = build_normal(4)
    assert t.restrict(2) == build_normal(2)
    assert t.subtree((1, 1)) == build_normal(3)
    assert len(t.branches()) == 8
    assert t.pred((3, 5)) == [(0, 0), (1, 1), (2, 2)]
    assert Tree.from_json(t.to_json()) == t


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_extend_iso_between_normal_trees(n):
    S, T = build_normal(n), build_normal(n)
    m = extend_iso(root_map(S, T))
    assert is_isomorphism(S, T, m)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_witness_count_matches_tree_automorphisms(n):
    # n+1 levels give 2^n leaves; the automorphism count is 2^(2^n - 1)
    t = build_normal(n + 1)
    maps = list(enumerate_extensions(root_map(t, t)))
    assert len(maps) == aut_order(t) == 2 ** (2 ** n - 1)
    assert len({tuple(leaf_permutation(t, m)) for m in maps}) == len(maps)
    assert all(is_isomorphism(t, t, m) for m in maps)


def test_partial_map_extends_from_deeper_level():
    t = build_normal(4)
    swap = {(0, 0): (0, 0), (1, 0): (1, 1), (1, 1): (1, 0)}
    phi = PartialTreeIso(t, t, 1, swap)
    m = extend_iso(phi)
    assert is_isomorphism(t, t, m) and m[(1, 0)] == (1, 1)
    assert len(list(enumerate_extensions(phi))) == 2 ** 6


def test_partial_map_validation():
    t = build_normal(3)
    with pytest.raises(IsoError):
        extend_iso(PartialTreeIso(t, t, 1, {(0, 0): (0, 0)}))
    with pytest.raises(IsoError):
        extend_iso(PartialTreeIso(t, t, 5, {(0, 0): (0, 0)}))
    with pytest.raises(IsoError):
        extend_iso(root_map(t, build_normal(2)))


def test_non_isomorphic_subtrees_fail():
    S = Tree(((None,), (0, 0), (0, 0)))
    T = Tree(((None,), (0, 0), (0, 1)))
    with pytest.raises(IsoError):
        extend_iso(root_map(S, T))
    assert list(enumerate_extensions(root_map(S, T))) == []


def test_aut_order_against_enumeration():
    rng = random.Random(5)
    for _ in range(30):
        levels = oracles.random_tree(rng, max_nodes=12, max_height=4)
        t = Tree(levels)
        assert len(list(enumerate_extensions(root_map(t, t)))) == aut_order(t)
        u = Tree(oracles.shuffle_tree(levels, rng))
        assert trees_isomorphic(t, u)
        assert is_isomorphism(t, u, extend_iso(root_map(t, u)))


def test_end_extension_composes():
    t = build_normal(2)
    assert end_extend(end_extend(t, 3), 5) == end_extend(t, 5)
    assert end_extend(t, 2) == t
    assert end_extend(t, 4).level_sizes() == [1, 2, 4, 8]


def test_full_height_partial_map_is_returned_unchanged():
    t = build_normal(3)
    m = extend_iso(root_map(t, t))
    phi = PartialTreeIso(t, t, 2, m)
    assert extend_iso(phi) == m


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_branches(n):
    bs = build_normal(n).branches()
    assert len(bs) == 2 ** (n - 1) and all(len(b) == n for b in bs)


def test_level_one_maps_extend():
    t = build_normal(3)
    for swap in (False, True):
        lv1 = {(1, 0): (1, int(swap)), (1, 1): (1, 1 - int(swap))}
        phi = PartialTreeIso(t, t, 1, {(0, 0): (0, 0), **lv1})
        m = extend_iso(phi)
        assert is_isomorphism(t, t, m) and all(m[k] == v for k, v in phi.mapping.items())
