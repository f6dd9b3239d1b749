import itertools

import pytest

from normtower import projline as P
from normtower.permcore import PermGroup

FIELDS = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49]


@pytest.mark.parametrize("q", FIELDS)
def test_field_self_test(q):
    K = P.Field(q)
    assert K.self_test()
    assert K.mult_order(K.primitive) == q - 1


@pytest.mark.parametrize("q", [4, 8, 9])
def test_field_axioms_in_full(q):
    K = P.Field(q)
    for a, b, c in itertools.product(range(q), repeat=3):
        assert K.mul(a, K.add(b, c)) == K.add(K.mul(a, b), K.mul(a, c))
        assert K.mul(K.mul(a, b), c) == K.mul(a, K.mul(b, c))
        assert K.add(K.add(a, b), c) == K.add(a, K.add(b, c))


def test_unsupported_fields():
    with pytest.raises(P.UnsupportedField):
        P.Field(6)
    with pytest.raises(P.UnsupportedField):
        P.Field(81)
    with pytest.raises(P.UnsupportedField):
        P.pgl2(3)
    assert P.prime_power(27) == (3, 3) and P.prime_power(7) == (7, 1)


def test_mobius_maps():
    L = P.ProjectiveLine(5)
    inv = L.mobius(0, 1, 1, 0)
    assert inv(0) == L.infinity and inv(L.infinity) == 0
    assert inv(2) == 3  # 1/2 = 3 mod 5
    assert L.mobius(1, 1, 0, 1)(L.infinity) == L.infinity
    with pytest.raises(ValueError):
        L.mobius(1, 2, 2, 4)
    with pytest.raises(ValueError):
        L.point(0, 0)


@pytest.mark.parametrize("q", [4, 5, 7, 8, 9, 11, 16])
def test_group_orders(q):
    n = P.prime_power(q)[1]
    assert P.pgl2(q).order() == P.pgl2_order(q) == q * (q - 1) * (q + 1)
    assert P.pgammal2(q).order() == n * P.pgl2_order(q)
    assert P.pgl2(q).is_transitive()


@pytest.mark.parametrize("q", [4, 8, 9, 16])
def test_pgl_is_normal_in_pgammal(q):
    assert P.pgl_normal_in_pgammal(q)


def test_galois_group():
    G = P.GaloisGroup(16)
    assert G.n == 4 and G.subgroup_orders() == [1, 2, 4]
    assert G.on_field().order() == 4 and G.on_field(2).order() == 2
    assert G.on_line(1) == PermGroup.trivial(17)
    with pytest.raises(ValueError):
        G.on_field(3)


@pytest.mark.parametrize("q", [4, 8, 9, 16])
def test_semilinear_tower(q):
    for h in P.GaloisGroup(q).subgroup_orders():
        r = P.verify_semilinear_tower(q, h)
        assert r.passed, r.to_json()
        n = P.GaloisGroup(q).n
        assert r.group_orders[-1] == n * P.pgl2_order(q)
        assert [o * P.pgl2_order(q) for o in r.galois_orders] == r.group_orders


def test_semilinear_tower_prime_field():
    r = P.verify_semilinear_tower(5, 1)
    assert r.passed and r.group_orders == [120]


def test_automorphisms_of_pgl_2_4_are_semilinear():
    from normtower import absgroup

    G = absgroup.from_perm_group(P.pgl2(4), "PGL(2,4)")
    assert G.is_centreless()
    A = absgroup.aut_abstract(G)
    assert len(A.group) == P.pgammal2(4).order() == 120
