"""PGL(2,q) and PGammaL(2,q) acting on the projective line over GF(q).

Field elements of GF(p^n) are integers whose base-p digits are polynomial
coefficients (lowest degree first) modulo a fixed irreducible polynomial.
Line points are the field elements ``0..q-1`` (the point ``(x:1)``) and
``q`` for ``(1:0)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .grouptop import Budget, centralizer_is_trivial, normaliser_tower
from .permcore import Permutation, PermGroup

# monic irreducible polynomials, low coefficients first, leading 1 omitted
IRREDUCIBLE = {
    (2, 2): (1, 1),  # x^2 + x + 1
    (2, 3): (1, 1, 0),  # x^3 + x + 1
    (2, 4): (1, 1, 0, 0),  # x^4 + x + 1
    (2, 5): (1, 0, 1, 0, 0),  # x^5 + x^2 + 1
    (3, 2): (2, 2),  # x^2 + 2x + 2
    (3, 3): (1, 2, 0),  # x^3 + 2x + 1
    (5, 2): (2, 4),  # x^2 + 4x + 2
    (7, 2): (3, 6),  # x^2 + 6x + 3
}


class UnsupportedField(ValueError):
    pass


def prime_power(q: int) -> tuple[int, int]:
    for p in range(2, q + 1):
        if q % p == 0:
            n, r = 0, q
            while r % p == 0:
                r //= p
                n += 1
            if r != 1:
                break
            return p, n
    raise UnsupportedField(f"{q} is not a prime power")


class Field:
    def __init__(self, q: int):
        p, n = prime_power(q)
        if n > 1 and (p, n) not in IRREDUCIBLE:
            raise UnsupportedField(f"no stored polynomial for GF({q})")
        self.q, self.p, self.n = q, p, n
        self.modulus = IRREDUCIBLE.get((p, n), ())
        self._mul = [[self._slow_mul(a, b) for b in range(q)] for a in range(q)]
        self._add = [[self._slow_add(a, b) for b in range(q)] for a in range(q)]
        self._inv = [0] * q
        for a in range(1, q):
            self._inv[a] = self._mul[a].index(1)
        self.primitive = self._find_primitive()

    def _digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.n):
            out.append(a % self.p)
            a //= self.p
        return out

    def _undigits(self, d) -> int:
        a = 0
        for c in reversed(d):
            a = a * self.p + c
        return a

    def _slow_add(self, a: int, b: int) -> int:
        return self._undigits([(x + y) % self.p for x, y in zip(self._digits(a), self._digits(b))])

    def _slow_mul(self, a: int, b: int) -> int:
        p, n = self.p, self.n
        if n == 1:
            return a * b % p
        da, db = self._digits(a), self._digits(b)
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(da):
            for j, y in enumerate(db):
                prod[i + j] = (prod[i + j] + x * y) % p
        for k in range(2 * n - 2, n - 1, -1):
            c = prod[k]
            if c:
                prod[k] = 0
                for i, m in enumerate(self.modulus):
                    prod[k - n + i] = (prod[k - n + i] - c * m) % p
        return self._undigits(prod[:n])

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return self._inv[a]

    def power(self, a: int, e: int) -> int:
        r = 1
        for _ in range(e):
            r = self._mul[r][a]
        return r

    def mult_order(self, a: int) -> int:
        k, x = 1, a
        while x != 1:
            x = self._mul[x][a]
            k += 1
        return k

    def _find_primitive(self) -> int:
        for a in range(1, self.q):
            if self.mult_order(a) == self.q - 1:
                return a
        raise UnsupportedField(f"stored polynomial for GF({self.q}) is not irreducible")

    def frobenius(self, a: int) -> int:
        return self.power(a, self.p)

    def self_test(self) -> bool:
        """Field axioms spot check plus cyclicity of the multiplicative group."""
        q = self.q
        for a in range(q):
            for b in range(q):
                if self._mul[a][b] != self._mul[b][a] or self._add[a][b] != self._add[b][a]:
                    return False
        for a in range(1, q):
            if self._mul[a][self._inv[a]] != 1:
                return False
        frob = [self.frobenius(a) for a in range(q)]
        hom = all(
            frob[self._mul[a][b]] == self._mul[frob[a]][frob[b]] and frob[self._add[a][b]] == self._add[frob[a]][frob[b]]
            for a in range(q) for b in range(q)
        )
        return hom and self.mult_order(self.primitive) == q - 1 and sorted(frob) == list(range(q))


@dataclass(frozen=True)
class ProjectiveLine:
    q: int

    @cached_property
    def field(self) -> Field:
        return Field(self.q)

    @property
    def infinity(self) -> int:
        return self.q

    @property
    def size(self) -> int:
        return self.q + 1

    def coords(self, i: int) -> tuple[int, int]:
        """Normalised representative: last nonzero coordinate is 1."""
        return (1, 0) if i == self.q else (i, 1)

    def point(self, x: int, y: int) -> int:
        K = self.field
        if y == 0:
            if x == 0:
                raise ValueError("(0:0) is not a point")
            return self.q
        return K.mul(x, K.inv(y))

    def mobius(self, a: int, b: int, c: int, d: int) -> Permutation:
        """``x -> (a x + b) / (c x + d)`` as a permutation of the line."""
        K = self.field
        if K.add(K.mul(a, d), _neg(K, K.mul(b, c))) == 0:
            raise ValueError("singular matrix")
        img = []
        for i in range(self.size):
            x, y = self.coords(i)
            img.append(self.point(K.add(K.mul(a, x), K.mul(b, y)), K.add(K.mul(c, x), K.mul(d, y))))
        return Permutation(img)

    def frobenius(self, power: int = 1) -> Permutation:
        K = self.field
        img = []
        for i in range(self.q):
            x = i
            for _ in range(power):
                x = K.frobenius(x)
            img.append(x)
        img.append(self.q)
        return Permutation(img)


def _neg(K: Field, a: int) -> int:
    for b in range(K.q):
        if K.add(a, b) == 0:
            return b
    raise AssertionError


def _line(q: int) -> ProjectiveLine:
    prime_power(q)
    if q <= 3:
        raise UnsupportedField("q must exceed 3")
    return ProjectiveLine(q)


def pgl2(q: int) -> PermGroup:
    L = _line(q)
    K = L.field
    gens = [L.mobius(1, 1, 0, 1), L.mobius(K.primitive, 0, 0, 1), L.mobius(0, 1, 1, 0)]
    return PermGroup(L.size, gens)


def pgammal2(q: int) -> PermGroup:
    L = _line(q)
    gens = list(pgl2(q).generators)
    if L.field.n > 1:
        gens.append(L.frobenius())
    return PermGroup(L.size, gens)


def pgl2_order(q: int) -> int:
    return q * (q - 1) * (q + 1)


@dataclass(frozen=True)
class GaloisGroup:
    """``Aut(GF(q))``, cyclic of order ``n``, generated by ``x -> x^p``."""

    q: int

    @property
    def n(self) -> int:
        return prime_power(self.q)[1]

    def subgroup_orders(self) -> list[int]:
        return [d for d in range(1, self.n + 1) if self.n % d == 0]

    def on_field(self, order: int | None = None) -> PermGroup:
        """The subgroup of the given order acting on the ``q`` field elements."""
        order = self.n if order is None else order
        self._check(order)
        K = Field(self.q)
        step = self.n // order
        img = list(range(self.q))
        for _ in range(step):
            img = [K.frobenius(x) for x in img]
        return PermGroup(self.q, [Permutation(img)] if order > 1 else [])

    def on_line(self, order: int | None = None) -> PermGroup:
        order = self.n if order is None else order
        self._check(order)
        L = ProjectiveLine(self.q)
        step = self.n // order
        return PermGroup(self.q + 1, [L.frobenius(step)] if order > 1 else [])

    def _check(self, order: int):
        if order < 1 or self.n % order:
            raise ValueError(f"no subgroup of order {order} in a cyclic group of order {self.n}")


def lift_to_line(q: int, field_group: PermGroup) -> list[Permutation]:
    """Field automorphisms extended to the line by fixing the point at infinity."""
    return [Permutation(list(g.images) + [q]) for g in field_group.generators]


@dataclass
class SemilinearReport:
    q: int
    H_order: int
    galois_orders: list[int]
    group_orders: list[int]
    levels_match: bool
    heights_match: bool
    order_identities: bool
    normal_with_cyclic_quotient: bool
    centreless: bool
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            self.levels_match and self.heights_match and self.order_identities
            and self.normal_with_cyclic_quotient and self.centreless
        )

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "H_order": self.H_order,
            "galois_tower_orders": self.galois_orders,
            "group_tower_orders": self.group_orders,
            "levels_match": self.levels_match,
            "heights_match": self.heights_match,
            "order_identities": self.order_identities,
            "normal_with_cyclic_quotient": self.normal_with_cyclic_quotient,
            "centreless": self.centreless,
            "passed": self.passed,
        }


def pgl_normal_in_pgammal(q: int) -> bool:
    """PGL is normal in PGammaL and the cosets of the Frobenius powers exhaust it."""
    P, G = pgl2(q), pgammal2(q)
    if not all(P.conjugate(g) == P for g in G.generators):
        return False
    n = prime_power(q)[1]
    frob = ProjectiveLine(q).frobenius()
    x = Permutation.identity(q + 1)
    for i in range(1, n):
        x = frob * x
        if x in P:
            return False
    return G.order() == n * P.order()


def verify_semilinear_tower(q: int, H_order: int = 1, method: str = "auto", budget: Budget | None = None) -> SemilinearReport:
    """Compare the tower of ``PGL(2,q) x| H`` in ``PGammaL(2,q)`` with the tower of ``H`` in ``Aut(GF(q))``."""
    L = _line(q)
    Gal = GaloisGroup(q)
    P, Gamma = pgl2(q), pgammal2(q)
    AutK = Gal.on_field()
    Hk = Gal.on_field(H_order)
    gal_tower = normaliser_tower(AutK, Hk, method, budget)
    start = PermGroup(L.size, list(P.generators) + lift_to_line(q, Hk))
    grp_tower = normaliser_tower(Gamma, start, method, budget)
    match = len(gal_tower.levels) == len(grp_tower.levels) and all(
        PermGroup(L.size, list(P.generators) + lift_to_line(q, N)) == M
        for N, M in zip(gal_tower.levels, grp_tower.levels)
    )
    orders_ok = P.order() == pgl2_order(q) and Gamma.order() == Gal.n * pgl2_order(q)
    return SemilinearReport(
        q,
        H_order,
        gal_tower.orders(),
        grp_tower.orders(),
        match,
        gal_tower.height == grp_tower.height,
        orders_ok,
        pgl_normal_in_pgammal(q),
        centralizer_is_trivial(start, start),
    )
