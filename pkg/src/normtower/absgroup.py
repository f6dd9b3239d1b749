"""Abstract finite groups given by a multiplication table, and their automorphism towers."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .permcore import Permutation, PermGroup

DEFAULT_ORDER_BOUND = 200


class OrderBoundExceeded(RuntimeError):
    pass


class NotCentreless(ValueError):
    pass


class FiniteGroup:
    """Elements are ``0..n-1``; ``0`` is the identity."""

    def __init__(self, table: Sequence[Sequence[int]], name: str = "", check: bool = True):
        self.table = tuple(tuple(row) for row in table)
        self.name = name
        n = len(self.table)
        if n == 0:
            raise ValueError("a group has at least one element")
        if any(len(r) != n for r in self.table):
            raise ValueError("table is not square")
        if self.table[0] != tuple(range(n)) or any(r[0] != i for i, r in enumerate(self.table)):
            raise ValueError("element 0 is not the identity")
        for r in self.table:
            if sorted(r) != list(range(n)):
                raise ValueError("table rows are not permutations")
        self._inv = [row.index(0) for row in self.table]
        self.generators = self._pick_generators()
        if check:
            self._light_test()

    # -- basics -------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.table)

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def conj(self, g: int, x: int) -> int:
        """``g x g^-1``."""
        return self.table[self.table[g][x]][self._inv[g]]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.table[x][a]
            k += 1
        return k

    def _light_test(self):
        """Associativity checked against a generating set (Light's test)."""
        t = self.table
        n = len(t)
        for c in self.generators:
            for a in range(n):
                ta = t[a]
                for b in range(n):
                    if t[ta[b]][c] != ta[t[b][c]]:
                        raise ValueError(f"not associative at ({a}, {b}, {c})")

    def closure(self, gens: Sequence[int]) -> frozenset:
        seen = {0}
        q = deque([0])
        while q:
            x = q.popleft()
            for g in gens:
                y = self.table[x][g]
                if y not in seen:
                    seen.add(y)
                    q.append(y)
        return frozenset(seen)

    def _pick_generators(self) -> tuple[int, ...]:
        """Greedy small generating set: repeatedly add the element that grows the subgroup most."""
        n = len(self.table)
        gens: list[int] = []
        sub = frozenset([0])
        while len(sub) < n:
            best, best_sub = None, sub
            for x in range(n):
                if x in sub:
                    continue
                s = self.closure(gens + [x])
                if len(s) > len(best_sub):
                    best, best_sub = x, s
                    if len(s) == n:
                        break
            gens.append(best)
            sub = best_sub
        return tuple(gens)

    def words(self) -> list[tuple[int, int]]:
        """BFS spanning tree: ``(parent, generator position)`` per element."""
        tree: list = [None] * len(self.table)
        tree[0] = (-1, -1)
        q = deque([0])
        while q:
            x = q.popleft()
            for i, g in enumerate(self.generators):
                y = self.table[x][g]
                if tree[y] is None:
                    tree[y] = (x, i)
                    q.append(y)
        return tree

    # -- structure ----------------------------------------------------------

    def center(self) -> frozenset:
        t = self.table
        return frozenset(z for z in range(len(t)) if all(t[z][g] == t[g][z] for g in self.generators))

    def is_centreless(self) -> bool:
        return len(self.center()) == 1

    def class_sizes(self) -> list[int]:
        sizes = [0] * len(self.table)
        seen = [False] * len(self.table)
        for x in range(len(self.table)):
            if seen[x]:
                continue
            cls = {self.conj(g, x) for g in range(len(self.table))}
            for y in cls:
                seen[y] = True
                sizes[y] = len(cls)
        return sizes

    def is_subgroup(self, S: frozenset) -> bool:
        return 0 in S and all(self.table[a][self._inv[b]] in S for a in S for b in S)

    def normaliser(self, S: frozenset) -> frozenset:
        gens = _subset_generators(self, S)
        return frozenset(g for g in range(len(self.table)) if all(self.conj(g, s) in S for s in gens))

    def centraliser(self, S: frozenset) -> frozenset:
        gens = _subset_generators(self, S)
        t = self.table
        return frozenset(g for g in range(len(t)) if all(t[g][s] == t[s][g] for s in gens))

    def to_json(self) -> dict:
        return {"kind": "table", "name": self.name, "table": [list(r) for r in self.table]}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteGroup":
        if data.get("kind", "table") == "table":
            return cls(data["table"], data.get("name", ""))
        return from_perm_group(PermGroup.from_json(data), data.get("name", ""))

    def regular_representation(self) -> PermGroup:
        """Left-regular action ``x -> g x``."""
        n = len(self.table)
        return PermGroup(n, [Permutation([self.table[g][x] for x in range(n)]) for g in self.generators])

    def __repr__(self):
        return f"FiniteGroup({self.name or '?'}, order={self.order})"


def _subset_generators(G: FiniteGroup, S: frozenset) -> list[int]:
    gens: list[int] = []
    sub = frozenset([0])
    for x in sorted(S):
        if x not in sub:
            gens.append(x)
            sub = G.closure(gens)
            if len(sub) == len(S):
                break
    return gens


def from_perm_group(G: PermGroup, name: str = "") -> FiniteGroup:
    elems = sorted(g.images for g in G.elements())
    index = {e: i for i, e in enumerate(elems)}
    table = [[index[tuple(a[x] for x in b)] for b in elems] for a in elems]
    return FiniteGroup(table, name)


# ---------------------------------------------------------------------------
# automorphisms


@dataclass
class AutResult:
    """``Aut(G)`` as a table group; automorphism ``i`` maps generator ``j`` to ``gen_images[i][j]``."""

    group: FiniteGroup
    maps: list[tuple[int, ...]]  # full element maps
    inner: list[int]  # inner[g] = index of i_g


def _extend(G: FiniteGroup, images: Sequence[int], tree) -> tuple[int, ...] | None:
    """The homomorphism sending generator ``i`` to ``images[i]``, if one exists and is bijective."""
    n = len(G)
    t = G.table
    phi = [-1] * n
    phi[0] = 0
    order = sorted(range(1, n), key=lambda x: _depth(tree, x))
    for y in order:
        x, i = tree[y]
        phi[y] = t[phi[x]][images[i]]
    if len(set(phi)) != n:
        return None
    for x in range(n):
        for i, g in enumerate(G.generators):
            if phi[t[x][g]] != t[phi[x]][images[i]]:
                return None
    return tuple(phi)


def _depth(tree, x):
    d = 0
    while x != 0:
        x = tree[x][0]
        d += 1
    return d


def automorphisms(G: FiniteGroup, bound: int = DEFAULT_ORDER_BOUND) -> list[tuple[int, ...]]:
    """All automorphisms, by backtracking over generator images.

    Candidate images must match element order and conjugacy-class size, and
    every product of two chosen generators must keep its order.
    """
    if len(G) > bound:
        raise OrderBoundExceeded(f"|G| = {len(G)} exceeds the bound {bound}")
    gens = G.generators
    if not gens:
        return [tuple(range(len(G)))]
    orders = [G.element_order(x) for x in range(len(G))]
    csize = G.class_sizes()
    finger = [(orders[x], csize[x]) for x in range(len(G))]
    cands = [[y for y in range(len(G)) if finger[y] == finger[g]] for g in gens]
    tree = G.words()
    found = []

    def rec(i, chosen):
        if i == len(gens):
            phi = _extend(G, chosen, tree)
            if phi is not None:
                found.append(phi)
            return
        for y in cands[i]:
            ok = True
            for j in range(i):
                if orders[G.mul(chosen[j], y)] != orders[G.mul(gens[j], gens[i])]:
                    ok = False
                    break
                if orders[G.mul(y, G.inv(chosen[j]))] != orders[G.mul(gens[i], G.inv(gens[j]))]:
                    ok = False
                    break
            if ok:
                rec(i + 1, chosen + [y])

    rec(0, [])
    found.sort()
    return found


def aut_abstract(G: FiniteGroup, bound: int = DEFAULT_ORDER_BOUND) -> AutResult:
    maps = automorphisms(G, bound)
    gens = G.generators
    key = {tuple(m[g] for g in gens): i for i, m in enumerate(maps)}
    ident = key[tuple(gens)]
    # identity must be element 0: reorder so that it comes first
    order = [ident] + [i for i in range(len(maps)) if i != ident]
    maps = [maps[i] for i in order]
    key = {tuple(m[g] for g in gens): i for i, m in enumerate(maps)}
    table = []
    for a in maps:
        table.append([key[tuple(a[b[g]] for g in gens)] for b in maps])
    A = FiniteGroup(table, f"Aut({G.name})" if G.name else "", check=False)
    inner = [key[tuple(G.conj(g, x) for x in gens)] for g in range(len(G))]
    return AutResult(A, maps, inner)


# ---------------------------------------------------------------------------
# towers


@dataclass
class AutTower:
    levels: list[FiniteGroup]
    embeddings: list[list[int]]  # embeddings[i]: element of level i -> element of level i+1
    complete: bool = True

    @property
    def height(self) -> int:
        return len(self.levels) - 1

    def orders(self) -> list[int]:
        return [len(L) for L in self.levels]

    def image_in_top(self, level: int) -> frozenset:
        """Image of a level inside the terminal group under the composed embeddings."""
        elems = list(range(len(self.levels[level])))
        for e in self.embeddings[level:]:
            elems = [e[x] for x in elems]
        return frozenset(elems)

    def to_json(self) -> dict:
        return {"orders": self.orders(), "height": self.height, "complete": self.complete}


def automorphism_tower(G: FiniteGroup, bound: int = DEFAULT_ORDER_BOUND, max_height: int = 16) -> AutTower:
    if not G.is_centreless():
        raise NotCentreless(f"centre of order {len(G.center())}")
    levels, embs = [G], []
    while True:
        R = aut_abstract(levels[-1], bound)
        if len(R.group) == len(levels[-1]):
            return AutTower(levels, embs, True)
        if len(embs) >= max_height:
            raise OrderBoundExceeded(f"tower exceeded {max_height} levels")
        levels.append(R.group)
        embs.append(R.inner)


@dataclass
class NormaliserCheck:
    tau: int
    automorphism_orders: list[int]
    normaliser_orders: list[int]
    levels_equal: bool
    centralisers_trivial: bool
    details: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.levels_equal and self.centralisers_trivial

    def to_json(self) -> dict:
        return {
            "tau": self.tau,
            "automorphism_orders": self.automorphism_orders,
            "normaliser_orders": self.normaliser_orders,
            "levels_equal": self.levels_equal,
            "centralisers_trivial": self.centralisers_trivial,
            "passed": self.passed,
        }


def check_tower_equals_normalisers(G: FiniteGroup, bound: int = DEFAULT_ORDER_BOUND) -> NormaliserCheck:
    """Inside the terminal group, level ``a`` of the automorphism tower is ``N_a(G)``."""
    T = automorphism_tower(G, bound)
    top = T.levels[-1]
    images = [T.image_in_top(a) for a in range(len(T.levels))]
    chain = [images[0]]
    while True:
        N = top.normaliser(chain[-1])
        if N == chain[-1]:
            break
        chain.append(N)
    equal = chain == images
    cents = all(len(top.centraliser(S)) == 1 for S in images)
    return NormaliserCheck(
        T.height, T.orders(), [len(S) for S in chain], equal, cents,
        [f"level {a}: |image| = {len(S)}" for a, S in enumerate(images)],
    )


def inner_is_normal_and_selfcentralising(G: FiniteGroup, bound: int = DEFAULT_ORDER_BOUND) -> bool:
    R = aut_abstract(G, bound)
    inn = frozenset(R.inner)
    A = R.group
    return A.is_subgroup(inn) and A.normaliser(inn) == frozenset(range(len(A))) and len(A.centraliser(inn)) == 1


# ---------------------------------------------------------------------------
# catalogue


def _dihedral(m: int) -> PermGroup:
    rot = Permutation([(i + 1) % m for i in range(m)])
    ref = Permutation([(-i) % m for i in range(m)])
    return PermGroup(m, [rot, ref])


def _affine_line(p: int, a: int) -> PermGroup:
    return PermGroup(p, [Permutation([(x + 1) % p for x in range(p)]), Permutation([(a * x) % p for x in range(p)])])


def _dih_z3z3() -> PermGroup:
    pts = [(x, y) for x in range(3) for y in range(3)]
    idx = {v: i for i, v in enumerate(pts)}
    tx = Permutation([idx[((x + 1) % 3, y)] for x, y in pts])
    ty = Permutation([idx[(x, (y + 1) % 3)] for x, y in pts])
    neg = Permutation([idx[((-x) % 3, (-y) % 3)] for x, y in pts])
    return PermGroup(9, [tx, ty, neg])


CATALOG_BUILDERS = {
    "trivial": lambda: PermGroup.trivial(1),
    "sym3": lambda: PermGroup.symmetric(3),
    "dihedral10": lambda: _dihedral(5),
    "alt4": lambda: PermGroup(4, [Permutation.from_cycles(4, (0, 1, 2)), Permutation.from_cycles(4, (1, 2, 3))]),
    "dihedral14": lambda: _dihedral(7),
    "dihedral18": lambda: _dihedral(9),
    "dih_z3z3": _dih_z3z3,
    "frobenius20": lambda: _affine_line(5, 2),
    "frobenius21": lambda: _affine_line(7, 2),
    "dihedral22": lambda: _dihedral(11),
    "sym4": lambda: PermGroup.symmetric(4),
    # groups with a centre, for negative controls
    "cyclic4": lambda: PermGroup(4, [Permutation([1, 2, 3, 0])]),
    "klein4": lambda: PermGroup(4, [Permutation([1, 0, 3, 2]), Permutation([2, 3, 0, 1])]),
    "dihedral8": lambda: _dihedral(4),
    "dihedral12": lambda: _dihedral(6),
}

CENTRELESS_UP_TO_24 = [
    "trivial", "sym3", "dihedral10", "alt4", "dihedral14", "dihedral18",
    "dih_z3z3", "frobenius20", "frobenius21", "dihedral22", "sym4",
]

# bound large enough for every tower in the catalogue (Aut(dih_z3z3) has order 432)
CATALOG_BOUND = 500


def catalog(name: str) -> FiniteGroup:
    try:
        return from_perm_group(CATALOG_BUILDERS[name](), name)
    except KeyError:
        raise KeyError(f"unknown group {name!r}; known: {sorted(CATALOG_BUILDERS)}") from None
