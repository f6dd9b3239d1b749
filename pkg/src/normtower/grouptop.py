"""Orbits, blocks, normalisers and normaliser towers.

Normalisers come from two independent backends: an exhaustive scan of the
ambient group, and a base-image backtrack search that prunes with
stabiliser-orbit data.  Both return the same subgroup; ``method="crosscheck"``
runs both and raises if they disagree.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .permcore import (
    LabeledAction,
    Permutation,
    PermGroup,
    StabChain,
    _compose,
    _identity,
    _invert,
    orbit_ids,
    schreier_sims,
)

EXHAUSTIVE_LIMIT = 50_000
DEFAULT_NODE_BUDGET = 2_000_000


class NotASubgroup(ValueError):
    pass


class NotTransitive(ValueError):
    pass


class SearchBudgetExceeded(RuntimeError):
    """A backtrack search hit its node cap; no answer was produced."""


class BackendMismatch(AssertionError):
    pass


@dataclass
class Budget:
    nodes: int = DEFAULT_NODE_BUDGET
    used: int = 0

    def tick(self):
        self.used += 1
        if self.used > self.nodes:
            raise SearchBudgetExceeded(f"search exceeded {self.nodes} nodes")


# ---------------------------------------------------------------------------
# orbits and blocks


def orbits(G: PermGroup) -> list[list[int]]:
    return G.orbits()


@dataclass(frozen=True)
class BlockSystem:
    blocks: tuple[tuple[int, ...], ...]
    generator_action: tuple[Permutation, ...]

    def block_of(self, x: int) -> tuple[int, ...]:
        for b in self.blocks:
            if x in b:
                return b
        raise KeyError(x)


def _require_transitive(G: PermGroup):
    if not G.is_transitive():
        raise NotTransitive("group is not transitive")


def _minimal_classes(G: PermGroup, seed: Sequence[int]) -> list[int]:
    n = G.degree
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra == rb:
            return None
        if rb < ra:
            ra, rb = rb, ra
        parent[rb] = ra
        return ra, rb

    queue = []
    seed = list(seed)
    for s in seed[1:]:
        pair = union(seed[0], s)
        if pair:
            queue.append(pair)
    gens = [g.images for g in G.generators]
    while queue:
        x, y = queue.pop()
        for g in gens:
            pair = union(g[x], g[y])
            if pair:
                queue.append(pair)
    return [find(x) for x in range(n)]


def _system_from_classes(G: PermGroup, cls: list[int]) -> BlockSystem:
    groups: dict[int, list[int]] = {}
    for x, r in enumerate(cls):
        groups.setdefault(r, []).append(x)
    blocks = tuple(tuple(groups[r]) for r in sorted(groups))
    index = {x: i for i, b in enumerate(blocks) for x in b}
    action = tuple(
        Permutation._raw(tuple(index[g.images[b[0]]] for b in blocks)) for g in G.generators
    )
    return BlockSystem(blocks, action)


def minimal_block(G: PermGroup, seed: Sequence[int]) -> BlockSystem:
    """Finest block system with all ``seed`` points in one block."""
    _require_transitive(G)
    return _system_from_classes(G, _minimal_classes(G, seed))


def is_block(G: PermGroup, Z: Sequence[int]) -> bool:
    zs = frozenset(Z)
    if not zs:
        return False
    for g in G.generators:
        img = frozenset(g.images[z] for z in zs)
        if img != zs and img & zs:
            return False
    return True


def block_partition(G: PermGroup, Z: Sequence[int]) -> list[tuple[int, ...]]:
    """The partition ``{g[Z] : g in G}`` for a block ``Z`` of a transitive group."""
    start = frozenset(Z)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for B in frontier:
            for g in G.generators:
                C = frozenset(g.images[b] for b in B)
                if C not in seen:
                    seen.add(C)
                    nxt.append(C)
        frontier = nxt
    return sorted(tuple(sorted(B)) for B in seen)


def blocks_through_point(G: PermGroup, v: int) -> list[tuple[int, ...]]:
    """All blocks of imprimitivity containing ``v``, smallest first."""
    _require_transitive(G)
    n = G.degree
    found: set[frozenset] = {frozenset([v])}
    frontier = []
    for w in range(n):
        if w == v:
            continue
        cls = _minimal_classes(G, [v, w])
        B = frozenset(x for x in range(n) if cls[x] == cls[v])
        if B not in found:
            found.add(B)
            frontier.append(B)
    # joins of blocks through v are blocks through v
    while frontier:
        nxt = []
        current = list(found)
        for B in frontier:
            for C in current:
                if B <= C or C <= B:
                    continue
                cls = _minimal_classes(G, sorted(B | C))
                J = frozenset(x for x in range(n) if cls[x] == cls[v])
                if J not in found:
                    found.add(J)
                    nxt.append(J)
        frontier = nxt
    return sorted((tuple(sorted(B)) for B in found), key=lambda b: (len(b), b))


# ---------------------------------------------------------------------------
# backtrack search over base images


class _OrbitOracle:
    """Orbit ids of pointwise stabilisers along prefixes of image points."""

    def __init__(self, G: PermGroup):
        self.n = G.degree
        gens = [g.images for g in G.generators]
        self._cache: dict[tuple, tuple[list[Perm], list[int], Counter]] = {}
        ids = orbit_ids(gens, self.n)
        self._cache[()] = (gens, ids, Counter(ids))

    def get(self, prefix: tuple) -> tuple[list[int], Counter]:
        entry = self._cache.get(prefix) or self._build(prefix)
        return entry[1], entry[2]

    def _build(self, prefix: tuple):
        entry = self._cache.get(prefix)
        if entry is not None:
            return entry
        gens_prev, ids_prev, _ = self._build(prefix[:-1])
        x = prefix[-1]
        if all(g[x] == x for g in gens_prev):
            gens = gens_prev
        else:
            chain = schreier_sims(gens_prev, self.n, (x,))
            gens = chain.level_gens[1]
        ids = orbit_ids(gens, self.n)
        entry = (gens, ids, Counter(ids))
        self._cache[prefix] = entry
        return entry


Perm = tuple


class _Search:
    """Depth-first search for ambient elements with a given property.

    ``point_ok(level, x, xs)`` may reject the image ``x`` of ``base[level]``
    given earlier images ``xs``; it must never reject a solution.
    ``leaf_ok(a)`` is the exact test.
    """

    def __init__(self, chain: StabChain, point_ok, leaf_ok, budget: Budget):
        self.chain = chain
        self.base = chain.base
        self.point_ok = point_ok
        self.leaf_ok = leaf_ok
        self.budget = budget

    def find(self, level: int, P: Perm, xs: tuple) -> Perm | None:
        self.budget.tick()
        if level == len(self.base):
            return P if self.leaf_ok(P) else None
        trans = self.chain.transversals[level]
        cands = sorted((P[d], d) for d in trans)
        for x, d in cands:
            if not self.point_ok(level, x, xs):
                continue
            res = self.find(level + 1, _compose(P, trans[d]), xs + (x,))
            if res is not None:
                return res
        return None

    def subgroup(self, known: Sequence[Perm]) -> list[Perm]:
        """Generators of the subgroup of all solutions; ``known`` must be solutions."""
        n = self.chain.degree
        gens = [g for g in known if g != _identity(n)]
        k = len(self.base)
        for level in reversed(range(k)):
            b = self.base[level]
            kchain = schreier_sims(gens, n, self.base)
            korb = orbit_ids(kchain.level_gens[level], n)
            failed: set[int] = set()
            prefix = tuple(self.base[:level])
            for gamma in sorted(self.chain.transversals[level]):
                if korb[gamma] == korb[b] or gamma in failed:
                    continue
                if not self.point_ok(level, gamma, prefix):
                    failed.add(gamma)
                    continue
                u = self.chain.transversals[level][gamma]
                a = self.find(level + 1, u, prefix + (gamma,))
                if a is None:
                    failed.update(x for x in range(n) if korb[x] == korb[gamma])
                else:
                    gens.append(a)
                    kchain = schreier_sims(gens, n, self.base)
                    korb = orbit_ids(kchain.level_gens[level], n)
        return gens


def _conjugacy_pruner(G: PermGroup, H: PermGroup, base: Sequence[int]):
    """Pruning test for elements ``a`` with ``a G a^-1 = H``.

    Such an ``a`` maps orbits of the pointwise stabiliser ``G_(b_0..b_{i-1})``
    onto orbits of ``H_(a b_0 .. a b_{i-1})``.
    """
    n = G.degree
    gchain = schreier_sims([g.images for g in G.generators], n, base)
    g_ids = [orbit_ids(gchain.level_gens[i], n) for i in range(len(base) + 1)]
    g_sizes = [Counter(ids) for ids in g_ids]
    horacle = _OrbitOracle(H)

    def point_ok(level, x, xs):
        b = base[level]
        for i in range(level + 1):
            gid, gsz = g_ids[i], g_sizes[i]
            hid, hsz = horacle.get(xs[:i])
            if gsz[gid[b]] != hsz[hid[x]]:
                return False
            for j in range(i, level):
                if (gid[base[j]] == gid[b]) != (hid[xs[j]] == hid[x]):
                    return False
        hid, hsz = horacle.get(xs[:level])
        gid, gsz = g_ids[level], g_sizes[level]
        if level and sorted(gsz.values()) != sorted(hsz.values()):
            return False
        return True

    return point_ok


def _conjugates_into(G: PermGroup, H: PermGroup):
    ggens = [g.images for g in G.generators]

    def leaf_ok(a):
        ai = _invert(a)
        return all(H.contains_raw(_compose(_compose(a, g), ai)) for g in ggens)

    return leaf_ok


# ---------------------------------------------------------------------------
# normalisers


def _check_subgroup(ambient: PermGroup, G: PermGroup):
    if G.degree != ambient.degree or not G.is_subgroup_of(ambient):
        raise NotASubgroup("group is not a subgroup of the ambient group")


def normalizer_exhaustive(ambient: PermGroup, G: PermGroup) -> PermGroup:
    """Scan every ambient element; the oracle backend."""
    _check_subgroup(ambient, G)
    n = ambient.degree
    ggens = [g.images for g in G.generators]
    count = 0
    gens = [g.images for g in G.generators]
    kchain = schreier_sims(gens, n)
    for a in ambient.chain.elements():
        ai = _invert(a)
        if all(G.contains_raw(_compose(_compose(a, g), ai)) for g in ggens):
            count += 1
            if not kchain.contains(a):
                gens.append(a)
                kchain = schreier_sims(gens, n)
    if count != kchain.order:
        raise BackendMismatch(f"scan found {count} normalising elements but they generate {kchain.order}")
    return PermGroup(n, [Permutation._raw(g) for g in gens])


def normalizer_backtrack(ambient: PermGroup, G: PermGroup, budget: Budget | None = None) -> PermGroup:
    """Base-image backtrack search with stabiliser-orbit pruning."""
    _check_subgroup(ambient, G)
    budget = budget or Budget()
    chain = ambient.chain
    search = _Search(chain, _conjugacy_pruner(G, G, chain.base), _conjugates_into(G, G), budget)
    gens = search.subgroup([g.images for g in G.generators])
    return PermGroup(ambient.degree, [Permutation._raw(g) for g in gens])


def _product_split(ambient: PermGroup, G: PermGroup):
    """Split along ambient orbits when both groups are direct products there."""
    parts = ambient.orbits()
    moved = [p for p in parts if len(p) > 1]
    if len(moved) < 2:
        return None
    a_res = [ambient.restriction(p) for p in moved]
    g_res = [G.restriction(p) for p in moved]
    if math.prod(a.order() for a in a_res) != ambient.order():
        return None
    if math.prod(g.order() for g in g_res) != G.order():
        return None
    return moved, a_res, g_res


def _embed(n: int, points: Sequence[int], g: Permutation) -> Permutation:
    pts = sorted(points)
    img = list(range(n))
    for i, p in enumerate(pts):
        img[p] = pts[g.images[i]]
    return Permutation._raw(tuple(img))


def normalizer(
    ambient: PermGroup,
    G: PermGroup,
    method: str = "auto",
    budget: Budget | None = None,
) -> PermGroup:
    """``N_ambient(G)``.

    ``method`` is one of ``auto`` (exhaustive when the ambient order is at most
    50000, otherwise backtrack), ``exhaustive``, ``backtrack`` or
    ``crosscheck``.
    """
    _check_subgroup(ambient, G)
    split = _product_split(ambient, G)
    if split is not None:
        moved, a_res, g_res = split
        gens = []
        for pts, A, H in zip(moved, a_res, g_res):
            N = normalizer(A, H, method, budget)
            gens.extend(_embed(ambient.degree, pts, g) for g in N.generators)
        return PermGroup(ambient.degree, gens)
    if method == "auto":
        method = "exhaustive" if ambient.order() <= EXHAUSTIVE_LIMIT else "backtrack"
    if method == "exhaustive":
        return normalizer_exhaustive(ambient, G)
    if method == "backtrack":
        return normalizer_backtrack(ambient, G, budget)
    if method == "crosscheck":
        a = normalizer_exhaustive(ambient, G)
        b = normalizer_backtrack(ambient, G, budget)
        if a != b:
            raise BackendMismatch(f"exhaustive order {a.order()} vs backtrack order {b.order()}")
        return b
    raise ValueError(f"unknown method {method!r}")


def centralizer_is_trivial(ambient: PermGroup, G: PermGroup) -> bool:
    n = ambient.degree
    ident = _identity(n)
    ggens = [g.images for g in G.generators]
    for a in ambient.chain.elements():
        if a != ident and all(_compose(a, g) == _compose(g, a) for g in ggens):
            return False
    return True


# ---------------------------------------------------------------------------
# towers


@dataclass
class Tower:
    """Normaliser tower ``N_0 < N_1 < ... < N_height`` inside ``ambient``.

    ``terminated`` records that the normaliser of the top level was computed
    and found equal to it.
    """

    ambient: PermGroup
    levels: list[PermGroup]
    terminated: bool = True

    @property
    def height(self) -> int:
        return len(self.levels) - 1

    @property
    def terminal(self) -> PermGroup:
        return self.levels[-1]

    def orders(self) -> list[int]:
        return [L.order() for L in self.levels]

    def to_json(self) -> dict:
        return {
            "levels": [L.to_json() for L in self.levels],
            "orders": self.orders(),
            "height": self.height,
            "terminal_order": self.terminal.order(),
        }


def normaliser_tower(
    ambient: PermGroup,
    H: PermGroup,
    method: str = "auto",
    budget: Budget | None = None,
    max_height: int = 64,
) -> Tower:
    _check_subgroup(ambient, H)
    levels = [H]
    while True:
        N = normalizer(ambient, levels[-1], method, budget)
        if N.order() == levels[-1].order():
            return Tower(ambient, levels, True)
        levels.append(N)
        if len(levels) > max_height + 1:
            raise SearchBudgetExceeded(f"tower exceeded {max_height} levels")


# ---------------------------------------------------------------------------
# permutation-group isomorphism


@dataclass(frozen=True)
class PermIso:
    """``(f, phi)`` with ``f(g) = phi g phi^-1`` and ``f(g)(phi(x)) = phi(g(x))``."""

    phi: Permutation

    def f(self, g: Permutation) -> Permutation:
        return self.phi * g * self.phi.inverse()

    def inverse(self) -> "PermIso":
        return PermIso(self.phi.inverse())


def _as_group(x) -> PermGroup:
    return x.group if isinstance(x, LabeledAction) else x


def perm_iso(a, b, budget: Budget | None = None) -> PermIso | None:
    """A permutation-group isomorphism from ``a`` onto ``b``, or None."""
    G, H = _as_group(a), _as_group(b)
    if G.degree != H.degree or G.order() != H.order():
        return None
    if sorted(map(len, G.orbits())) != sorted(map(len, H.orbits())):
        return None
    n = G.degree
    if n == 0:
        return PermIso(Permutation.identity(0))
    S = PermGroup.symmetric(n)
    chain = S.chain
    search = _Search(chain, _conjugacy_pruner(G, H, chain.base), _conjugates_into(G, H), budget or Budget())
    a_ = search.find(0, _identity(n), ())
    return None if a_ is None else PermIso(Permutation._raw(a_))


def check_perm_iso(a, b, iso: PermIso) -> bool:
    """Verify conditions (i)-(iii) on generators: f is a bijective hom onto b."""
    G, H = _as_group(a), _as_group(b)
    images = [iso.f(g) for g in G.generators]
    if not all(h in H for h in images):
        return False
    for g, fg in zip(G.generators, images):
        for x in range(G.degree):
            if fg(iso.phi(x)) != iso.phi(g(x)):
                return False
    return PermGroup(H.degree, images) == H


# ---------------------------------------------------------------------------
# partition stabilisers


def partition_stabilizer(G: PermGroup, parts: Sequence[Sequence[int]], budget: Budget | None = None) -> PermGroup:
    """Elements of ``G`` mapping every part onto itself."""
    n = G.degree
    label = [-1] * n
    for i, p in enumerate(parts):
        for x in p:
            label[x] = i
    if -1 in label:
        raise ValueError("parts do not cover the domain")
    chain = G.chain
    base = chain.base

    def point_ok(level, x, xs):
        return label[x] == label[base[level]]

    def leaf_ok(a):
        return all(label[a[x]] == label[x] for x in range(n))

    search = _Search(chain, point_ok, leaf_ok, budget or Budget())
    gens = search.subgroup([])
    return PermGroup(n, [Permutation._raw(g) for g in gens])
