"""Permutations and permutation groups.

Points are ``0..degree-1``.  Composition is the left action used throughout
the package: ``(p * q)(x) == p(q(x))``.  Groups carry a lazily computed
base and strong generating set built by a deterministic Schreier-Sims.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

Perm = tuple  # raw image tuple used on hot paths


class DegreeMismatch(ValueError):
    pass


def _compose(p: Perm, q: Perm) -> Perm:
    return tuple([p[y] for y in q])


def _invert(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def _identity(n: int) -> Perm:
    return tuple(range(n))


class Permutation:
    """A bijection of ``{0, ..., degree-1}`` stored as its image list."""

    __slots__ = ("images",)

    def __init__(self, images: Iterable[int]):
        images = tuple(int(i) for i in images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation: {images!r}")
        object.__setattr__(self, "images", images)

    def __setattr__(self, name, value):
        raise AttributeError("Permutation is immutable")

    @classmethod
    def _raw(cls, images: Perm) -> "Permutation":
        p = object.__new__(cls)
        object.__setattr__(p, "images", images)
        return p

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls._raw(_identity(degree))

    @classmethod
    def from_cycles(cls, degree: int, *cycles: Sequence[int]) -> "Permutation":
        img = list(range(degree))
        for cyc in cycles:
            for a, b in zip(cyc, tuple(cyc[1:]) + (cyc[0],)):
                img[a] = b
        return cls(img)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def inverse(self) -> "Permutation":
        return Permutation._raw(_invert(self.images))

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for i in range(len(self.images)):
            if i in seen or self.images[i] == i:
                continue
            cyc = [i]
            seen.add(i)
            j = self.images[i]
            while j != i:
                seen.add(j)
                cyc.append(j)
                j = self.images[j]
            out.append(tuple(cyc))
        return out

    def order(self) -> int:
        return math.lcm(*(len(c) for c in self.cycles())) if self.cycles() else 1

    def shifted(self, offset: int, degree: int) -> "Permutation":
        """Embed into a larger domain, acting on ``offset..offset+self.degree-1``."""
        img = list(range(degree))
        for i, j in enumerate(self.images):
            img[offset + i] = offset + j
        return Permutation._raw(tuple(img))

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __lt__(self, other):
        return self.images < other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        cyc = "".join("(" + " ".join(map(str, c)) + ")" for c in self.cycles())
        return f"Permutation<{self.degree}>{cyc or '()'}"

    def to_json(self) -> list[int]:
        return list(self.images)


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Return ``p`` after ``q``: the permutation ``x -> p(q(x))``."""
    if p.degree != q.degree:
        raise DegreeMismatch(f"degrees differ: {p.degree} vs {q.degree}")
    return Permutation._raw(_compose(p.images, q.images))


# ---------------------------------------------------------------------------
# Schreier-Sims


@dataclass
class StabChain:
    """Base, strong generators and transversals of a permutation group.

    ``transversals[i]`` maps each point of the ``i``-th basic orbit to a
    group element carrying ``base[i]`` onto it; that element fixes
    ``base[:i]`` pointwise.
    """

    degree: int
    base: list[int]
    strong_gens: list[Perm]
    transversals: list[dict[int, Perm]]
    level_gens: list[list[Perm]]

    @property
    def order(self) -> int:
        return math.prod(len(t) for t in self.transversals)

    def sift(self, g: Perm) -> tuple[Perm, int]:
        for i, b in enumerate(self.base):
            x = g[b]
            u = self.transversals[i].get(x)
            if u is None:
                return g, i
            g = _compose(_invert(u), g)
        return g, len(self.base)

    def contains(self, g: Perm) -> bool:
        h, _ = self.sift(g)
        return h == _identity(self.degree)

    def orbit_partition(self, level: int) -> list[int]:
        """Orbit ids of the pointwise stabiliser of ``base[:level]``."""
        gens = self.level_gens[level] if level < len(self.level_gens) else []
        return orbit_ids(gens, self.degree)

    def elements(self) -> Iterator[Perm]:
        n = self.degree
        reps = [list(t.values()) for t in self.transversals]
        if not reps:
            yield _identity(n)
            return
        for combo in itertools.product(*reps):
            g = combo[0]
            for u in combo[1:]:
                g = _compose(g, u)
            yield g


def _orbit_transversal(gens: Sequence[Perm], point: int, n: int) -> dict[int, Perm]:
    trans = {point: _identity(n)}
    frontier = [point]
    while frontier:
        nxt = []
        for x in frontier:
            ux = trans[x]
            for s in gens:
                y = s[x]
                if y not in trans:
                    trans[y] = _compose(s, ux)
                    nxt.append(y)
        frontier = nxt
    return trans


def schreier_sims(gens: Sequence[Perm], degree: int, base_prefix: Sequence[int] = ()) -> StabChain:
    """Deterministic Schreier-Sims.

    The base starts with ``base_prefix`` (points may be redundant) and is
    extended with the least point moved by a non-identity residue.
    """
    ident = _identity(degree)
    base: list[int] = list(base_prefix)
    strong: list[Perm] = []
    for g in gens:
        g = tuple(g)
        if g != ident and g not in strong:
            strong.append(g)

    def first_moved(g: Perm) -> int:
        for i, x in enumerate(g):
            if i != x:
                return i
        raise AssertionError("identity has no moved point")

    for g in strong:
        if all(g[b] == b for b in base):
            base.append(first_moved(g))

    def level_gens(i: int) -> list[Perm]:
        fixed = base[:i]
        return [s for s in strong if all(s[b] == b for b in fixed)]

    k = len(base)
    lg = [level_gens(i) for i in range(k)]
    trans = [_orbit_transversal(lg[i], base[i], degree) for i in range(k)]

    i = k - 1
    while i >= 0:
        trans[i] = _orbit_transversal(lg[i], base[i], degree)
        added = False
        for x, ux in list(trans[i].items()):
            for s in lg[i]:
                sux = _compose(s, ux)
                usx = trans[i][sux[base[i]]]
                schreier = _compose(_invert(usx), sux)
                if schreier == ident:
                    continue
                h, j = schreier, i + 1
                while j < len(base):
                    u = trans[j].get(h[base[j]])
                    if u is None:
                        break
                    h = _compose(_invert(u), h)
                    j += 1
                if h == ident:
                    continue
                if j == len(base):
                    base.append(first_moved(h))
                    trans.append({})
                strong.append(h)
                lg = [level_gens(t) for t in range(len(base))]
                for t in range(i + 1, j + 1):
                    trans[t] = _orbit_transversal(lg[t], base[t], degree)
                i = j
                added = True
                break
            if added:
                break
        if not added:
            i -= 1
    lg = [level_gens(t) for t in range(len(base))]
    lg.append(level_gens(len(base)))
    return StabChain(degree, base, strong, trans, lg)


def orbit_ids(gens: Sequence[Perm], n: int) -> list[int]:
    """Label each point with the least point of its orbit."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for x, y in enumerate(g):
            rx, ry = find(x), find(y)
            if rx != ry:
                if rx < ry:
                    parent[ry] = rx
                else:
                    parent[rx] = ry
    return [find(x) for x in range(n)]


# ---------------------------------------------------------------------------
# Groups

SMALL_ORDER = 5000  # materialise the element set below this order


class PermGroup:
    """A finite permutation group given by generators.

    Equality is mutual containment of generators, so two different
    generating sets of the same subgroup compare equal.
    """

    def __init__(self, degree: int, generators: Iterable[Permutation] = ()):
        gens = []
        for g in generators:
            if not isinstance(g, Permutation):
                g = Permutation(g)
            if g.degree != degree:
                raise DegreeMismatch(f"generator of degree {g.degree} in a group of degree {degree}")
            if not g.is_identity() and g not in gens:
                gens.append(g)
        self.degree = degree
        self.generators: tuple[Permutation, ...] = tuple(gens)
        self._chain: StabChain | None = None
        self._elements: frozenset | None = None

    # construction helpers -------------------------------------------------
    @classmethod
    def symmetric(cls, degree: int, points: Sequence[int] | None = None) -> "PermGroup":
        pts = list(range(degree)) if points is None else sorted(points)
        gens = []
        if len(pts) >= 2:
            gens.append(Permutation.from_cycles(degree, (pts[0], pts[1])))
        if len(pts) >= 3:
            gens.append(Permutation.from_cycles(degree, tuple(pts)))
        return cls(degree, gens)

    @classmethod
    def trivial(cls, degree: int) -> "PermGroup":
        return cls(degree)

    # core -----------------------------------------------------------------
    @property
    def chain(self) -> StabChain:
        if self._chain is None:
            self._chain = schreier_sims([g.images for g in self.generators], self.degree)
        return self._chain

    def chain_with_base(self, prefix: Sequence[int]) -> StabChain:
        return schreier_sims([g.images for g in self.generators], self.degree, prefix)

    def order(self) -> int:
        return self.chain.order

    def _element_set(self) -> frozenset | None:
        if self._elements is None and self.order() <= SMALL_ORDER:
            self._elements = frozenset(self.chain.elements())
        return self._elements

    def contains_raw(self, g: Perm) -> bool:
        elems = self._element_set()
        if elems is not None:
            return g in elems
        return self.chain.contains(g)

    def __contains__(self, g: Permutation) -> bool:
        if g.degree != self.degree:
            return False
        return self.contains_raw(g.images)

    def elements(self) -> Iterator[Permutation]:
        for g in self.chain.elements():
            yield Permutation._raw(g)

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return self.degree == other.degree and all(g in other for g in self.generators)

    def __eq__(self, other):
        if not isinstance(other, PermGroup):
            return NotImplemented
        return (
            self.degree == other.degree
            and self.order() == other.order()
            and self.is_subgroup_of(other)
        )

    __hash__ = None

    def __le__(self, other: "PermGroup") -> bool:
        return self.is_subgroup_of(other)

    def __lt__(self, other: "PermGroup") -> bool:
        return self.is_subgroup_of(other) and self.order() < other.order()

    def orbits(self) -> list[list[int]]:
        ids = orbit_ids([g.images for g in self.generators], self.degree)
        groups: dict[int, list[int]] = {}
        for x, r in enumerate(ids):
            groups.setdefault(r, []).append(x)
        return [groups[r] for r in sorted(groups)]

    def is_transitive(self) -> bool:
        return self.degree <= 1 or len(self.orbits()) == 1

    def conjugate(self, a: Permutation) -> "PermGroup":
        """Return ``a G a^-1``."""
        ai = a.inverse()
        return PermGroup(self.degree, [a * g * ai for g in self.generators])

    def normalised_by(self, a: Permutation) -> bool:
        ai = _invert(a.images)
        return all(self.contains_raw(_compose(_compose(a.images, g.images), ai)) for g in self.generators)

    def restriction(self, points: Sequence[int]) -> "PermGroup":
        """Action on an invariant set, relabelled ``0..len(points)-1`` in sorted order."""
        pts = sorted(points)
        idx = {p: i for i, p in enumerate(pts)}
        gens = []
        for g in self.generators:
            img = []
            for p in pts:
                q = g.images[p]
                if q not in idx:
                    raise ValueError("point set is not invariant")
                img.append(idx[q])
            gens.append(Permutation._raw(tuple(img)))
        return PermGroup(len(pts), gens)

    def __repr__(self):
        return f"PermGroup(degree={self.degree}, order={self.order()}, ngens={len(self.generators)})"

    def to_json(self) -> dict:
        return {"degree": self.degree, "generators": [g.to_json() for g in self.generators]}

    @classmethod
    def from_json(cls, data: dict) -> "PermGroup":
        return cls(int(data["degree"]), [Permutation(g) for g in data["generators"]])


def group_from_generators(gens: Sequence[Permutation], degree: int | None = None) -> PermGroup:
    """Build a group; ``degree`` is required only for an empty generator list."""
    if not gens:
        if degree is None:
            raise ValueError("degree required for an empty generator list")
        return PermGroup(degree)
    d = gens[0].degree
    if degree is not None and degree != d:
        raise DegreeMismatch(f"stated degree {degree} but generators have degree {d}")
    for g in gens:
        if g.degree != d:
            raise DegreeMismatch("generators have different degrees")
    return PermGroup(d, gens)


# ---------------------------------------------------------------------------
# Labelled actions


@dataclass(frozen=True)
class Cell:
    name: str
    tag: str
    points: tuple[int, ...]


@dataclass(frozen=True)
class LabeledAction:
    """A permutation group with its domain split into named cells.

    ``tag`` keeps the semantic identity of a cell (e.g. ``Delta1_2``) while
    ``name`` is unique within the action.
    """

    group: PermGroup
    cells: tuple[Cell, ...] = field(default=())

    def __post_init__(self):
        cells = self.cells
        if not cells:
            cells = (Cell("all", "all", tuple(range(self.group.degree))),)
            object.__setattr__(self, "cells", cells)
        pts = sorted(p for c in cells for p in c.points)
        if pts != list(range(self.group.degree)):
            raise ValueError("cells do not partition the domain")
        names = [c.name for c in cells]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate cell names: {names}")

    @property
    def degree(self) -> int:
        return self.group.degree

    def cell(self, name: str) -> Cell:
        for c in self.cells:
            if c.name == name:
                return c
        raise KeyError(name)

    def cells_tagged(self, tag: str) -> list[Cell]:
        return [c for c in self.cells if c.tag == tag]

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "cells": [{"name": c.name, "tag": c.tag, "points": list(c.points)} for c in self.cells],
        }


def direct_product(actions: Sequence[LabeledAction]) -> LabeledAction:
    """Product acting on the disjoint union; factor ``i`` occupies its own block.

    Cell names gain an ``"{i}:"`` prefix; tags are kept.
    """
    degree = sum(a.degree for a in actions)
    gens, cells = [], []
    offset = 0
    for i, a in enumerate(actions):
        for g in a.group.generators:
            gens.append(g.shifted(offset, degree))
        for c in a.cells:
            cells.append(Cell(f"{i}:{c.name}", c.tag, tuple(p + offset for p in c.points)))
        offset += a.degree
    return LabeledAction(PermGroup(degree, gens), tuple(cells))


def _same_labeled(a: LabeledAction, b: LabeledAction) -> bool:
    if a.degree != b.degree or a.group != b.group:
        return False
    return [(c.tag, c.points) for c in a.cells] == [(c.tag, c.points) for c in b.cells]


def wreath_top(action: LabeledAction, k: int, copies: Sequence[LabeledAction] | None = None) -> LabeledAction:
    """``A wr Sym(k)`` in its imprimitive action on ``k`` blocks.

    The base group is the direct product of the copies; the top group
    permutes the copies, matching point ``i`` of one copy with point ``i``
    of another.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if copies is None:
        copies = [action] * k
    if len(copies) != k:
        raise ValueError(f"expected {k} copies, got {len(copies)}")
    for c in copies:
        if not _same_labeled(c, action):
            raise ValueError("copies are not isomorphic to the given action")
    base = direct_product(copies)
    d, n = action.degree, base.degree
    tops = []
    if k >= 2:
        tops.append(_block_perm(d, k, [1, 0] + list(range(2, k))))
    if k >= 3:
        tops.append(_block_perm(d, k, list(range(1, k)) + [0]))
    return LabeledAction(PermGroup(n, list(base.group.generators) + tops), base.cells)


def _block_perm(d: int, k: int, sigma: Sequence[int]) -> Permutation:
    img = [0] * (d * k)
    for b in range(k):
        for i in range(d):
            img[b * d + i] = sigma[b] * d + i
    return Permutation._raw(tuple(img))
