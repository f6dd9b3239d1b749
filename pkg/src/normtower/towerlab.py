"""Finite-stage constructions: the groups H_n, F_n, D^n_m and the main assembly.

Every group acts on connected components.  A stage graph ``G_n(gamma)`` is
``2^n`` copies of a rigid connected seed, so its automorphism group is the
symmetric group on the copies.  Component ``c`` is laid out as

    Delta_0 = {0},  Delta1_b = {2^b, ..., 2^(b+1) - 1}  for b < n,

and ``Delta_b = {0, ..., 2^b - 1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .graphs import DirectSum, Graph, RigidFamily, aut_group, direct_sum, is_connected, is_rigid
from .grouptop import (
    Budget,
    Tower,
    blocks_through_point,
    block_partition,
    normaliser_tower,
    normalizer,
    partition_stabilizer,
    perm_iso,
)
from .permcore import Cell, LabeledAction, PermGroup, Permutation, direct_product, wreath_top

DEFAULT_MAX_STAGE = 3
EXTENDED_MAX_STAGE = 4


class StageLimit(ValueError):
    pass


class InvalidSeed(ValueError):
    pass


def delta(b: int) -> tuple[int, ...]:
    return tuple(range(2 ** b))


def delta1(b: int) -> tuple[int, ...]:
    return tuple(range(2 ** b, 2 ** (b + 1)))


def embed(g: PermGroup, offset: int, degree: int) -> list[Permutation]:
    return [x.shifted(offset, degree) for x in g.generators]


# ---------------------------------------------------------------------------
# the groups F_n (component action only; independent of the seed)

_F_CACHE: dict[str, list[PermGroup]] = {}
_T_CACHE: dict[tuple[str, int], Tower] = {}


def h_group(n: int, method: str = "auto", budget: Budget | None = None) -> PermGroup:
    """``F_0`` on ``Delta_0`` times ``F_b`` on ``Delta1_b`` for ``b < n``."""
    d = 2 ** n
    gens = []
    for b in range(n):
        gens += embed(f_group(b, method, budget), 2 ** b, d)
    return PermGroup(d, gens)


def stage_tower(n: int, method: str = "auto", budget: Budget | None = None) -> Tower:
    key = (method, n)
    if key not in _T_CACHE:
        d = 2 ** n
        _T_CACHE[key] = normaliser_tower(PermGroup.symmetric(d), h_group(n, method, budget), method, budget)
    return _T_CACHE[key]


def f_group(n: int, method: str = "auto", budget: Budget | None = None) -> PermGroup:
    """Terminal group of the normaliser tower of ``H_n`` in ``Sym(2^n)``."""
    if n == 0:
        return PermGroup.trivial(1)
    cache = _F_CACHE.setdefault(method, [PermGroup.trivial(1)])
    while len(cache) <= n:
        cache.append(stage_tower(len(cache), method, budget).terminal)
    return cache[n]


def stage_cells(n: int) -> tuple[Cell, ...]:
    cells = [Cell("Delta_0", "Delta_0", (0,))]
    cells += [Cell(f"Delta1_{b}", f"Delta1_{b}", delta1(b)) for b in range(n)]
    return tuple(cells)


# ---------------------------------------------------------------------------
# stages


def check_seed(gamma: Graph):
    if not is_connected(gamma):
        raise InvalidSeed("seed graph is not connected")
    if not is_rigid(gamma):
        raise InvalidSeed("seed graph is not rigid")


@dataclass
class StageComplex:
    gamma: Graph
    n: int
    graph: DirectSum
    components: LabeledAction
    H: PermGroup
    F: PermGroup
    tower: Tower
    method: str = "auto"
    tampered: bool = False

    @property
    def degree(self) -> int:
        return 2 ** self.n

    def component_of(self, v: int) -> int:
        return self.graph.part_of(v)[0]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "seed": self.gamma.to_json(),
            "components": self.degree,
            "vertices": self.graph.graph.n,
            "cells": [{"name": c.name, "points": list(c.points)} for c in self.components.cells],
            "H": self.H.to_json(),
            "F": self.F.to_json(),
            "F_order": self.F.order(),
            "tower": {"orders": self.tower.orders(), "height": self.tower.height},
            "tampered": self.tampered,
        }


def build_stage(
    gamma: Graph,
    n: int,
    max_stage: int = DEFAULT_MAX_STAGE,
    method: str = "auto",
    budget: Budget | None = None,
) -> StageComplex:
    check_seed(gamma)
    if n < 0:
        raise StageLimit("stage must be non-negative")
    if n > max_stage:
        raise StageLimit(f"stage {n} exceeds the configured maximum {max_stage}")
    d = 2 ** n
    H = h_group(n, method, budget)
    tower = stage_tower(n, method, budget) if n else normaliser_tower(PermGroup.trivial(1), H)
    comps = LabeledAction(H, stage_cells(n))
    return StageComplex(gamma, n, direct_sum([gamma] * d), comps, H, tower.terminal, tower, method)


def tamper(s: StageComplex) -> StageComplex:
    """Negative control: replace ``F`` by the full symmetric group."""
    return StageComplex(
        s.gamma, s.n, s.graph, s.components, s.H, PermGroup.symmetric(s.degree), s.tower, s.method, True
    )


def stage_tower_height(s: StageComplex) -> int:
    return s.tower.height


def induced_component_action(ds: DirectSum, g: Permutation) -> tuple[int, ...]:
    """The permutation of components induced by a graph automorphism."""
    out = []
    for part, off in enumerate(ds.offsets):
        out.append(ds.part_of(g(off))[0])
    return tuple(out)


def vertex_level_check(ds: DirectSum, expected: PermGroup) -> bool:
    """``Aut`` of the graph, pushed onto components, equals ``expected``."""
    A = aut_group(ds.graph)
    induced = PermGroup(len(ds.offsets), [Permutation(induced_component_action(ds, g)) for g in A.generators])
    return induced == expected and A.order() == expected.order()


# ---------------------------------------------------------------------------
# conditions (1)..(7)


@dataclass
class Check:
    label: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"label": self.label, "passed": self.passed, "detail": self.detail}


@dataclass
class ConditionReport:
    n: int
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[str]:
        return sorted({c.label for c in self.checks if not c.passed})

    def to_json(self) -> dict:
        return {"n": self.n, "passed": self.passed, "checks": [c.to_json() for c in self.checks]}


def level_product(beta: int, n: int, method: str = "auto", budget: Budget | None = None) -> PermGroup:
    """``F_beta`` on ``Delta_beta`` times ``F_g`` on ``Delta1_g`` for ``beta <= g < n``."""
    d = 2 ** n
    gens = embed(f_group(beta, method, budget), 0, d)
    for g in range(beta, n):
        gens += embed(f_group(g, method, budget), 2 ** g, d)
    return PermGroup(d, gens)


def check_conditions(s: StageComplex, budget: Budget | None = None) -> ConditionReport:
    n, F, m = s.n, s.F, s.method
    rep = ConditionReport(n)
    add = rep.checks.append

    add(Check("1", F.is_transitive(), f"orbits {[len(o) for o in F.orbits()]}"))

    if F.is_transitive():
        blocks = [set(b) for b in blocks_through_point(F, 0)]
        want = [set(delta(b)) for b in range(n + 1)]
        ok = sorted(map(sorted, blocks)) == sorted(map(sorted, want))
        add(Check("2", ok, f"block sizes through v0: {sorted(len(b) for b in blocks)}"))
        for b in range(n + 1):
            classes = block_partition(F, delta(b))
            for g in range(b, n):
                target = set(delta1(g))
                bad = [c for c in classes if 0 < len(target & set(c)) < len(c)]
                add(Check("3", not bad, f"E_{b} vs Delta1_{g}" + (f": class {bad[0]} straddles" if bad else "")))
    else:
        add(Check("2", False, "F is not transitive"))

    levels = s.tower.levels
    for b in range(n):
        want = level_product(b, n, m, budget)
        lv = levels[b] if b < len(levels) else None
        ok = lv is not None and lv == want
        add(Check("4", ok, f"level {b}: order {lv.order() if lv else None} vs {want.order()}"))
        parts = [delta(b)] + [delta1(g) for g in range(b, n)]
        stab = partition_stabilizer(F, parts, budget)
        ok = lv is not None and stab == lv
        add(Check("5", ok, f"level {b}: partition stabiliser order {stab.order()}"))

    N = normalizer(PermGroup.symmetric(s.degree), F, m, budget)
    ok = N == F and s.tower.terminal == F
    add(Check("6", ok, f"|N(F)| = {N.order()}, |F| = {F.order()}, |terminal| = {s.tower.terminal.order()}"))

    for b in range(n + 1):
        for g in range(b + 1, n + 1):
            Fb = f_group(b, m, budget)
            Fg = F if g == n else f_group(g, m, budget)
            iso = perm_iso(Fb, Fg, budget)
            add(Check("7", iso is None, f"F_{b} (degree {Fb.degree}) vs F_{g} (degree {Fg.degree})"))
    return rep


def wreath_witness(n: int, method: str = "auto"):
    """A perm-isomorphism from ``F_{n-1} wr Sym(2)`` onto ``F_n``."""
    prev = LabeledAction(f_group(n - 1, method))
    return perm_iso(wreath_top(prev, 2).group, f_group(n, method))


# ---------------------------------------------------------------------------
# D^n_m


@dataclass
class DComplex:
    n: int
    m: int
    action: LabeledAction
    tower: Tower

    def wreath_blocks(self) -> list[tuple[int, ...]]:
        """The three blocks carrying the ``F_m wr Sym(3)`` factor."""
        d = 2 ** self.n
        k = 2 ** self.m
        return [delta1(self.m), tuple(range(d, d + k)), tuple(range(d + k, d + 2 * k))]

    def expected_level(self, method: str = "auto") -> PermGroup:
        """``F_m`` on ``Delta_m`` x ``F_m wr Sym(3)`` x ``F_g`` on ``Delta1_g`` (m < g < n)."""
        deg = self.action.degree
        gens = embed(f_group(self.m, method), 0, deg)
        wr = wreath_top(LabeledAction(f_group(self.m, method)), 3).group
        pts = [p for blk in self.wreath_blocks() for p in blk]
        for g in wr.generators:
            img = list(range(deg))
            for i, p in enumerate(pts):
                img[p] = pts[g.images[i]]
            gens.append(Permutation(img))
        for g in range(self.m + 1, self.n):
            gens += embed(f_group(g, method), 2 ** g, deg)
        return PermGroup(deg, gens)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "degree": self.action.degree,
            "tower": {"orders": self.tower.orders(), "height": self.tower.height},
        }


def build_D(
    gamma: Graph,
    n: int,
    m: int,
    max_stage: int = DEFAULT_MAX_STAGE,
    method: str = "auto",
    budget: Budget | None = None,
) -> DComplex:
    check_seed(gamma)
    if not 1 <= m < n:
        raise StageLimit(f"need 1 <= m < n, got m={m}, n={n}")
    if n > max_stage:
        raise StageLimit(f"stage {n} exceeds the configured maximum {max_stage}")
    Hn = LabeledAction(h_group(n, method, budget), stage_cells(n))
    Fm = LabeledAction(f_group(m, method, budget), (Cell("block", f"Delta_{m}", delta(m)),))
    act = direct_product([Hn, Fm, Fm])
    tower = normaliser_tower(PermGroup.symmetric(act.degree), act.group, method, budget)
    return DComplex(n, m, act, tower)


# ---------------------------------------------------------------------------
# main assembly


@dataclass(frozen=True)
class Factor:
    kind: str  # "B_pair", "H_block" or "F_block"
    seed: int
    stage: int
    offset: int
    size: int

    def points(self) -> tuple[int, ...]:
        return tuple(range(self.offset, self.offset + self.size))

    def to_json(self) -> dict:
        return {"kind": self.kind, "seed": self.seed, "stage": self.stage, "offset": self.offset, "size": self.size}


_KIND_ORDER = {"B_pair": 0, "H_block": 1, "F_block": 2}


@dataclass
class Assembly:
    L: int
    alpha: int
    family: RigidFamily
    factors: list[Factor]
    H: PermGroup
    seeds: list[int]  # seed graph index per factor after any identification
    domain: LabeledAction = None

    @property
    def degree(self) -> int:
        return self.H.degree

    def component_seeds(self) -> list[int]:
        out = [0] * self.degree
        for f, s in zip(self.factors, self.seeds):
            for p in f.points():
                out[p] = s
        return out

    def ambient(self) -> PermGroup:
        """Product of symmetric groups over classes of isomorphic components."""
        classes: dict[int, list[int]] = {}
        for p, s in enumerate(self.component_seeds()):
            classes.setdefault(s, []).append(p)
        gens = []
        for pts in classes.values():
            gens += PermGroup.symmetric(self.degree, pts).generators
        return PermGroup(self.degree, gens)

    def classes(self) -> list[list[int]]:
        classes: dict[int, list[int]] = {}
        for p, s in enumerate(self.component_seeds()):
            classes.setdefault(s, []).append(p)
        return [classes[k] for k in sorted(classes)]

    def graph(self) -> DirectSum:
        return direct_sum([self.family[s] for s in self.component_seeds()])

    def tower(self, method: str = "auto", budget: Budget | None = None) -> Tower:
        return normaliser_tower(self.ambient(), self.H, method, budget)

    def to_json(self) -> dict:
        return {
            "L": self.L,
            "alpha": self.alpha,
            "degree": self.degree,
            "factors": [dict(f.to_json(), graph=s) for f, s in zip(self.factors, self.seeds)],
            "classes": self.classes(),
            "H_order": self.H.order(),
        }


def _factor_group(f: Factor, method: str, budget) -> PermGroup:
    if f.kind == "H_block":
        return h_group(f.stage, method, budget)
    return f_group(f.stage, method, budget)


def _build(L, alpha, family, specs, method, budget) -> Assembly:
    specs = sorted(specs, key=lambda s: (_KIND_ORDER[s[0]], s[1], s[2]))
    factors, off = [], 0
    for kind, seed, stage, sub in specs:
        size = 2 ** stage
        factors.append(Factor(kind, seed, stage, off, size))
        off += size
    gens, cells = [], []
    for f in factors:
        gens += embed(_factor_group(f, method, budget), f.offset, off)
        cells.append(Cell(f"{f.kind}:{f.seed}:{f.stage}:{f.offset}", f.kind, f.points()))
    H = PermGroup(off, gens)
    return Assembly(L, alpha, family, factors, H, [f.seed for f in factors], LabeledAction(H, tuple(cells)))


def assembly_specs(L: int, alpha: int) -> list[tuple]:
    if alpha == 0:
        specs = [("H_block", 0, 0, 0)]
    else:
        specs = []
        for b in range(1, alpha):
            specs += [("B_pair", b, b, 0), ("B_pair", b, b, 1)]
        specs.append(("H_block", alpha, alpha, 0))
    specs += [("F_block", g + 1, g, 0) for g in range(alpha, L)]
    return specs


def assemble_main(
    family: RigidFamily,
    L: int,
    alpha: int,
    method: str = "auto",
    budget: Budget | None = None,
    max_stage: int = DEFAULT_MAX_STAGE,
) -> Assembly:
    if not 0 <= alpha < L:
        raise ValueError(f"need 0 <= alpha < L, got alpha={alpha}, L={L}")
    if len(family) < L + 1:
        raise ValueError(f"family has {len(family)} members, need {L + 1}")
    if L - 1 > max_stage:
        raise StageLimit(f"assembly needs stage {L - 1} above the maximum {max_stage}")
    return _build(L, alpha, family, assembly_specs(L, alpha), method, budget)


def subtowers(a: Assembly, method: str = "auto", budget: Budget | None = None) -> dict:
    """Heights of the tower restricted to the three factor kinds."""
    out = {}
    amb = a.ambient()
    for kind in ("B_pair", "H_block", "F_block"):
        pts = sorted(p for f in a.factors if f.kind == kind for p in f.points())
        if not pts:
            continue
        A = amb.restriction(pts)
        G = a.H.restriction(pts)
        out[kind] = normaliser_tower(A, G, method, budget).height
    return out


# ---------------------------------------------------------------------------
# identification of seed graphs


def identity_partition(L: int) -> list[list[int]]:
    return [[i] for i in range(L + 1)]


def partition_for(L: int, alpha: int, beta: int) -> list[list[int]]:
    """The class identifying ``alpha`` with ``beta`` (beta < alpha) or ``alpha..beta`` (alpha < beta)."""
    if not 1 <= beta < L:
        raise ValueError(f"need 1 <= beta < L, got {beta}")
    if beta == alpha:
        return identity_partition(L)
    cls = {alpha, beta} if beta < alpha else set(range(alpha, beta + 1))
    return [sorted(cls)] + [[i] for i in range(L + 1) if i not in cls]


def _normalise_partition(E: Sequence[Sequence[int]], L: int) -> list[list[int]]:
    parts = [sorted(set(p)) for p in E if p]
    flat = sorted(x for p in parts for x in p)
    if flat != list(range(L + 1)):
        raise ValueError(f"E must partition 0..{L}")
    return sorted(parts)


def predict(a: Assembly, E: list[list[int]]) -> int | None:
    """Predicted height after identification, or None for unsupported shapes."""
    big = [p for p in E if len(p) > 1]
    if not big:
        return a.alpha
    if len(big) != 1:
        return None
    cls = big[0]
    if len(cls) == 2 and cls[1] == a.alpha and 1 <= cls[0] < a.alpha:
        return cls[0]
    if cls[0] == a.alpha and cls == list(range(cls[0], cls[-1] + 1)) and cls[-1] < a.L:
        return cls[-1]
    return None


@dataclass
class RelabelResult:
    assembly: Assembly
    E: list[list[int]]
    representative: str
    predicted: int | None
    measured: int
    tower: Tower
    shape_match: bool | None

    @property
    def ok(self) -> bool:
        return self.predicted is None or (self.predicted == self.measured and self.shape_match is not False)

    def to_json(self) -> dict:
        return {
            "E": self.E,
            "representative": self.representative,
            "predicted": self.predicted,
            "measured": self.measured,
            "orders": self.tower.orders(),
            "shape_match": self.shape_match,
            "assembly": self.assembly.to_json(),
        }


def relabel_by_E(
    a: Assembly,
    E: Sequence[Sequence[int]],
    representative: str = "min",
    method: str = "auto",
    budget: Budget | None = None,
) -> RelabelResult:
    """Replace every seed graph by its class representative and recompute the tower."""
    E = _normalise_partition(E, a.L)
    pick = min if representative == "min" else max
    rep = {x: pick(p) for p in E for x in p}
    new = Assembly(a.L, a.alpha, a.family, a.factors, a.H, [rep[s] for s in a.seeds], a.domain)
    tower = new.tower(method, budget)
    pred = predict(a, E)
    shape = None
    if pred is not None and pred != a.alpha:
        shape = _expected_shape(new, E, pred, method, budget)
    return RelabelResult(new, E, representative, pred, tower.height, tower, shape)


def _expected_shape(new: Assembly, E, beta: int, method, budget) -> bool:
    """Compare with the predicted shape after reordering factors.

    For beta < alpha this is ``B' x D^alpha_beta x prod F``; for alpha < beta
    it is ``B_alpha x H_beta x prod F``.
    """
    alpha, deg = new.alpha, new.degree
    fs = new.factors
    if beta < alpha:
        h = next(f for f in fs if f.kind == "H_block")
        pair = [f for f in fs if f.kind == "B_pair" and f.stage == beta]
        rest = [f for f in fs if f not in pair and f is not h]
        order = [h] + pair + rest
        parts = [h_group(alpha, method, budget), f_group(beta, method, budget), f_group(beta, method, budget)]
        parts += [_factor_group(f, method, budget) for f in rest]
    else:
        h = next(f for f in fs if f.kind == "H_block")
        merged = [f for f in fs if f.kind == "F_block" and f.stage < beta]
        rest = [f for f in fs if f is not h and f not in merged]
        order = [h] + merged + rest
        parts = [h_group(beta, method, budget)] + [_factor_group(f, method, budget) for f in rest]
    pts = [p for f in order for p in f.points()]
    gens, off = [], 0
    for g in parts:
        for x in g.generators:
            img = list(range(deg))
            for i in range(g.degree):
                img[pts[off + i]] = pts[off + x.images[i]]
            gens.append(Permutation(img))
        off += g.degree
    return PermGroup(deg, gens) == new.H
