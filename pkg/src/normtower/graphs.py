"""Simple graphs: automorphism groups, canonical forms, rigid families, tree coding.

Automorphisms and canonical labels come from an individualisation-refinement
search.  Ordered partitions are dicts ``start -> cell`` so that a cell keeps
its position when it splits; every choice depends on positions and counts
only, which is what makes the leaf certificates label-invariant.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .grouptop import Budget, SearchBudgetExceeded
from .normtrees import Tree
from .permcore import Permutation, PermGroup, schreier_sims

EXHAUSTIVE_VERTICES = 8


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        norm = set()
        for e in self.edges:
            u, v = e
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {e} out of range")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        return cls(n, frozenset(tuple(e) for e in edges))

    @cached_property
    def nbr(self) -> list[int]:
        """Neighbourhoods as bit masks."""
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return masks

    def degree(self, v: int) -> int:
        return self.nbr[v].bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.nbr[u] >> v & 1)

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Image under ``v -> perm[v]``."""
        return Graph(self.n, frozenset((perm[u], perm[v]) for u, v in self.edges))

    def is_automorphism(self, perm: Sequence[int]) -> bool:
        return self.relabel(perm).edges == self.edges

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in sorted(self.edges)]}

    @classmethod
    def from_json(cls, data: dict) -> "Graph":
        return cls.from_edges(int(data["n"]), data["edges"])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def connected_components(g: Graph) -> list[list[int]]:
    seen = [False] * g.n
    out = []
    for s in range(g.n):
        if seen[s]:
            continue
        comp, stack = [], [s]
        seen[s] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            m = g.nbr[v]
            while m:
                low = m & -m
                w = low.bit_length() - 1
                m ^= low
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        out.append(sorted(comp))
    return out


def is_connected(g: Graph) -> bool:
    return g.n > 0 and len(connected_components(g)) == 1


@dataclass(frozen=True)
class DirectSum:
    graph: Graph
    offsets: tuple[int, ...]
    sizes: tuple[int, ...]

    def vertex(self, part: int, v: int) -> int:
        if not 0 <= v < self.sizes[part]:
            raise IndexError(v)
        return self.offsets[part] + v

    def part_of(self, w: int) -> tuple[int, int]:
        for i, (o, s) in enumerate(zip(self.offsets, self.sizes)):
            if o <= w < o + s:
                return i, w - o
        raise IndexError(w)


def direct_sum(parts: Sequence[Graph]) -> DirectSum:
    offsets, edges, n = [], set(), 0
    for g in parts:
        offsets.append(n)
        edges.update((u + n, v + n) for u, v in g.edges)
        n += g.n
    return DirectSum(Graph(n, frozenset(edges)), tuple(offsets), tuple(g.n for g in parts))


# ---------------------------------------------------------------------------
# refinement


def _refine(nbr: list[int], cells: dict, queue: Sequence[int]) -> dict:
    cells = dict(cells)
    q = deque(queue)
    inq = set(q)
    while q:
        if len(cells) == len(nbr):
            break
        ws = q.popleft()
        inq.discard(ws)
        wm = 0
        for w in cells[ws]:
            wm |= 1 << w
        for xs in sorted(cells):
            X = cells[xs]
            if len(X) == 1:
                continue
            groups: dict[int, list[int]] = {}
            for v in X:
                groups.setdefault((nbr[v] & wm).bit_count(), []).append(v)
            if len(groups) == 1:
                continue
            pos = xs
            for k in sorted(groups):
                cells[pos] = groups[k]
                if pos not in inq:
                    q.append(pos)
                    inq.add(pos)
                pos += len(groups[k])
    return cells


def _initial(g: Graph, colours: Sequence | None = None) -> dict:
    if g.n == 0:
        return {}
    if colours is None:
        cells = {0: list(range(g.n))}
    else:
        by: dict = {}
        for v, c in enumerate(colours):
            by.setdefault(c, []).append(v)
        cells, pos = {}, 0
        for c in sorted(by):
            cells[pos] = by[c]
            pos += len(by[c])
    return _refine(g.nbr, cells, sorted(cells))


def _individualise(nbr, cells: dict, v: int) -> dict:
    for s, X in cells.items():
        if v in X:
            break
    new = dict(cells)
    new[s] = [v]
    new[s + 1] = [x for x in X if x != v]
    return _refine(nbr, new, [s])


def _target(cells: dict) -> int | None:
    for s in sorted(cells):
        if len(cells[s]) > 1:
            return s
    return None


def _shape(nbr, cells: dict) -> tuple:
    starts = sorted(cells)
    masks = []
    for s in starts:
        m = 0
        for v in cells[s]:
            m |= 1 << v
        masks.append(m)
    quotient = tuple(tuple((nbr[cells[s][0]] & m).bit_count() for m in masks) for s in starts)
    return tuple(len(cells[s]) for s in starts), quotient


def _leaf(nbr, cells: dict) -> tuple[tuple, list[int]]:
    """Certificate (relabelled adjacency rows) and labelling ``v -> position``."""
    n = len(nbr)
    lab = [0] * n
    for s, X in cells.items():
        lab[X[0]] = s
    order = [0] * n
    for v, p in enumerate(lab):
        order[p] = v
    rows = []
    for p in range(n):
        m, r = nbr[order[p]], 0
        while m:
            low = m & -m
            r |= 1 << lab[low.bit_length() - 1]
            m ^= low
        rows.append(r)
    return tuple(rows), lab


def _stab_orbits(gens: list, n: int, fixed: tuple) -> list[int]:
    if not gens:
        return list(range(n))
    chain = schreier_sims(gens, n, fixed)
    lg = chain.level_gens[len(fixed)] if len(fixed) < len(chain.level_gens) else []
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in lg:
        for x in range(n):
            a, b = find(x), find(g[x])
            if a != b:
                parent[max(a, b)] = min(a, b)
    return [find(x) for x in range(n)]


@dataclass
class _IR:
    g: Graph
    colours: Sequence | None = None
    budget: Budget = field(default_factory=lambda: Budget(2_000_000))

    def __post_init__(self):
        self.nbr = self.g.nbr
        self.n = self.g.n
        self.gens: list[tuple] = []

    def _child(self, cells, v):
        self.budget.tick()
        return _individualise(self.nbr, cells, v)

    def automorphisms(self) -> list[tuple]:
        if self.n == 0:
            return []
        root = _initial(self.g, self.colours)
        path, seq = [root], []
        node = root
        while (t := _target(node)) is not None:
            v = min(node[t])
            seq.append(v)
            node = self._child(node, v)
            path.append(node)
        self.first_cert, self.first_lab = _leaf(self.nbr, node)
        self.shapes = [_shape(self.nbr, c) for c in path]
        for level in reversed(range(len(seq))):
            node = path[level]
            cell = sorted(node[_target(node)])
            fixed = tuple(seq[:level])
            ids = _stab_orbits(self.gens, self.n, fixed)
            done = {ids[seq[level]]}
            for w in cell:
                if ids[w] in done:
                    continue
                lab = self._find(self._child(node, w), level + 1)
                if lab is not None:
                    inv = [0] * self.n
                    for v, p in enumerate(lab):
                        inv[p] = v
                    self.gens.append(tuple(inv[self.first_lab[v]] for v in range(self.n)))
                    ids = _stab_orbits(self.gens, self.n, fixed)
                    done.add(ids[seq[level]])
                else:
                    done.add(ids[w])
        return self.gens

    def _find(self, node, depth):
        if _shape(self.nbr, node) != self.shapes[depth]:
            return None
        t = _target(node)
        if t is None:
            cert, lab = _leaf(self.nbr, node)
            return lab if cert == self.first_cert else None
        for v in sorted(node[t]):
            r = self._find(self._child(node, v), depth + 1)
            if r is not None:
                return r
        return None

    def canonical(self) -> tuple[tuple, list[int]]:
        """Least leaf certificate over the whole search tree."""
        if self.n == 0:
            return (), []
        if not hasattr(self, "first_cert"):
            self.automorphisms()
        best: list = [None, None]
        cache: dict = {}

        def orbit_ids(fixed):
            if fixed not in cache:
                cache[fixed] = _stab_orbits(self.gens, self.n, fixed)
            return cache[fixed]

        def rec(node, fixed):
            t = _target(node)
            if t is None:
                cert, lab = _leaf(self.nbr, node)
                if best[0] is None or cert < best[0]:
                    best[0], best[1] = cert, lab
                return
            ids = orbit_ids(fixed)
            seen = set()
            for v in sorted(node[t]):
                if ids[v] in seen:
                    continue
                seen.add(ids[v])
                rec(self._child(node, v), fixed + (v,))

        rec(_initial(self.g, self.colours), ())
        return best[0], best[1]


def aut_group(g: Graph, budget: Budget | None = None) -> PermGroup:
    ir = _IR(g, budget=budget or Budget(2_000_000))
    return PermGroup(g.n, [Permutation(p) for p in ir.automorphisms()])


def aut_group_exhaustive(g: Graph) -> PermGroup:
    """Oracle: test every bijection.  Only sensible for small graphs."""
    gens = [Permutation(p) for p in itertools.permutations(range(g.n)) if g.is_automorphism(p)]
    return PermGroup(g.n, gens)


def is_rigid(g: Graph) -> bool:
    return aut_group(g).order() == 1


# ---------------------------------------------------------------------------
# canonical forms


def _matrix_string(g: Graph, perm: Sequence[int]) -> str:
    inv = [0] * g.n
    for v, p in enumerate(perm):
        inv[p] = v
    nbr = g.nbr
    return "".join(
        "1" if nbr[inv[i]] >> inv[j] & 1 else "0" for i in range(g.n) for j in range(i + 1, g.n)
    )


@dataclass(frozen=True, order=True)
class CanonicalForm:
    n: int
    method: str
    data: str

    def to_json(self) -> dict:
        return {"n": self.n, "method": self.method, "data": self.data}


def canonical_labeling(g: Graph) -> list[int]:
    """A labelling ``v -> new label`` whose image is the canonical graph."""
    if g.n <= EXHAUSTIVE_VERTICES:
        best, arg = None, None
        for p in itertools.permutations(range(g.n)):
            s = _matrix_string(g, p)
            if best is None or s < best:
                best, arg = s, list(p)
        return arg or []
    return _IR(g).canonical()[1]


def canonical_form(g: Graph) -> CanonicalForm:
    """Exhaustive least adjacency string up to 8 vertices, refinement-based above."""
    if g.n <= EXHAUSTIVE_VERTICES:
        lab = canonical_labeling(g)
        return CanonicalForm(g.n, "exhaustive", _matrix_string(g, lab))
    cert, _ = _IR(g).canonical()
    return CanonicalForm(g.n, "refinement", ",".join(format(r, "x") for r in cert))


def is_isomorphic(a: Graph, b: Graph) -> list[int] | None:
    """A bijection ``v -> w`` mapping ``a`` onto ``b``, or ``None``."""
    if a.n != b.n or len(a.edges) != len(b.edges):
        return None
    if sorted(map(a.degree, range(a.n))) != sorted(map(b.degree, range(b.n))):
        return None
    la, lb = canonical_labeling(a), canonical_labeling(b)
    if a.relabel(la) != b.relabel(lb):
        return None
    inv_b = [0] * b.n
    for v, p in enumerate(lb):
        inv_b[p] = v
    phi = [inv_b[la[v]] for v in range(a.n)]
    assert a.relabel(phi) == b
    return phi


# ---------------------------------------------------------------------------
# rigid families


MIN_RIGID_VERTICES = 2


@dataclass(frozen=True)
class RigidCertificate:
    aut_order: int
    canonical: CanonicalForm
    connected: bool
    oracle_checked: bool

    def to_json(self) -> dict:
        return {
            "aut_order": self.aut_order,
            "canonical": self.canonical.to_json(),
            "connected": self.connected,
            "oracle_checked": self.oracle_checked,
        }


@dataclass(frozen=True)
class RigidFamily:
    members: tuple[Graph, ...]
    certificates: tuple[RigidCertificate, ...]

    def __len__(self):
        return len(self.members)

    def __getitem__(self, i) -> Graph:
        return self.members[i]

    def verify(self) -> bool:
        forms = set()
        for g, c in zip(self.members, self.certificates):
            if not is_connected(g) or aut_group(g).order() != 1:
                return False
            if canonical_form(g) != c.canonical:
                return False
            forms.add(c.canonical)
        return len(forms) == len(self.members)

    def to_json(self) -> dict:
        return {
            "members": [g.to_json() for g in self.members],
            "certificates": [c.to_json() for c in self.certificates],
        }


_CLASSES: dict[int, list[Graph]] = {1: [Graph(1)]}


def graph_classes(n: int) -> list[Graph]:
    """One representative per isomorphism class on ``n`` vertices.

    Classes are deduplicated by the refinement certificate, which is a
    complete invariant at every size.
    """
    if n in _CLASSES:
        return _CLASSES[n]
    reps: dict[tuple, Graph] = {}
    for g in graph_classes(n - 1):
        for mask in range(1 << (n - 1)):
            edges = set(g.edges)
            edges.update((v, n - 1) for v in range(n - 1) if mask >> v & 1)
            h = Graph(n, frozenset(edges))
            cert, lab = _IR(h).canonical()
            if cert not in reps:
                reps[cert] = h.relabel(lab)
    _CLASSES[n] = [reps[k] for k in sorted(reps)]
    return _CLASSES[n]


def rigid_graphs(n: int) -> list[Graph]:
    """Connected asymmetric graphs on ``n`` vertices, canonically labelled, in canonical-form order."""
    found = [g for g in graph_classes(n) if is_connected(g) and is_rigid(g)]
    found = [g.relabel(canonical_labeling(g)) for g in found]
    return sorted(found, key=canonical_form)


def rigid_family(k: int, max_vertices: int = 7) -> RigidFamily:
    if k < 1:
        raise ValueError("k must be positive")
    members: list[Graph] = []
    n = MIN_RIGID_VERTICES
    while len(members) < k:
        if n > max_vertices:
            raise SearchBudgetExceeded(f"fewer than {k} rigid graphs with at most {max_vertices} vertices")
        members.extend(rigid_graphs(n)[: k - len(members)])
        n += 1
    certs = []
    for g in members:
        small = g.n <= EXHAUSTIVE_VERTICES
        order = aut_group(g).order()
        if small:
            assert aut_group_exhaustive(g).order() == order
        certs.append(RigidCertificate(order, canonical_form(g), is_connected(g), small))
    return RigidFamily(tuple(members), tuple(certs))


# ---------------------------------------------------------------------------
# tree coding


def encode_tree(t: Tree) -> Graph:
    """Graph whose automorphisms are exactly the tree automorphisms.

    The tree edges are kept; the root is marked by a triangle ``(r, a, b)``
    with pendant paths of lengths ``h+1`` at ``a`` and ``h+2`` at ``b``, where
    ``h`` is the tree height.  The marker is rigid and no tree branch is long
    enough to imitate it, so every automorphism fixes ``r``.
    """
    if t.height == 0:
        return Graph(0)
    if len(t.parents[0]) != 1:
        raise ValueError("tree must have a single root")
    offsets, n = [], 0
    for level in t.parents:
        offsets.append(n)
        n += len(level)
    edges = []
    for k in range(1, t.height):
        for i, p in enumerate(t.parents[k]):
            edges.append((offsets[k - 1] + p, offsets[k] + i))
    h = t.height
    a, b = n, n + 1
    edges += [(0, a), (0, b), (a, b)]
    n += 2
    for anchor, length in ((a, h + 1), (b, h + 2)):
        prev = anchor
        for _ in range(length):
            edges.append((prev, n))
            prev = n
            n += 1
    return Graph.from_edges(n, edges)


def tree_vertex(t: Tree, node: tuple[int, int]) -> int:
    """Vertex of ``encode_tree(t)`` carrying ``node``."""
    k, i = node
    return sum(len(level) for level in t.parents[:k]) + i
