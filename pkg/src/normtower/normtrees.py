"""Finite trees: normality, end-extension and extension of level isomorphisms.

Nodes are positional: ``(level, index)``.  ``parents[k][i]`` is the index in
level ``k-1`` of the parent of node ``(k, i)``; level-0 entries are ``None``.
The height is the number of non-empty levels.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator

Node = tuple[int, int]


class InvalidTree(ValueError):
    pass


@dataclass(frozen=True)
class Tree:
    parents: tuple[tuple, ...]

    def __post_init__(self):
        parents = tuple(tuple(level) for level in self.parents)
        object.__setattr__(self, "parents", parents)
        for k, level in enumerate(parents):
            if not level:
                raise InvalidTree(f"level {k} is empty below the height")
            for p in level:
                if k == 0:
                    if p is not None:
                        raise InvalidTree("level-0 nodes have no parent")
                elif not (isinstance(p, int) and 0 <= p < len(parents[k - 1])):
                    raise InvalidTree(f"bad parent index {p!r} at level {k}")

    @property
    def height(self) -> int:
        return len(self.parents)

    def level_sizes(self) -> list[int]:
        return [len(level) for level in self.parents]

    def __len__(self) -> int:
        return sum(self.level_sizes())

    def nodes(self) -> Iterator[Node]:
        for k, level in enumerate(self.parents):
            for i in range(len(level)):
                yield (k, i)

    def parent(self, node: Node) -> Node | None:
        k, i = node
        return None if k == 0 else (k - 1, self.parents[k][i])

    def children(self, node: Node) -> list[Node]:
        k, i = node
        if k + 1 >= self.height:
            return []
        return [(k + 1, j) for j, p in enumerate(self.parents[k + 1]) if p == i]

    def pred(self, node: Node) -> list[Node]:
        """Strict predecessors, root first."""
        out = []
        p = self.parent(node)
        while p is not None:
            out.append(p)
            p = self.parent(p)
        return out[::-1]

    def restrict(self, d: int) -> "Tree":
        """The tree made of levels ``< d``."""
        return Tree(self.parents[:d])

    def subtree(self, node: Node) -> "Tree":
        """``{x : node <= x}`` re-rooted at ``node``."""
        levels = [[None]]
        current = [node]
        while True:
            nxt, par = [], []
            for pi, x in enumerate(current):
                for c in self.children(x):
                    nxt.append(c)
                    par.append(pi)
            if not nxt:
                break
            levels.append(par)
            current = nxt
        return Tree(tuple(tuple(l) for l in levels))

    def branches(self) -> list[list[Node]]:
        """Maximal chains, each listed root first."""
        leaves = [x for x in self.nodes() if not self.children(x)]
        return [self.pred(x) + [x] for x in leaves]

    def to_json(self) -> dict:
        return {"height": self.height, "parents": [list(level) for level in self.parents]}

    @classmethod
    def from_json(cls, data: dict) -> "Tree":
        t = cls(tuple(tuple(level) for level in data["parents"]))
        if "height" in data and int(data["height"]) != t.height:
            raise InvalidTree("height field disagrees with parents")
        return t


EMPTY = Tree(())


# ---------------------------------------------------------------------------
# normality


@dataclass
class Verdict:
    normal: bool
    violations: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"normal": self.normal, "violations": self.violations, "notes": self.notes}


def validate_normal(t: Tree) -> Verdict:
    """Check the finite normal-tree clauses; limit-level clauses hold vacuously."""
    v: list[str] = []
    d = t.height
    if d > 0 and len(t.parents[0]) != 1:
        v.append(f"(a) level 0 has {len(t.parents[0])} nodes")
    for node in t.nodes():
        k = node[0]
        if k + 1 < d:
            nc = len(t.children(node))
            if nc != 2:
                v.append(f"(b) node {node} has {nc} children")
    # (c): every node reaches every higher level
    for node in t.nodes():
        k = node[0]
        frontier = [node]
        for _ in range(k + 1, d):
            frontier = [c for x in frontier for c in t.children(x)]
            if not frontier:
                v.append(f"(c) node {node} has no descendant at a higher level")
                break
    notes = [
        "levels below the height are non-empty and the level at the height is empty by construction",
        "(d) limit-level uniqueness: vacuous at finite height",
        "<kappa-closure: vacuous at finite height",
    ]
    return Verdict(not v, v, notes)


def build_normal(n: int) -> Tree:
    """The complete binary tree with levels ``0..n-1``."""
    if n < 0:
        raise ValueError("height must be non-negative")
    if n == 0:
        return EMPTY
    levels = [(None,)]
    for k in range(1, n):
        levels.append(tuple(i // 2 for i in range(2 ** k)))
    return Tree(tuple(levels))


def end_extend(t: Tree, m: int) -> Tree:
    """Extend to height ``m``; every top-level node gets two children per new level."""
    if m < t.height:
        raise ValueError(f"cannot end-extend height {t.height} to {m}")
    if t.height == 0:
        return build_normal(m)
    levels = list(t.parents)
    while len(levels) < m:
        levels.append(tuple(i // 2 for i in range(2 * len(levels[-1]))))
    return Tree(tuple(levels))


def is_end_extension(small: Tree, big: Tree) -> bool:
    return big.restrict(small.height) == small


# ---------------------------------------------------------------------------
# rooted-tree invariants (used as oracles by the graph coding tests)


def ahu_code(t: Tree, node: Node = (0, 0)) -> str:
    kids = sorted(ahu_code(t, c) for c in t.children(node))
    return "(" + "".join(kids) + ")"


def aut_order(t: Tree) -> int:
    """Order of the automorphism group of a rooted tree (or forest of roots)."""
    if t.height == 0:
        return 1

    def rec(node):
        kids = t.children(node)
        codes = Counter(ahu_code(t, c) for c in kids)
        total = math.prod(math.factorial(m) for m in codes.values())
        for c in kids:
            total *= rec(c)
        return total

    roots = [(0, i) for i in range(len(t.parents[0]))]
    codes = Counter(ahu_code(t, r) for r in roots)
    total = math.prod(math.factorial(m) for m in codes.values())
    for r in roots:
        total *= rec(r)
    return total


def trees_isomorphic(a: Tree, b: Tree) -> bool:
    if a.height != b.height or a.level_sizes() != b.level_sizes():
        return False
    ra = sorted(ahu_code(a, (0, i)) for i in range(len(a.parents[0]))) if a.height else []
    rb = sorted(ahu_code(b, (0, i)) for i in range(len(b.parents[0]))) if b.height else []
    return ra == rb


# ---------------------------------------------------------------------------
# isomorphisms


class IsoError(ValueError):
    pass


@dataclass(frozen=True)
class PartialTreeIso:
    """An isomorphism ``S|(delta+1) -> T|(delta+1)`` given as a node map."""

    source: Tree
    target: Tree
    delta: int
    mapping: dict

    def validate(self):
        S, T, d = self.source, self.target, self.delta
        if d + 1 > S.height or d + 1 > T.height:
            raise IsoError("delta+1 exceeds a tree height")
        dom = [x for x in S.nodes() if x[0] <= d]
        if sorted(self.mapping) != sorted(dom):
            raise IsoError("mapping is not defined exactly on S|(delta+1)")
        img = [self.mapping[x] for x in dom]
        if sorted(img) != sorted(y for y in T.nodes() if y[0] <= d):
            raise IsoError("mapping is not onto T|(delta+1)")
        for x in dom:
            if self.mapping[x][0] != x[0]:
                raise IsoError(f"node {x} changes level")
            p = S.parent(x)
            if p is not None and T.parent(self.mapping[x]) != self.mapping[p]:
                raise IsoError(f"order not preserved at {x}")


def root_map(S: Tree, T: Tree) -> PartialTreeIso:
    return PartialTreeIso(S, T, 0, {(0, 0): (0, 0)})


def _match_subtrees(S: Tree, s: Node, T: Tree, t: Node, out: dict):
    out[s] = t
    sk = S.children(s)
    tk = T.children(t)
    if len(sk) != len(tk):
        raise IsoError(f"subtrees at {s} and {t} are not isomorphic")
    tcodes = [(ahu_code(T, c), c) for c in tk]
    used = [False] * len(tk)
    for c in sk:
        code = ahu_code(S, c)
        for j, (tc, d) in enumerate(tcodes):
            if not used[j] and tc == code:
                used[j] = True
                _match_subtrees(S, c, T, d, out)
                break
        else:
            raise IsoError(f"subtrees at {s} and {t} are not isomorphic")


def extend_iso(phi: PartialTreeIso) -> dict:
    """Extend ``phi`` to a full isomorphism by matching ``S[s]`` onto ``T[phi(s)]``."""
    phi.validate()
    S, T = phi.source, phi.target
    if S.height != T.height:
        raise IsoError(f"heights differ: {S.height} vs {T.height}")
    full = dict(phi.mapping)
    for s in [x for x in S.nodes() if x[0] == phi.delta]:
        _match_subtrees(S, s, T, phi.mapping[s], full)
    return full


def is_isomorphism(S: Tree, T: Tree, m: dict) -> bool:
    if sorted(m) != sorted(S.nodes()) or sorted(m.values()) != sorted(T.nodes()):
        return False
    for x in S.nodes():
        if m[x][0] != x[0]:
            return False
        p = S.parent(x)
        if p is not None and T.parent(m[x]) != m[p]:
            return False
    return True


def enumerate_extensions(phi: PartialTreeIso) -> Iterator[dict]:
    """Every full isomorphism containing ``phi``, by level-by-level brute force."""
    phi.validate()
    S, T = phi.source, phi.target
    if S.height != T.height or S.level_sizes() != T.level_sizes():
        return

    def rec(k, m):
        if k == S.height:
            yield dict(m)
            return
        src = [(k, i) for i in range(len(S.parents[k]))]
        for perm in itertools.permutations(range(len(T.parents[k]))):
            ok = True
            for i, j in enumerate(perm):
                if T.parent((k, j)) != m[S.parent((k, i))]:
                    ok = False
                    break
            if ok:
                m2 = dict(m)
                m2.update({src[i]: (k, j) for i, j in enumerate(perm)})
                yield from rec(k + 1, m2)

    yield from rec(phi.delta + 1, dict(phi.mapping))


def leaf_permutation(t: Tree, m: dict) -> list[int]:
    """Action of an automorphism on the top level."""
    k = t.height - 1
    return [m[(k, i)][1] for i in range(len(t.parents[k]))]
