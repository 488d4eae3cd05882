"""Pendant cherries, pendant stars and the niceness certificate."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .otree import OrientedTree, leaf_classes


def as_fraction(alpha) -> Fraction:
    """Exact value of ``alpha``; floats are snapped to the nearest small fraction."""
    if isinstance(alpha, Fraction):
        return alpha
    if isinstance(alpha, int):
        return Fraction(alpha)
    return Fraction(alpha).limit_denominator(10**9)


def star_quota(alpha, n: int) -> int:
    """ceil(alpha * n) computed exactly."""
    return math.ceil(as_fraction(alpha) * n)


def pendant_cherries(edges: Iterable[Sequence[int]]) -> list[tuple[int, int, int]]:
    """Center-attached pendant cherries ``(leaf, center, leaf)`` of an undirected tree.

    The two ends are leaves adjacent to the center and the center has exactly
    one neighbour outside the triple.
    """
    adj: dict[int, list[int]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    if len(adj) < 4:
        return []
    out = []
    for c in sorted(adj):
        if len(adj[c]) != 3:
            continue
        leaves = sorted(x for x in adj[c] if len(adj[x]) == 1)
        for i in range(len(leaves)):
            for j in range(i + 1, len(leaves)):
                out.append((leaves[i], c, leaves[j]))
    return out


def cherry_count_from_edges(edges: np.ndarray, n: int) -> int:
    """Vectorised count of center-attached pendant cherries (edges as an ``(n-1, 2)`` array)."""
    if n < 4:
        return 0
    deg = np.bincount(edges.ravel(), minlength=n)
    leaf = deg == 1
    leaf_nbrs = np.zeros(n, dtype=np.int64)
    np.add.at(leaf_nbrs, edges[:, 1], leaf[edges[:, 0]])
    np.add.at(leaf_nbrs, edges[:, 0], leaf[edges[:, 1]])
    centers = deg == 3
    return int(np.sum(centers & (leaf_nbrs == 2)) + 3 * np.sum(centers & (leaf_nbrs == 3)))


@dataclass(frozen=True)
class PendantStar:
    """A star whose removal leaves the tree connected.

    ``leaves`` are leaves of the tree adjacent to ``center``.  Usually the
    star hangs off the tree at its center; when ``connector`` is set the star
    also contains that degree-2 neighbour of the center and hangs off it.
    """

    center: int
    leaves: tuple[int, ...]
    attach_edge: tuple[int, int]
    kind: str
    connector: int | None = None

    @property
    def vertices(self) -> tuple[int, ...]:
        extra = () if self.connector is None else (self.connector,)
        return (self.center,) + self.leaves + extra

    @property
    def size(self) -> int:
        return len(self.vertices)

    def in_leaves(self, t: OrientedTree) -> list[int]:
        return [x for x in self.leaves if t.has_edge(x, self.center)]

    def out_leaves(self, t: OrientedTree) -> list[int]:
        return [x for x in self.leaves if t.has_edge(self.center, x)]


@dataclass(frozen=True)
class NicenessCertificate:
    n: int
    a_stars: tuple[PendantStar, ...]
    b_stars: tuple[PendantStar, ...]

    @property
    def alpha_max(self) -> Fraction:
        return Fraction(min(len(self.a_stars), len(self.b_stars)), self.n)

    def supports(self, alpha) -> bool:
        return star_quota(alpha, self.n) <= min(len(self.a_stars), len(self.b_stars))


def _star_at(t: OrientedTree, v: int) -> tuple[list[int], int] | None:
    """Leaf neighbours of ``v`` and its single non-leaf neighbour, if ``v`` is a star center."""
    leaves, others = [], []
    for y in t.neighbours(v):
        (leaves if t.degree(y) == 1 else others).append(y)
    if len(others) != 1 or not leaves:
        return None
    return sorted(leaves), others[0]


def classify_star(t: OrientedTree, center: int, leaves: Sequence[int], rest: int, connector: int | None = None) -> str | None:
    """'A', 'B' or None for a pendant star hanging off ``rest``.

    The star hangs off at ``connector`` when given, otherwise at ``center``.
    """
    hook = center if connector is None else connector
    has_out = any(t.has_edge(center, x) for x in leaves)
    has_in = any(t.has_edge(x, center) for x in leaves)
    if t.has_edge(hook, rest):
        return "A" if has_out else None
    return "B" if has_out and has_in else None


def _candidate_stars(t: OrientedTree) -> list[PendantStar]:
    found = []
    for v in t.vertices:
        if t.degree(v) < 2:
            continue
        spot = _star_at(t, v)
        if spot is None:
            continue
        leaves, x = spot
        options = [(x, None)]
        if t.degree(x) == 2:
            (beyond,) = [y for y in t.neighbours(x) if y != v]
            options.append((beyond, x))
        for rest, via in options:
            kind = classify_star(t, v, leaves, rest, via)
            if kind is None:
                continue
            hook = v if via is None else via
            attach = (hook, rest) if t.has_edge(hook, rest) else (rest, hook)
            found.append(PendantStar(v, tuple(leaves), attach, kind, via))
    return found


def _conflict_groups(stars: list[PendantStar]) -> list[list[PendantStar]]:
    boss = list(range(len(stars)))

    def find(i):
        while boss[i] != i:
            boss[i] = boss[boss[i]]
            i = boss[i]
        return i

    owner: dict[int, int] = {}
    for i, s in enumerate(stars):
        for v in s.vertices:
            if v in owner:
                boss[find(i)] = find(owner[v])
            else:
                owner[v] = i
    groups: dict[int, list[PendantStar]] = {}
    for i, s in enumerate(stars):
        groups.setdefault(find(i), []).append(s)
    return list(groups.values())


def _group_options(group: list[PendantStar]) -> dict[tuple[int, int], tuple[PendantStar, ...]]:
    """Best disjoint choices inside one conflict group, keyed by (kind A count, kind B count)."""
    options: dict[tuple[int, int], tuple[PendantStar, ...]] = {}
    for r in range(len(group) + 1):
        for pick in itertools.combinations(group, r):
            seen: set[int] = set()
            ok = True
            for s in pick:
                if seen & set(s.vertices):
                    ok = False
                    break
                seen |= set(s.vertices)
            if ok:
                key = (sum(s.kind == "A" for s in pick), sum(s.kind == "B" for s in pick))
                options.setdefault(key, pick)
    return options


def pendant_star_census(t: OrientedTree) -> NicenessCertificate:
    """Vertex-disjoint pendant stars of both kinds, chosen to maximise the smaller count.

    Conflicts between candidate stars are local (a center and the degree-2
    connector next to it), so each conflict group is solved by enumeration
    and the groups are combined by a small dynamic programme.
    """
    if t.n < 4:
        return NicenessCertificate(t.n, (), ())
    best: dict[int, tuple[int, tuple[PendantStar, ...]]] = {0: (0, ())}
    for group in _conflict_groups(_candidate_stars(t)):
        options = _group_options(group) if len(group) > 1 else {(0, 0): (), (group[0].kind == "A", group[0].kind == "B"): (group[0],)}
        nxt: dict[int, tuple[int, tuple[PendantStar, ...]]] = {}
        for a, (b, chosen) in best.items():
            for (da, db), pick in options.items():
                key = a + da
                if key not in nxt or nxt[key][0] < b + db:
                    nxt[key] = (b + db, chosen + pick)
        best = nxt
    a_count = max(best, key=lambda a: (min(a, best[a][0]), a + best[a][0], -a))
    chosen = best[a_count][1]
    a_stars = tuple(sorted((s for s in chosen if s.kind == "A"), key=lambda s: s.center))
    b_stars = tuple(sorted((s for s in chosen if s.kind == "B"), key=lambda s: s.center))
    return NicenessCertificate(t.n, a_stars, b_stars)


def is_alpha_nice(t: OrientedTree, alpha) -> tuple[bool, NicenessCertificate]:
    if not 0 < as_fraction(alpha) <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    cert = pendant_star_census(t)
    return cert.supports(alpha), cert


def validate_star(t: OrientedTree, star: PendantStar) -> list[str]:
    """Independent re-check of a star's invariants; returns the violated ones."""
    problems = []
    in_l, out_l = leaf_classes(t)
    c = star.center
    for x in star.leaves:
        if t.degree(x) != 1 or c not in t.neighbours(x):
            problems.append(f"{x} is not a leaf at {c}")
    hook = c
    if star.connector is not None:
        hook = star.connector
        if t.degree(hook) != 2 or c not in t.neighbours(hook):
            problems.append(f"connector {hook} is not a degree-2 neighbour of {c}")
    inside = set(star.vertices)
    crossing = [e for e in t.edges if (e[0] in inside) != (e[1] in inside)]
    if crossing != [star.attach_edge]:
        problems.append("attach edge is not the unique crossing edge")
    else:
        try:
            t.induced(v for v in t.vertices if v not in inside)
        except ValueError:
            problems.append("removing the star disconnects the tree")
    leaves = set(star.leaves)
    if star.kind == "A":
        if star.attach_edge[0] != hook or not leaves & out_l:
            problems.append("kind A needs an outgoing attach edge and an out-leaf")
    elif star.kind == "B":
        if star.attach_edge[1] != hook or not leaves & out_l or not leaves & in_l:
            problems.append("kind B needs an incoming attach edge and both leaf types")
    else:
        problems.append(f"unknown kind {star.kind!r}")
    return problems


def cherry_kinds(t: OrientedTree) -> list[str | None]:
    """Kind ('A', 'B' or None) of every center-attached pendant cherry of ``t``."""
    kinds = []
    for a, c, b in pendant_cherries(t.edges):
        (rest,) = [y for y in t.neighbours(c) if y not in (a, b)]
        kinds.append(classify_star(t, c, (a, b), rest))
    return kinds
