"""Splitting trees: balanced tree partitions and directed-pair splits."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Sequence

from .otree import OrientedTree, ancestral_ordering


@dataclass(frozen=True)
class TreePartition:
    t1: OrientedTree
    t2: OrientedTree
    shared: int


def _subtree_counts(t: OrientedTree, marked: set[int]):
    order, parent = ancestral_ordering(t, t.vertices[0])
    below = {v: int(v in marked) for v in order}
    for v in reversed(order[1:]):
        below[parent[v]] += below[v]
    return parent, below


def tree_partition(t: OrientedTree, L: Iterable[int]) -> TreePartition:
    """Two edge-disjoint subtrees sharing one vertex, each holding at least |L|/3 of ``L``.

    A neighbour ``v`` of ``u`` is heavy for ``u`` when the component of
    ``T - uv`` containing ``v`` holds at least |L|/3 marked vertices.
    """
    marked = set(L)
    if not marked:
        raise ValueError("L must be non-empty")
    if not marked <= set(t.vertices):
        raise ValueError("L must consist of tree vertices")
    size = len(marked)
    if size == 1:
        (x,) = marked
        return TreePartition(t, t.induced([x]), x)

    parent, below = _subtree_counts(t, marked)

    def across(u: int, v: int) -> int:
        """Marked vertices on v's side of the edge uv."""
        return below[v] if parent.get(v) == u else size - below[u]

    def heavy(u: int, v: int) -> bool:
        return 3 * across(u, v) >= size

    for u, v in sorted(tuple(sorted(e)) for e in t.edges):
        if heavy(u, v) and heavy(v, u):
            side_u = t.component_without(v, u)
            side_v = t.component_without(u, v) | {u}
            return TreePartition(t.induced(side_u), t.induced(side_v), u)

    center = next(v for v in t.vertices if not any(heavy(v, y) for y in t.neighbours(v)))
    comps = sorted((t.component_without(center, y) for y in t.neighbours(center)), key=min)
    # each component holds fewer than |L|/3 marked vertices; cut at the first
    # prefix reaching c, which then stays below 2c
    c3 = size - 1 if center in marked else size  # 3c
    prefix = 0
    first: set[int] = {center}
    for i, comp in enumerate(comps):
        prefix += len(comp & marked)
        first |= comp
        if 3 * prefix >= c3:
            second = {center}.union(*comps[i + 1 :]) if i + 1 < len(comps) else {center}
            return TreePartition(t.induced(first), t.induced(second), center)
    raise AssertionError("no prefix reached the window; the heavy-neighbour argument was violated")


def check_tree_partition(t: OrientedTree, part: TreePartition, L: Iterable[int]) -> list[str]:
    problems = []
    L = set(L)
    v1, v2 = set(part.t1.vertices), set(part.t2.vertices)
    e1, e2 = set(part.t1.edges), set(part.t2.edges)
    if v1 | v2 != set(t.vertices):
        problems.append("vertex union is not V(T)")
    if v1 & v2 != {part.shared}:
        problems.append("subtrees do not meet in exactly the shared vertex")
    if e1 | e2 != set(t.edges):
        problems.append("edge union is not E(T)")
    if e1 & e2:
        problems.append("subtrees share an edge")
    for name, vs in (("t1", v1), ("t2", v2)):
        if 3 * len(vs & L) < len(L):
            problems.append(f"{name} holds fewer than |L|/3 marked vertices")
    return problems


def _pendant_side(t: OrientedTree, sub: set[int]) -> tuple[int, int]:
    crossing = [e for e in t.edges if (e[0] in sub) != (e[1] in sub)]
    if len(crossing) != 1:
        raise ValueError(f"subtree {sorted(sub)} is not pendant (has {len(crossing)} crossing edges)")
    return crossing[0]


def nice_split(
    t: OrientedTree,
    in_subtrees: Sequence[Iterable[int]],
    out_subtrees: Sequence[Iterable[int]],
    a: int,
    b: int,
) -> tuple[set[int], set[int]]:
    """Split V(T) into (A, B) of sizes (a, b) with no edge from B to A.

    In-subtrees (attach edge leaving them) go to A, out-subtrees to B.  The
    rest of A is grown by repeatedly taking the smallest vertex with no
    in-neighbour among the vertices not yet placed.
    """
    ins = [set(s) for s in in_subtrees]
    outs = [set(s) for s in out_subtrees]
    everything = ins + outs
    placed: set[int] = set()
    for s in everything:
        if placed & s:
            raise ValueError("subtrees must be pairwise disjoint")
        placed |= s
    if not placed <= set(t.vertices):
        raise ValueError("subtrees must consist of tree vertices")
    for s in ins:
        tail, _ = _pendant_side(t, s)
        if tail not in s:
            raise ValueError(f"in-subtree {sorted(s)} has an incoming attach edge")
    for s in outs:
        _, head = _pendant_side(t, s)
        if head not in s:
            raise ValueError(f"out-subtree {sorted(s)} has an outgoing attach edge")
    size_in = sum(len(s) for s in ins)
    size_out = sum(len(s) for s in outs)
    if a + b != t.n or a < size_in or b < size_out or a < 0 or b < 0:
        raise ValueError(f"sizes a={a}, b={b} incompatible with n={t.n}, in={size_in}, out={size_out}")

    A: set[int] = set().union(*ins) if ins else set()
    rest = set(t.vertices) - placed
    indeg = {v: sum(1 for u in t.in_nbrs[v] if u in rest) for v in rest}
    sources = [v for v in rest if indeg[v] == 0]
    heapq.heapify(sources)
    while len(A) < a:
        x = heapq.heappop(sources)
        A.add(x)
        rest.discard(x)
        for y in t.out_nbrs[x]:
            if y in rest:
                indeg[y] -= 1
                if indeg[y] == 0:
                    heapq.heappush(sources, y)
    return A, set(t.vertices) - A


def is_directed_split(t: OrientedTree, A: set[int], B: set[int]) -> bool:
    return A.isdisjoint(B) and A | B == set(t.vertices) and not any(u in B and v in A for u, v in t.edges)
