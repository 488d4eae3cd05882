"""Randomised allocation of tree vertices to a cyclic sequence of clusters.

Clusters are numbered ``1..k`` and wrap around, so cluster ``k + 1`` is
cluster ``1``.  A non-root vertex is *canonical* when it sits one cluster
after its parent along a parent -> child edge, or one cluster before it along
a child -> parent edge.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from .otree import OrientedTree, ancestral_ordering
from .tournament import _rng


def wrap(i: int, k: int) -> int:
    return (i - 1) % k + 1


@dataclass(frozen=True)
class Allocation:
    cluster_of: dict[int, int]
    k: int
    root: int
    order: tuple[int, ...]
    parent: dict[int, int | None]
    canonical: dict[int, bool]

    def members(self, i: int) -> list[int]:
        return [v for v in self.order if self.cluster_of[v] == i]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["vertex", "cluster", "parent", "canonical_flag"])
        for v in self.order:
            p = self.parent[v]
            flag = "" if p is None else int(self.canonical[v])
            w.writerow([v, self.cluster_of[v], "" if p is None else p, flag])
        return buf.getvalue()


def canonical_cluster(t: OrientedTree, parent: int, child: int, parent_cluster: int, k: int) -> int:
    step = 1 if t.has_edge(parent, child) else -1
    return wrap(parent_cluster + step, k)


def allocate(t: OrientedTree, root: int, k: int, seed=None) -> Allocation:
    """Allocate every vertex of ``t`` to one of ``k`` clusters.

    Vertices are visited in BFS order from ``root``, which goes to cluster 1.
    Vertices at odd distance from the root are placed canonically; the other
    non-root vertices follow a fair coin between canonical placement and
    their parent's cluster.
    """
    if k < 1:
        raise ValueError("k must be positive")
    order, parent = ancestral_ordering(t, root)
    coins = _rng(seed).integers(0, 2, size=len(order)).tolist()
    cluster = {root: 1}
    depth = {root: 0}
    canonical = {root: True}
    outs = t.out_nbrs
    for idx in range(1, len(order)):
        v = order[idx]
        p = parent[v]
        depth[v] = depth[p] + 1
        step = 1 if v in outs[p] else -1
        canon = (cluster[p] + step - 1) % k + 1
        if depth[v] % 2 == 1 or coins[idx]:
            cluster[v] = canon
            canonical[v] = True
        else:
            cluster[v] = cluster[p]
            canonical[v] = canon == cluster[p]
    return Allocation(cluster, k, root, tuple(order), parent, canonical)


def is_semi_canonical(t: OrientedTree, alloc: Allocation) -> tuple[bool, list[str]]:
    """Check the three semi-canonical clauses; returns (ok, violations)."""
    k = alloc.k
    c = alloc.cluster_of
    problems = []
    if set(c) != set(t.vertices):
        return False, ["allocation does not cover V(T)"]
    _, parent = ancestral_ordering(t, alloc.root)
    for v, p in parent.items():
        if p is None:
            continue
        canon = canonical_cluster(t, p, v, c[p], k)
        if c[v] != canon and c[v] != c[p]:
            problems.append(f"(i) vertex {v} is neither canonical nor with its parent")
        if p == alloc.root and c[v] != canon:
            problems.append(f"(ii) root neighbour {v} is not canonical")

    # (iii) monochromatic components, via union-find on same-cluster edges
    boss = {v: v for v in t.vertices}

    def find(x):
        while boss[x] != x:
            boss[x] = boss[boss[x]]
            x = boss[x]
        return x

    for u, v in t.edges:
        if c[u] == c[v]:
            boss[find(u)] = find(v)
    sizes: dict[int, int] = {}
    for v in t.vertices:
        r = find(v)
        sizes[r] = sizes.get(r, 0) + 1
    delta = max(t.max_degree(), 1)  # a lone vertex is its own component
    for r, s in sizes.items():
        if s > delta:
            problems.append(f"(iii) component of cluster {c[r]} has {s} > {delta} vertices")
    return not problems, problems


def allocation_histogram(alloc: Allocation, S: Iterable[int] | None = None) -> list[int]:
    """Per-cluster counts of ``S`` (all vertices by default); entry ``i`` is cluster ``i + 1``."""
    counts = [0] * alloc.k
    for v in (alloc.order if S is None else S):
        counts[alloc.cluster_of[v] - 1] += 1
    return counts


def within_band(counts: list[int], total: int, k: int, slack: float) -> bool:
    """Every count lies in ``total * (1/k +- slack)``."""
    return all(abs(x - total / k) <= slack * total for x in counts)


def loglog_slack(n: int) -> float:
    return 1.0 / math.log(math.log(n))


def binom_residue_counts(n: int, k: int) -> list[int]:
    """Number of subsets of an n-set whose size is ``r`` mod ``k``, for each ``r``."""
    if n < 0 or k < 1:
        raise ValueError("need n >= 0 and k >= 1")
    counts = [0] * k
    counts[0] = 1
    for _ in range(n):
        counts = [counts[r] + counts[r - 1] for r in range(k)] if k > 1 else [counts[0] * 2]
    return counts


def binom_residue_distribution(n: int, k: int) -> tuple[Fraction, ...]:
    """Exact P(Bin(n, 1/2) = r mod k) for ``r = 0..k-1``."""
    total = 1 << n
    return tuple(Fraction(c, total) for c in binom_residue_counts(n, k))


def residue_as_floats(dist) -> np.ndarray:
    return np.array([float(p) for p in dist])


def tune_allocation(
    t: OrientedTree,
    alloc: Allocation,
    objective: Callable[[list[int], list[int]], tuple],
    marked: Iterable[int] = (),
    max_steps: int = 200,
) -> Allocation:
    """Greedy local search over the coins of an allocation.

    Flipping the coin of an even-depth vertex moves its whole subtree one
    cluster along, and any coin assignment is semi-canonical, so the search
    only ever visits valid allocations.  ``objective(counts, marked_counts)``
    is minimised; each step applies the single best improving flip.
    """
    k = alloc.k
    if k == 1:
        return alloc
    order = alloc.order
    parent = alloc.parent
    marked = set(marked)
    children: dict[int, list[int]] = {v: [] for v in order}
    for v in order[1:]:
        children[parent[v]].append(v)
    depth = {alloc.root: 0}
    for v in order[1:]:
        depth[v] = depth[parent[v]] + 1
    cluster = dict(alloc.cluster_of)
    canonical = dict(alloc.canonical)
    flexible = [v for v in order[1:] if depth[v] % 2 == 0]
    subtree: dict[int, list[int]] = {}
    for v in reversed(order):
        subtree[v] = [v] + [u for c in children[v] for u in subtree[c]]
    step = {v: (1 if v in t.out_nbrs[parent[v]] else -1) for v in flexible}

    counts = [0] * k
    mcounts = [0] * k
    for v in order:
        counts[cluster[v] - 1] += 1
        if v in marked:
            mcounts[cluster[v] - 1] += 1
    current = objective(counts, mcounts)
    for _ in range(max_steps):
        best = None
        for v in flexible:
            delta = -step[v] if canonical[v] else step[v]
            c2, m2 = counts[:], mcounts[:]
            for u in subtree[v]:
                a = cluster[u] - 1
                b = (a + delta) % k
                c2[a] -= 1
                c2[b] += 1
                if u in marked:
                    m2[a] -= 1
                    m2[b] += 1
            score = objective(c2, m2)
            if score < current and (best is None or score < best[0]):
                best = (score, v, delta, c2, m2)
        if best is None:
            break
        current, v, delta, counts, mcounts = best
        for u in subtree[v]:
            cluster[u] = (cluster[u] - 1 + delta) % k + 1
        canonical[v] = not canonical[v]
    return Allocation(cluster, k, alloc.root, order, parent, canonical)
