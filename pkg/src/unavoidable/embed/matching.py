"""Maximum bipartite matching (Hopcroft-Karp) and perfect matchings across vertex sets."""

from __future__ import annotations

from collections import deque
from typing import Sequence

from ..tournament import Tournament

_INF = float("inf")


def hopcroft_karp(adj: Sequence[Sequence[int]], n_right: int) -> list[int]:
    """Maximum matching; ``adj[i]`` lists right vertices adjacent to left vertex ``i``.

    Returns ``match_left`` with the matched right vertex or -1 for each left vertex.
    """
    n_left = len(adj)
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0.0] * n_left

    def bfs() -> bool:
        queue = deque()
        for u in range(n_left):
            if match_l[u] < 0:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = _INF
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w < 0:
                    found = True
                elif dist[w] == _INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u: int) -> bool:
        # iterative augmenting-path search along the BFS layers
        stack = [(u, iter(adj[u]))]
        path = []
        while stack:
            x, it = stack[-1]
            advanced = False
            for v in it:
                w = match_r[v]
                if w < 0:
                    path.append((x, v))
                    for a, b in path:
                        match_l[a] = b
                        match_r[b] = a
                    return True
                if dist[w] == dist[x] + 1:
                    path.append((x, v))
                    stack.append((w, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                dist[x] = _INF
                stack.pop()
                if path:
                    path.pop()
        return False

    while bfs():
        for u in range(n_left):
            if match_l[u] < 0:
                dfs(u)
    return match_l


def bipartite_adjacency(g: Tournament, X: Sequence[int], Y: Sequence[int], direction: str = "forward") -> list[list[int]]:
    """``adj[i]`` = indices ``j`` with ``X[i] -> Y[j]`` (forward) or ``Y[j] -> X[i]`` (backward)."""
    if direction not in ("forward", "backward"):
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    sets = g.out if direction == "forward" else g.in_sets
    return [[j for j, y in enumerate(Y) if sets[x] >> y & 1] for x in X]


def maximum_matching(g: Tournament, X: Sequence[int], Y: Sequence[int], direction: str = "forward") -> dict[int, int]:
    X, Y = list(X), list(Y)
    match = hopcroft_karp(bipartite_adjacency(g, X, Y, direction), len(Y))
    return {X[i]: Y[j] for i, j in enumerate(match) if j >= 0}


def perfect_matching(g: Tournament, X: Sequence[int], Y: Sequence[int], direction: str = "forward") -> dict[int, int] | None:
    """A perfect matching ``x -> y`` of X into Y using edges in the given direction, or None."""
    X, Y = list(X), list(Y)
    if len(X) != len(Y):
        raise ValueError(f"sides differ in size: {len(X)} != {len(Y)}")
    if set(X) & set(Y):
        raise ValueError("sides must be disjoint")
    m = maximum_matching(g, X, Y, direction)
    return m if len(m) == len(X) else None
