"""Oriented trees, the Prüfer codec and random generation."""

from __future__ import annotations

import heapq
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .tournament import FormatError, _rng


@dataclass(frozen=True, eq=False)
class OrientedTree:
    """A tree with every edge directed ``(tail, head)``.

    Labels are arbitrary integers; generated trees use ``0..n-1``.
    """

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    root: int | None = None
    out_nbrs: dict = field(init=False, repr=False)
    in_nbrs: dict = field(init=False, repr=False)
    nbrs: dict = field(init=False, repr=False)

    def __post_init__(self):
        verts = tuple(sorted(set(self.vertices)))
        if len(verts) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)
        if not verts:
            raise ValueError("a tree needs at least one vertex")
        if len(edges) != len(verts) - 1:
            raise ValueError(f"a tree on {len(verts)} vertices needs {len(verts) - 1} edges, got {len(edges)}")
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at {u}")
        self._index(check=True)
        if self.root is not None and self.root not in self.out_nbrs:
            raise ValueError(f"root {self.root} is not a vertex")

    def _index(self, check: bool):
        outs = {v: [] for v in self.vertices}
        ins = {v: [] for v in self.vertices}
        nbrs = {v: [] for v in self.vertices}
        try:
            for u, v in self.edges:
                outs[u].append(v)
                ins[v].append(u)
                nbrs[u].append(v)
                nbrs[v].append(u)
        except KeyError as exc:
            raise ValueError(f"edge endpoint {exc.args[0]} is not a tree vertex") from None
        object.__setattr__(self, "out_nbrs", outs)
        object.__setattr__(self, "in_nbrs", ins)
        object.__setattr__(self, "nbrs", nbrs)
        if check:
            start = self.vertices[0]
            seen = {start}
            stack = [start]
            while stack:
                for y in nbrs[stack.pop()]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            if len(seen) != len(self.vertices):
                raise ValueError("edges do not form a connected tree")

    @classmethod
    def trusted(cls, n: int, edges) -> "OrientedTree":
        """Tree on ``0..n-1`` from edges already known to form a tree."""
        t = object.__new__(cls)
        object.__setattr__(t, "vertices", tuple(range(n)))
        object.__setattr__(t, "edges", tuple(edges))
        object.__setattr__(t, "root", None)
        t._index(check=False)
        return t

    @property
    def n(self) -> int:
        return len(self.vertices)

    def neighbours(self, v: int) -> list[int]:
        return self.nbrs[v]

    def degree(self, v: int) -> int:
        return len(self.nbrs[v])

    def max_degree(self) -> int:
        return max(self.degree(v) for v in self.vertices)

    def is_leaf(self, v: int) -> bool:
        return self.degree(v) == 1

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.out_nbrs[u]

    def with_root(self, root: int | None) -> "OrientedTree":
        return OrientedTree(self.vertices, self.edges, root)

    def reverse(self) -> "OrientedTree":
        return OrientedTree(self.vertices, tuple((v, u) for u, v in self.edges), self.root)

    def induced(self, vertices: Iterable[int], root: int | None = None) -> "OrientedTree":
        keep = set(vertices)
        return OrientedTree(tuple(keep), tuple(e for e in self.edges if e[0] in keep and e[1] in keep), root)

    def relabel(self, mapping: Mapping[int, int]) -> "OrientedTree":
        root = mapping[self.root] if self.root is not None else None
        return OrientedTree(tuple(mapping[v] for v in self.vertices), tuple((mapping[u], mapping[v]) for u, v in self.edges), root)

    def component_without(self, v: int, start: int) -> set[int]:
        """Vertices reachable from ``start`` in the tree with ``v`` deleted."""
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in self.neighbours(x):
                if y != v and y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    def __eq__(self, other):
        return isinstance(other, OrientedTree) and self.vertices == other.vertices and sorted(self.edges) == sorted(other.edges)

    def __hash__(self):
        return hash((self.vertices, tuple(sorted(self.edges))))

    def to_json(self) -> dict:
        data = {"n": self.n, "edges": [list(e) for e in self.edges]}
        if self.vertices != tuple(range(self.n)):
            data["vertices"] = list(self.vertices)
        return data

    @classmethod
    def from_json(cls, data: dict) -> "OrientedTree":
        if not isinstance(data, dict):
            raise FormatError("tree: expected a JSON object")
        if "prufer" in data:
            return from_prufer_exchange(data)
        n = data.get("n")
        if not isinstance(n, int) or n < 1:
            raise FormatError(f"n: expected a positive integer, got {n!r}")
        edges = data.get("edges")
        if not isinstance(edges, list) or not all(isinstance(e, list) and len(e) == 2 for e in edges):
            raise FormatError("edges: expected a list of [tail, head] pairs")
        verts = data.get("vertices", list(range(n)))
        if len(verts) != n:
            raise FormatError("vertices: length does not match n")
        try:
            return cls(tuple(verts), tuple(tuple(e) for e in edges))
        except (ValueError, TypeError) as exc:
            raise FormatError(f"edges: {exc}") from None

    def dumps(self) -> str:
        return json.dumps(self.to_json())


# --- Prüfer codec ------------------------------------------------------------


def prufer_decode(seq: Sequence[int], n: int) -> list[tuple[int, int]]:
    """Edges of the labelled tree on ``0..n-1`` with Prüfer sequence ``seq``.

    Each edge is listed as ``(removed leaf, neighbour)`` in decoding order.
    """
    if n < 2 or len(seq) != n - 2:
        raise FormatError(f"prufer: need n >= 2 and n - 2 = {n - 2} entries, got {len(seq)}")
    degree = [1] * n
    for x in seq:
        if not 0 <= x < n:
            raise FormatError(f"prufer: label {x} outside 0..{n - 1}")
        degree[x] += 1
    ptr = 0
    while degree[ptr] != 1:
        ptr += 1
    leaf = ptr
    edges = []
    for v in seq:
        edges.append((leaf, v))
        degree[v] -= 1
        if degree[v] == 1 and v < ptr:
            leaf = v
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges.append((leaf, n - 1))
    return edges


def prufer_encode(edges: Iterable[Sequence[int]], n: int) -> list[int]:
    """Prüfer sequence of a tree on ``0..n-1`` (orientation ignored)."""
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    leaves = [v for v in range(n) if len(adj[v]) == 1]
    heapq.heapify(leaves)
    seq = []
    for _ in range(n - 2):
        leaf = heapq.heappop(leaves)
        (nb,) = adj[leaf]
        seq.append(nb)
        adj[nb].discard(leaf)
        if len(adj[nb]) == 1:
            heapq.heappush(leaves, nb)
    return seq


def from_prufer(seq: Sequence[int], n: int | None = None, orient: str | None = None) -> OrientedTree:
    """Tree from a Prüfer sequence; ``orient`` bit ``i`` set means leaf -> neighbour on edge ``i``."""
    n = len(seq) + 2 if n is None else n
    edges = prufer_decode(seq, n)
    if orient is None:
        orient = "1" * len(edges)
    if len(orient) != len(edges) or set(orient) - {"0", "1"}:
        raise FormatError(f"orient: expected {len(edges)} bits")
    directed = tuple((a, b) if bit == "1" else (b, a) for (a, b), bit in zip(edges, orient))
    return OrientedTree(tuple(range(n)), directed)


def to_prufer(t: OrientedTree) -> list[int]:
    if t.vertices != tuple(range(t.n)):
        raise ValueError("Prüfer encoding needs vertices labelled 0..n-1")
    return prufer_encode(t.edges, t.n)


def to_prufer_exchange(t: OrientedTree) -> dict:
    seq = to_prufer(t)
    bits = "".join("1" if t.has_edge(a, b) else "0" for a, b in prufer_decode(seq, t.n))
    return {"prufer": seq, "orient": bits}


def from_prufer_exchange(data: dict) -> OrientedTree:
    seq = data.get("prufer")
    if not isinstance(seq, list) or not all(isinstance(x, int) for x in seq):
        raise FormatError("prufer: expected a list of integers")
    return from_prufer(seq, len(seq) + 2, data.get("orient"))


def random_prufer(n: int, seed=None) -> np.ndarray:
    return _rng(seed).integers(0, n, size=max(n - 2, 0))


def random_oriented_tree(n: int, seed=None) -> OrientedTree:
    """Uniform labelled oriented tree: uniform Prüfer sequence, then fair coins per edge."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return OrientedTree((0,), ())
    rng = _rng(seed)
    seq = rng.integers(0, n, size=n - 2).tolist()
    coins = rng.integers(0, 2, size=n - 1)
    edges = prufer_decode(seq, n)
    directed = [(a, b) if c else (b, a) for (a, b), c in zip(edges, coins.tolist())]
    return OrientedTree.trusted(n, directed)


# --- leaves, orderings -------------------------------------------------------


def leaf_classes(t: OrientedTree) -> tuple[set[int], set[int]]:
    """(in-leaves, out-leaves): an in-leaf's only edge leaves it, an out-leaf's enters it."""
    ins, outs = set(), set()
    if t.n < 2:
        return ins, outs
    for v in t.vertices:
        if t.degree(v) == 1:
            (ins if t.out_nbrs[v] else outs).add(v)
    return ins, outs


def ancestral_ordering(t: OrientedTree, root: int | None = None) -> tuple[list[int], dict[int, int | None]]:
    """BFS order from ``root`` with smallest-label tie-breaking, plus the parent map."""
    root = t.root if root is None else root
    if root is None:
        root = t.vertices[0]
    if root not in t.out_nbrs:
        raise ValueError(f"root {root} is not a vertex")
    parent: dict[int, int | None] = {root: None}
    order = [root]
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in sorted(t.neighbours(x)):
            if y not in parent:
                parent[y] = x
                order.append(y)
                queue.append(y)
    return order, parent


# --- stripping and re-attaching leaves ----------------------------------------


@dataclass(frozen=True)
class LeafRemoval:
    """Edges deleted by :func:`strip_leaf_pairs`, kept with their orientation."""

    edges: tuple[tuple[int, int], ...]

    def leaves_of(self, center: int) -> list[int]:
        return [v if u == center else u for u, v in self.edges if center in (u, v)]


def strip_leaf_pairs(t: OrientedTree, removals: Mapping[int, Iterable[int]]) -> tuple[OrientedTree, LeafRemoval]:
    """Delete the named leaves, given as ``{center: leaves adjacent to it}``."""
    removed = []
    gone = set()
    for center, leaves in removals.items():
        for leaf in leaves:
            if leaf in gone:
                raise ValueError(f"leaf {leaf} named twice")
            if leaf not in t.out_nbrs or t.degree(leaf) != 1 or center not in t.neighbours(leaf):
                raise ValueError(f"{leaf} is not a leaf adjacent to {center}")
            gone.add(leaf)
            removed.append((leaf, center) if t.has_edge(leaf, center) else (center, leaf))
    if gone and len(gone) >= t.n:
        raise ValueError("cannot strip every vertex")
    kept = tuple(v for v in t.vertices if v not in gone)
    edges = tuple(e for e in t.edges if e[0] not in gone and e[1] not in gone)
    return OrientedTree(kept, edges, t.root if t.root not in gone else None), LeafRemoval(tuple(removed))


def reattach(t: OrientedTree, record: LeafRemoval) -> OrientedTree:
    verts = set(t.vertices)
    for u, v in record.edges:
        verts.update((u, v))
    return OrientedTree(tuple(verts), t.edges + record.edges, t.root)


# --- named shapes ------------------------------------------------------------


def directed_path(n: int) -> OrientedTree:
    return OrientedTree(tuple(range(n)), tuple((i, i + 1) for i in range(n - 1)))


def antidirected_path(n: int) -> OrientedTree:
    """Path ``0 -> 1 <- 2 -> 3 <- ...`` with alternating orientations."""
    return OrientedTree(tuple(range(n)), tuple((i, i + 1) if i % 2 == 0 else (i + 1, i) for i in range(n - 1)))


def out_star(n: int) -> OrientedTree:
    return OrientedTree(tuple(range(n)), tuple((0, i) for i in range(1, n)))


def in_star(n: int) -> OrientedTree:
    return out_star(n).reverse()


def double_star_tree(a: int, b: int, c: int) -> OrientedTree:
    """Directed path on ``b`` vertices, ``a`` in-neighbours at its start, ``c`` out-neighbours at its end."""
    if min(a, b, c) < 1:
        raise ValueError("a, b, c must be positive")
    path = list(range(b))
    edges = [(path[i], path[i + 1]) for i in range(b - 1)]
    nxt = b
    for _ in range(a):
        edges.append((nxt, path[0]))
        nxt += 1
    for _ in range(c):
        edges.append((path[-1], nxt))
        nxt += 1
    return OrientedTree(tuple(range(nxt)), tuple(edges))
