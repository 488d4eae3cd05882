"""Exact backtracking search for a copy of an oriented tree in a tournament."""

from __future__ import annotations

from typing import Iterable, Mapping

from ..otree import OrientedTree, ancestral_ordering
from ..tournament import Tournament, bits_of, mask_of
from .core import Embedding, SearchBudgetExceeded


def _as_mask(allowed_set) -> int:
    return allowed_set if isinstance(allowed_set, int) else mask_of(allowed_set)


def backtrack_embed(
    t: OrientedTree,
    g: Tournament,
    allowed: Mapping[int, Iterable[int] | int] | None = None,
    pinned: Mapping[int, int] | None = None,
    available: Iterable[int] | int | None = None,
    root: int | None = None,
    budget: int | None = None,
) -> Embedding | None:
    """Find an embedding of ``t`` into ``g``, or return None if there is none.

    ``allowed`` restricts tree vertices to host subsets, ``pinned`` fixes
    images, and ``available`` limits the host vertices that may be used at
    all.  Tree vertices are placed in BFS order; candidates are filtered by
    the parent's image and by free in-/out-degree, and tried in decreasing
    order of the free degree they need.  With ``budget`` the search gives up
    after that many placements by raising :class:`SearchBudgetExceeded`.
    """
    allowed = dict(allowed or {})
    pinned = dict(pinned or {})
    verts = set(t.vertices)
    for x in list(allowed) + list(pinned):
        if x not in verts:
            raise ValueError(f"constraint names unknown tree vertex {x}")
    for x, h in pinned.items():
        if not 0 <= h < g.n:
            raise ValueError(f"vertex {x} pinned to unknown host vertex {h}")
    full = (1 << g.n) - 1
    avail = full if available is None else _as_mask(available) & full
    if len(pinned.values()) != len(set(pinned.values())):
        return None
    if t.n > avail.bit_count():
        return None

    masks = {x: avail for x in t.vertices}
    for x, allowed_set in allowed.items():
        masks[x] &= _as_mask(allowed_set)
    for x, h in pinned.items():
        masks[x] &= 1 << h

    if root is None:
        if pinned:
            root = min(pinned)
        elif t.root is not None:
            root = t.root
        else:
            root = max(t.vertices, key=lambda v: (t.degree(v), -v))
    order, parent = ancestral_ordering(t, root)
    m = len(order)
    index = {x: i for i, x in enumerate(order)}
    par = [index[parent[x]] if parent[x] is not None else -1 for x in order]
    down = [par[i] >= 0 and t.has_edge(order[par[i]], order[i]) for i in range(m)]
    need_out = [0] * m
    need_in = [0] * m
    for i in range(1, m):
        if down[i]:
            need_out[par[i]] += 1
        else:
            need_in[par[i]] += 1
    vmask = [masks[x] for x in order]
    out, inn = g.out, g.in_sets

    img = [-1] * m
    cands: list[list[int]] = [[] for _ in range(m)]
    pos = [0] * m
    used = 0
    placements = 0

    def candidates(i: int) -> list[int]:
        base = vmask[i] & ~used
        if par[i] >= 0:
            base &= out[img[par[i]]] if down[i] else inn[img[par[i]]]
        no, ni = need_out[i], need_in[i]
        if not no and not ni:
            return list(bits_of(base))
        scored = []
        for h in bits_of(base):
            free = ~used & ~(1 << h) & avail
            fo = (out[h] & free).bit_count()
            fi = (inn[h] & free).bit_count()
            if fo < no or fi < ni:
                continue
            key = min(fo - no if no else 1 << 30, fi - ni if ni else 1 << 30)
            scored.append((-key, h))
        scored.sort()
        return [h for _, h in scored]

    i = 0
    cands[0] = candidates(0)
    while True:
        if img[i] >= 0:
            used &= ~(1 << img[i])
            img[i] = -1
        if pos[i] < len(cands[i]):
            h = cands[i][pos[i]]
            pos[i] += 1
            img[i] = h
            used |= 1 << h
            placements += 1
            if budget is not None and placements > budget:
                raise SearchBudgetExceeded(f"gave up after {budget} placements")
            if i == m - 1:
                return Embedding({order[j]: img[j] for j in range(m)})
            i += 1
            cands[i] = candidates(i)
            pos[i] = 0
        else:
            if i == 0:
                return None
            i -= 1


def contains(g: Tournament, t: OrientedTree) -> bool:
    return backtrack_embed(t, g) is not None
