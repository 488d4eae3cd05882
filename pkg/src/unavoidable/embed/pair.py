"""Embedding trees into almost-directed pairs.

``greedy_pair_embed`` places a directed split (A, B) of a tree into a pair
(U, W) component by component.  ``directed_pair_pipeline`` turns that into a
spanning embedding: it reserves pendant stars, strips one leaf from each,
embeds the rest greedily, covers the atypical vertices with the reserved
leaves and finishes with two perfect matchings.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from ..otree import OrientedTree, strip_leaf_pairs
from ..splitting import is_directed_split, nice_split
from ..stars import PendantStar, is_alpha_nice
from ..tournament import Tournament, _rng, is_mu_almost_directed, mask_of
from .backtrack import backtrack_embed
from .core import Embedding, SearchBudgetExceeded, StageFailure
from .matching import perfect_matching


@dataclass(frozen=True)
class PairDecomposition:
    U: tuple[int, ...]
    W: tuple[int, ...]
    mu: float

    def holds(self, g: Tournament) -> bool:
        return is_mu_almost_directed(g, self.U, self.W, self.mu).holds


@dataclass(frozen=True)
class PairParams:
    mu: float = 0.01
    psi: float = 0.02
    beta: float = 0.05
    alpha: float = 1 / 250
    nu: float = 0.2
    retries: int = 32
    search_budget: int = 200_000


def _components(t: OrientedTree, A: set[int]) -> tuple[list[set[int]], dict[int, int]]:
    """Components of T[A] u T[B] and the component index of every vertex."""
    comp_of: dict[int, int] = {}
    comps: list[set[int]] = []
    for s in t.vertices:
        if s in comp_of:
            continue
        side = s in A
        comp = {s}
        comp_of[s] = len(comps)
        stack = [s]
        while stack:
            x = stack.pop()
            for y in t.neighbours(x):
                if y not in comp_of and (y in A) == side:
                    comp_of[y] = len(comps)
                    comp.add(y)
                    stack.append(y)
        comps.append(comp)
    return comps, comp_of


def greedy_pair_embed(
    t: OrientedTree,
    split: tuple[set[int], set[int]],
    g: Tournament,
    pair: tuple,
    margin: int = 0,
    mu: float | None = None,
    used: set[int] | None = None,
    search_budget: int | None = 200_000,
    pinned: dict[int, int] | None = None,
    allowed: dict[int, set[int]] | None = None,
) -> Embedding:
    """Embed ``t`` with A inside U and B inside W.

    Components of T[A] u T[B] are embedded one at a time, in BFS order of the
    tree obtained by contracting them; each component's attachment vertex
    must land next to the image of its already-embedded neighbour.  With
    ``mu`` the per-vertex reverse-degree hypotheses are checked first.
    """
    A, B = set(split[0]), set(split[1])
    U, W = list(pair[0]), list(pair[1])
    if not is_directed_split(t, A, B):
        raise ValueError("(A, B) is not a directed split of the tree")
    used = set(used or ())
    free_u = [u for u in U if u not in used]
    free_w = [w for w in W if w not in used]
    if len(free_u) < len(A) + margin or len(free_w) < len(B) + margin:
        raise ValueError(
            f"insufficient room: |U|={len(free_u)} for |A|={len(A)}, |W|={len(free_w)} for |B|={len(B)}, margin {margin}"
        )
    if mu is not None:
        um, wm = mask_of(U), mask_of(W)
        bound = mu * g.n
        bad_u = [u for u in U if (g.in_sets[u] & wm).bit_count() > bound]
        bad_w = [w for w in W if (g.out[w] & um).bit_count() > bound]
        if bad_u or bad_w:
            raise StageFailure("hypothesis", "reverse degree above mu*n", {"bad_u": len(bad_u), "bad_w": len(bad_w)})

    comps, comp_of = _components(t, A)
    # BFS over the contracted tree, remembering the edge into each component
    root = t.root if t.root is not None else t.vertices[0]
    if pinned:
        root = min(pinned)
    order = [comp_of[root]]
    entry: dict[int, tuple[int, int]] = {}
    seen = {comp_of[root]}
    queue = deque(order)
    while queue:
        c = queue.popleft()
        for x in sorted(comps[c]):
            for y in sorted(t.neighbours(x)):
                d = comp_of[y]
                if d not in seen:
                    seen.add(d)
                    entry[d] = (x, y)
                    order.append(d)
                    queue.append(d)

    side_mask = {True: mask_of(free_u), False: mask_of(free_w)}
    phi: dict[int, int] = dict(pinned or {})
    taken = mask_of(used) | mask_of(phi.values())
    for c in order:
        comp = comps[c]
        in_a = next(iter(comp)) in A
        sub = t.induced(comp)
        avail = side_mask[in_a] & ~taken
        cons = {x: mask_of(allowed[x]) for x in comp if allowed and x in allowed}
        pins = {x: phi[x] for x in comp if x in phi}
        start = None
        if c in entry:
            x, y = entry[c]
            hx = phi[x]
            nb = g.out[hx] if t.has_edge(x, y) else g.in_sets[hx]
            cons[y] = cons.get(y, nb) & nb
            start = y
        try:
            found = backtrack_embed(sub, g, allowed=cons, pinned=pins, available=avail | mask_of(pins.values()), root=start, budget=search_budget)
        except SearchBudgetExceeded:
            found = None
        if found is None:
            raise StageFailure(
                "greedy-embed",
                f"component {c} ({'A' if in_a else 'B'}, {len(comp)} vertices) could not be embedded",
                {"component": c, "size": len(comp), "free": avail.bit_count(), "done": len(phi)},
            )
        phi.update(found.map)
        taken |= mask_of(found.map.values())
    return Embedding(phi)


# --- the full pipeline -------------------------------------------------------


def _pick_leaf(t: OrientedTree, star: PendantStar, outward: bool, skip=()) -> int:
    for x in star.leaves:
        if x not in skip and t.has_edge(star.center, x) == outward:
            return x
    raise StageFailure("stars", f"star at {star.center} lacks the needed leaf")


def _cover_atypical(g, Z, phi, Y, centres, in_leaves, out_leaves) -> bool:
    """Send one leaf of each extra star onto an atypical vertex, the other into Y."""
    spare = sorted(Y)
    for q, c, lm, lp in zip(Z, centres, in_leaves, out_leaves):
        w = phi[c]
        if g.has_edge(q, w):
            phi[lm] = q
            y = next((y for y in spare if g.has_edge(w, y)), None)
            target = lp
        else:
            phi[lp] = q
            y = next((y for y in spare if g.has_edge(y, w)), None)
            target = lm
        if y is None:
            return False
        spare.remove(y)
        phi[target] = y
    return True


def directed_pair_pipeline(
    t: OrientedTree,
    g: Tournament,
    pair: tuple,
    params: PairParams = PairParams(),
    seed=None,
) -> Embedding:
    """Spanning embedding of a nice tree into a host split as an almost-directed pair.

    Raises :class:`StageFailure` naming the stage that could not proceed, and
    ``ValueError`` when the inputs violate the preconditions.
    """
    U, W = sorted(pair[0]), sorted(pair[1])
    n = g.n
    if t.n != n:
        raise ValueError(f"tree has {t.n} vertices but the host has {n}")
    if set(U) & set(W) or len(U) + len(W) != n or set(U) | set(W) != set(range(n)):
        raise ValueError("(U, W) must partition the host")
    if min(len(U), len(W)) < params.nu * n:
        raise ValueError("a side of the pair is smaller than nu*n")
    if not is_mu_almost_directed(g, U, W, params.mu).holds:
        raise ValueError(f"(U, W) is not {params.mu}-almost-directed")
    nice, cert = is_alpha_nice(t, params.alpha)
    if not nice:
        raise ValueError(f"tree is not {params.alpha}-nice")

    rng = _rng(seed)
    um, wm = mask_of(U), mask_of(W)
    root_mu = math.sqrt(params.mu)
    Z_U = [u for u in U if (g.in_sets[u] & wm).bit_count() >= root_mu * len(W)]
    Z_W = [w for w in W if (g.out[w] & um).bit_count() >= root_mu * len(U)]
    Z = Z_U + Z_W
    z = len(Z)
    W0 = [w for w in W if w not in set(Z_W)]
    W0m = mask_of(W0)
    psi_n = params.psi * n
    X = [w for w in W0 if min((g.out[w] & W0m).bit_count(), (g.in_sets[w] & W0m).bit_count()) < psi_n]

    t_count = math.ceil(params.beta * n)
    s_minus = sorted(cert.a_stars, key=lambda s: (s.size, s.center))
    s_plus = sorted(cert.b_stars, key=lambda s: (s.size, s.center))
    counts = {"n": n, "t": t_count, "z": z, "z_in_U": len(Z_U), "x": len(X), "a_stars": len(s_minus), "b_stars": len(s_plus)}
    if len(s_minus) < t_count or len(s_plus) < t_count + z:
        raise StageFailure("stars", "not enough pendant stars of each kind", counts)
    s_minus, s_plus = s_minus[:t_count], s_plus[: t_count + z]

    strip: dict[int, list[int]] = {}
    out_leaf_minus = []  # out-leaf removed from each reserved in-star
    for s in s_minus:
        leaf = _pick_leaf(t, s, outward=True)
        out_leaf_minus.append(leaf)
        strip[s.center] = [leaf]
    in_leaf_plus, out_leaf_plus = [], []
    for i, s in enumerate(s_plus):
        lm = _pick_leaf(t, s, outward=False)
        in_leaf_plus.append(lm)
        strip[s.center] = [lm]
        if i >= t_count:
            lp = _pick_leaf(t, s, outward=True)
            out_leaf_plus.append(lp)
            strip[s.center].append(lp)
    t_prime, _ = strip_leaf_pairs(t, strip)

    in_subtrees = [set(s.vertices) - {out_leaf_minus[i]} for i, s in enumerate(s_minus)]
    out_subtrees = [set(s.vertices) - set(strip[s.center]) for s in s_plus]
    # sizes account for which side each atypical vertex lies on
    a = len(U) - t_count - len(Z_U)
    b = len(W) - t_count - z - len(Z_W)
    counts.update(a=a, b=b)
    try:
        A, B = nice_split(t_prime, in_subtrees, out_subtrees, a, b)
    except ValueError as exc:
        raise StageFailure("split", str(exc), counts) from None

    # at desk scale psi*n alone is too small to hold semidegree 2z; 8z suffices
    y_size = max(math.ceil(psi_n), 8 * z)
    U_prime = [u for u in U if u not in set(Z_U)]
    last: StageFailure | None = None
    for attempt in range(max(1, params.retries)):
        pool = [w for w in W0 if w not in set(X)]
        if len(pool) < y_size:
            raise StageFailure("reserve", "W0 minus X is smaller than the reserve Y", counts)
        Y = [int(v) for v in rng.choice(pool, size=y_size, replace=False)] if y_size else []
        Ym = mask_of(Y)
        W_prime = [w for w in pool if not Ym >> w & 1]
        # the centres that will absorb Z need 2z in- and out-neighbours in Y
        good = {w for w in W_prime if min((g.out[w] & Ym).bit_count(), (g.in_sets[w] & Ym).bit_count()) >= 2 * z}
        if len(good) < z:
            last = StageFailure("reserve", "too few W' vertices with semidegree 2|Z| into Y", dict(counts, attempt=attempt))
            continue
        allowed = {s_plus[t_count + j].center: good for j in range(z)}
        try:
            phi = greedy_pair_embed(
                t_prime, (A, B), g, (U_prime, W_prime), mu=None, search_budget=params.search_budget, allowed=allowed
            ).map
        except (StageFailure, ValueError) as exc:
            last = exc if isinstance(exc, StageFailure) else StageFailure("greedy-embed", str(exc), counts)
            continue

        if not _cover_atypical(g, Z, phi, Y, [s.center for s in s_plus[t_count:]], in_leaf_plus[t_count:], out_leaf_plus):
            last = StageFailure("cover-z", "no spare vertex of Y next to a covering centre", dict(counts, attempt=attempt))
            continue

        covered = set(phi.values())
        Q_minus = [u for u in U if u not in covered]
        Q_plus = [w for w in W if w not in covered]
        P_minus = [phi[s.center] for s in s_minus]
        P_plus = [phi[s.center] for s in s_plus[:t_count]]
        if len(Q_minus) != t_count or len(Q_plus) != t_count:
            raise StageFailure("count", "uncovered sides do not match the reserved stars", dict(counts, q_minus=len(Q_minus), q_plus=len(Q_plus)))
        m_out = perfect_matching(g, P_minus, Q_plus, "forward")
        m_in = perfect_matching(g, P_plus, Q_minus, "backward")
        if m_out is None or m_in is None:
            last = StageFailure("matching", "no perfect matching for the reserved leaves", dict(counts, attempt=attempt))
            continue
        for i, s in enumerate(s_minus):
            phi[out_leaf_minus[i]] = m_out[phi[s.center]]
        for i, s in enumerate(s_plus[:t_count]):
            phi[in_leaf_plus[i]] = m_in[phi[s.center]]
        emb = Embedding(phi)
        problems = emb.problems(t, g, spanning=True)
        if problems:
            raise StageFailure("validate", "; ".join(problems[:3]), counts)
        return emb
    raise last
