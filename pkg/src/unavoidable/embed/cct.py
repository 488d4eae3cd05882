"""Embedding nice trees into a cycle of cluster tournaments.

The host is split into clusters ``V_1..V_k``, where consecutive clusters are
joined by dense ``V_i -> V_{i+1}`` pairs, plus an exceptional set.
``cct_pipeline`` cuts the tree into two subtrees sharing a vertex ``r``.  The
first subtree is embedded so that it swallows every exceptional or poorly
connected vertex.  The second one is then embedded into what is left: its
stripped core is allocated and embedded, the clusters are equalised by
``balance_clusters`` and the last leaves are placed with perfect matchings.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

from ..alloc import allocate, tune_allocation
from ..otree import OrientedTree, strip_leaf_pairs
from ..regularity import RegularityVerdict, regularity_check
from ..splitting import tree_partition
from ..stars import is_alpha_nice
from ..tournament import Tournament, _rng, mask_of
from .backtrack import backtrack_embed
from .core import Embedding, SearchBudgetExceeded, StageFailure
from .matching import hopcroft_karp, perfect_matching


@dataclass(frozen=True)
class ClusterDecomposition:
    clusters: tuple[tuple[int, ...], ...]
    exceptional: tuple[int, ...] = ()
    d: float = 0.4
    eps: float = 0.1

    @classmethod
    def of(cls, n: int, clusters, d: float = 0.4, eps: float = 0.1) -> "ClusterDecomposition":
        """Clusters of a host on ``n`` vertices; everything else is exceptional."""
        cl = tuple(tuple(sorted(int(v) for v in c)) for c in clusters)
        flat = [v for c in cl for v in c]
        if len(flat) != len(set(flat)):
            raise ValueError("clusters must be pairwise disjoint")
        if any(not 0 <= v < n for v in flat):
            raise ValueError("cluster vertex outside the host")
        return cls(cl, tuple(sorted(set(range(n)) - set(flat))), d, eps)

    @property
    def k(self) -> int:
        return len(self.clusters)

    def cluster_of(self) -> dict[int, int]:
        """Host vertex -> 1-based cluster index."""
        return {v: i + 1 for i, c in enumerate(self.clusters) for v in c}

    def regularity(self, g: Tournament, mode: str = "sampled", samples: int = 500, seed=None) -> list[RegularityVerdict]:
        """Regularity verdicts for every consecutive pair ``V_i -> V_{i+1}``."""
        k = self.k
        return [
            regularity_check(g, self.clusters[i], self.clusters[(i + 1) % k], self.d, self.eps, mode=mode, samples=samples, seed=seed)
            for i in range(k)
        ]


@dataclass(frozen=True)
class CctParams:
    alpha: float = 1 / 250
    d: float = 0.4
    eps: float = 0.1
    psi: float = 0.02
    eta: float = 0.1
    # reserves X_i and Y_i, as fractions of the expected leftover 2|W|/k per cluster
    reservoir_share: float = 0.5
    matching_share: float = 0.2
    allocation_tries: int = 6
    retries: int = 8
    search_budget: int = 200_000


# --- balancing ---------------------------------------------------------------


@dataclass
class BalanceState:
    """Bookkeeping for the balancing step; list index ``i`` is cluster ``i + 1``.

    ``pending[i]`` lists tree vertices embedded in cluster ``i`` whose two
    stripped leaves (``leaves[w] = (in_leaf, out_leaf)``) are still unplaced.
    ``reservoir`` is preferred for new leaves; ``protected`` vertices are never
    used here.
    """

    uncovered: list[set[int]]
    reservoir: list[set[int]]
    pending: list[list[int]]
    leaves: dict[int, tuple[int, int]]
    phi: dict[int, int]
    protected: list[set[int]] = field(default_factory=list)
    trace: list[tuple[int, int]] = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.uncovered)

    def sizes(self) -> list[int]:
        return [len(u) for u in self.uncovered]

    def average(self) -> int:
        total = sum(self.sizes())
        if total % self.k:
            raise ValueError("uncovered total is not divisible by k")
        return total // self.k

    def potential(self) -> int:
        m = self.average()
        return sum(abs(s - m) for s in self.sizes())


def _pick(g: Tournament, p: int, outward: bool, pools, used: set[int]) -> int | None:
    nb = g.out[p] if outward else g.in_sets[p]
    for pool in pools:
        cand = [h for h in pool if nb >> h & 1 and h not in used]
        if cand:
            return min(cand)
    return None


def balance_clusters(g: Tournament, state: BalanceState, max_iterations: int | None = None) -> BalanceState:
    """Equalise the uncovered counts, two leaves per cluster per iteration.

    Each iteration picks an overfull cluster r and an underfull cluster s and
    places one leaf pair per cluster so that r loses 3 uncovered vertices, s
    loses 1 and every other cluster 2.  The potential (sum of deviations from
    the mean) therefore drops by exactly 2.  Returns a new state whose trace
    lists (potential, mean) before every iteration and at the end.
    """
    st = copy.deepcopy(state)
    k = st.k
    if len(st.reservoir) != k or len(st.pending) != k:
        raise ValueError("state lists must all have one entry per cluster")
    if not st.protected:
        st.protected = [set() for _ in range(k)]
    if st.average() % 2:
        raise ValueError("the mean uncovered count must be an even integer")
    limit = max_iterations if max_iterations is not None else sum(st.sizes())
    for _ in range(limit + 1):
        sizes = st.sizes()
        m = st.average()
        ups = sum(abs(s - m) for s in sizes)
        st.trace.append((ups, m))
        if ups == 0:
            return st
        r = max(range(k), key=lambda i: (sizes[i], -i))
        s = min(range(k), key=lambda i: (sizes[i], i))
        arc = {(s + 1 + j) % k for j in range((r - s) % k)}  # s+1, ..., r
        used: set[int] = set()
        picks = []
        for i in range(k):
            nxt, home = (i + 1) % k, (i if i in arc else (i - 1) % k)
            found = None
            for w in st.pending[i]:
                p = st.phi[w]
                xp = _pick(g, p, True, _pools(st, nxt), used)
                if xp is None:
                    continue
                xm = _pick(g, p, False, _pools(st, home), used | {xp})
                if xm is not None:
                    found = (w, xm, xp)
                    break
            if found is None:
                raise StageFailure(
                    "balance",
                    f"cluster {i + 1} has no pending vertex with free reservoir neighbours",
                    {"iteration": len(st.trace) - 1, "pending": len(st.pending[i]), "potential": ups},
                )
            used |= {found[1], found[2]}
            picks.append((i, *found))
        for i, w, xm, xp in picks:
            lm, lp = st.leaves[w]
            st.phi[lm] = xm
            st.phi[lp] = xp
            st.pending[i].remove(w)
            for u in st.uncovered:
                u.discard(xm)
                u.discard(xp)
    raise StageFailure("balance", "iteration limit reached", {"limit": limit})


def _pools(st: BalanceState, j: int):
    free = st.uncovered[j] - st.protected[j]
    res = free & st.reservoir[j]
    return (res, free - res)


# --- helpers -----------------------------------------------------------------


def leaf_pair_centres(t: OrientedTree, forbidden=()) -> dict[int, tuple[int, int]]:
    """Vertices with at least one in-leaf and one out-leaf, mapped to (in_leaf, out_leaf).

    Vertices in ``forbidden`` are neither centres nor chosen leaves.
    """
    forbidden = set(forbidden)
    ins: dict[int, list[int]] = {}
    outs: dict[int, list[int]] = {}
    if t.n < 3:
        return {}
    for v in t.vertices:
        if v in forbidden or t.degree(v) != 1:
            continue
        (c,) = t.neighbours(v)
        if c in forbidden:
            continue
        (outs if t.has_edge(c, v) else ins).setdefault(c, []).append(v)
    return {c: (min(ins[c]), min(outs[c])) for c in sorted(ins.keys() & outs.keys())}


def _count(mask: int, sets, h: int) -> int:
    return (sets[h] & mask).bit_count()


def _bad_vertices(g: Tournament, clusters: list[set[int]], d: float, eps: float) -> list[set[int]]:
    """Cluster vertices with too few out-neighbours ahead or in-neighbours behind."""
    k = len(clusters)
    masks = [mask_of(c) for c in clusters]
    bad = []
    for i, c in enumerate(clusters):
        ahead, behind = masks[(i + 1) % k], masks[(i - 1) % k]
        need_out = (d - eps) * len(clusters[(i + 1) % k])
        need_in = (d - eps) * len(clusters[(i - 1) % k])
        bad.append({h for h in c if _count(ahead, g.out, h) < need_out or _count(behind, g.in_sets, h) < need_in})
    return bad


def _tuned_allocations(t, root, k, objective, marked, params, rng):
    """Random allocations improved by coin flips, best first."""
    marked = set(marked)
    out = []
    for _ in range(max(1, params.allocation_tries)):
        alloc = tune_allocation(t, allocate(t, root, k, seed=rng), objective, marked)
        cnt, mcnt = [0] * k, [0] * k
        for x, c in alloc.cluster_of.items():
            cnt[c - 1] += 1
            if x in marked:
                mcnt[c - 1] += 1
        out.append((objective(cnt, mcnt), alloc))
    out.sort(key=lambda c: c[0])
    return out


def _embed_allocated(t, g, alloc, room, pinned, extra_allowed, available, budget):
    allowed = {x: room[c - 1] for x, c in alloc.cluster_of.items()}
    for x, m in extra_allowed.items():
        allowed[x] = allowed[x] & m
    try:
        return backtrack_embed(t, g, allowed=allowed, pinned=pinned, available=available, budget=budget)
    except SearchBudgetExceeded:
        return None


# --- phase 1: the first subtree covers the exceptional vertices ---------------


def _first_phase(t1, r, g, decomp, params, rng, counts) -> dict[int, int]:
    k = decomp.k
    V = [set(c) for c in decomp.clusters]
    bad = _bad_vertices(g, V, params.d, params.eps)
    absorb = sorted(set(decomp.exceptional).union(*bad))
    core = [V[i] - bad[i] for i in range(k)]
    counts.update(absorb=len(absorb), bad=sum(map(len, bad)))
    pairs = leaf_pair_centres(t1, {r})
    if len(pairs) < len(absorb):
        raise StageFailure("first-stars", "first subtree has too few leaf pairs to absorb the exceptional set", counts)
    centres = sorted(pairs)
    chosen = [centres[j] for j in sorted(rng.choice(len(centres), size=len(absorb), replace=False))] if absorb else []
    t1p, _ = strip_leaf_pairs(t1, {w: pairs[w] for w in chosen})
    t1p = t1p.with_root(r)

    ahead, behind = mask_of(core[1 % k]), mask_of(core[-1])
    v = max(core[0], key=lambda h: (min(_count(ahead, g.out, h), _count(behind, g.in_sets, h)), -h))
    room = [mask_of(c - {v}) for c in core]
    room[0] |= 1 << v
    caps = [len(c) for c in core]

    def spread(use, _):
        mean = sum(use) / k
        return (sum(max(0, use[i] - caps[i]) for i in range(k)), sum(abs(u - mean) for u in use))

    cands = _tuned_allocations(t1p, r, k, spread, (), params, rng)
    phi = None
    for _, alloc in cands[:4]:
        found = _embed_allocated(t1p, g, alloc, room, {r: v}, {}, mask_of(set().union(*core)), params.search_budget)
        if found is not None:
            phi = dict(found.map)
            break
    if phi is None:
        raise StageFailure("first-embed", "no allocation of the first subtree could be embedded", counts)

    where = decomp.cluster_of()
    free = set().union(*core) - set(phi.values())
    todo = list(chosen)
    for q in absorb:
        for w in todo:
            p = phi[w]
            lm, lp = pairs[w]
            into = g.has_edge(q, p)
            home = free & V[where[p] - 1]
            c = _pick(g, p, into, (home, free - home), set())
            if c is None:
                continue
            phi[lm if into else lp] = q
            phi[lp if into else lm] = c
            free.discard(c)
            todo.remove(w)
            break
        else:
            raise StageFailure("first-cover", f"no leaf pair can absorb exceptional vertex {q}", counts)
    return phi


# --- phase 2: the second subtree covers everything else -----------------------


def _second_phase(t2, r, g, decomp, covered, phi, params, rng, counts) -> dict[int, int]:
    k = decomp.k
    v = phi[r]
    where = decomp.cluster_of()
    U = [set(c) - covered for c in decomp.clusters]
    if set(range(g.n)) - covered - set().union(*U):
        raise StageFailure("second-setup", "uncovered vertices outside the clusters", counts)
    pairs = leaf_pair_centres(t2, {r})
    W = sorted(pairs)
    t2p, _ = strip_leaf_pairs(t2, pairs)
    t2p = t2p.with_root(r)
    counts.update(second_pairs=len(W), second_size=t2.n)

    share = 2 * len(W) / k
    X, Y = [], []
    for i in range(k):
        pool = sorted(U[i])
        pick = rng.permutation(len(pool)).tolist()
        xs = int(params.reservoir_share * share)
        ys = int(params.matching_share * share)
        X.append({pool[j] for j in pick[:xs]})
        Y.append({pool[j] for j in pick[xs : xs + ys]})
    room_sets = [U[i] - X[i] - Y[i] for i in range(k)]
    room = [mask_of(s) for s in room_sets]
    room[0] |= 1 << v
    xm = [mask_of(x) for x in X]
    # images of pair centres need reservoir neighbours on every side used later
    good = 0
    for i in range(k):
        for h in room_sets[i]:
            if (
                g.out[h] & xm[(i + 1) % k]
                and g.in_sets[h] & xm[i]
                and g.out[h] & xm[i]
                and g.in_sets[h] & xm[(i - 1) % k]
            ):
                good |= 1 << h

    def imbalance(cnt, wcnt):
        cnt = cnt[:]
        cnt[0] -= 1  # the root is already placed
        low = min(wcnt) if W else 0
        u0 = [len(U[i]) - cnt[i] - 2 * (wcnt[i] - low) for i in range(k)]
        over = sum(max(0, cnt[i] - len(room_sets[i])) for i in range(k)) + sum(max(0, -u) for u in u0)
        ups = sum(abs(u - 2 * low) for u in u0)
        return (over, ups // 2 - low, ups)

    cands = _tuned_allocations(t2p, r, k, imbalance, W, params, rng)
    if cands[0][0][:2] > (0, 0):
        raise StageFailure("allocate", "no allocation leaves balanceable remainders", dict(counts, score=list(cands[0][0])))

    found = None
    for _, alloc in cands[:4]:
        found = _embed_allocated(
            t2p, g, alloc, room, {r: v}, {w: good for w in W}, mask_of(set().union(*room_sets)) | 1 << v, params.search_budget
        )
        if found is not None:
            break
    if found is None:
        raise StageFailure("second-embed", "no allocation of the stripped second subtree could be embedded", counts)
    phi = dict(phi)
    phi.update(found.map)
    images = set(found.map.values())
    for u in U:
        u -= images

    # step 1: equalise pending counts and cover poorly connected vertices
    pend = [sorted((w for w in W if where[phi[w]] == i + 1), key=lambda w: phi[w]) for i in range(k)]
    P = [mask_of(phi[w] for w in pend[i]) for i in range(k)]
    bad = []
    for i in range(k):
        before, after = P[(i - 1) % k], P[(i + 1) % k]
        t_in = max(1, math.ceil(params.eta * before.bit_count()))
        t_out = max(1, math.ceil(params.eta * after.bit_count()))
        bad.append({u for u in U[i] if _count(before, g.in_sets, u) < t_in or _count(after, g.out, u) < t_out})
    low = min(len(p) for p in pend)
    base = max(0, max(len(bad[i]) - (len(pend[i]) - low) for i in range(k)))
    counts.update(step1_base=base, pending_min=low)
    if low - base < 0:
        raise StageFailure("step1", "too few pending centres to cover poorly connected vertices", counts)
    for i in range(k):
        s_i = base + len(pend[i]) - low
        rest = sorted(U[i] - bad[i] - X[i] - Y[i]) + sorted((U[i] & X[i]) - bad[i]) + sorted((U[i] & Y[i]) - bad[i])
        targets = sorted(bad[i]) + [h for h in rest if h not in bad[i]][: max(0, s_i - len(bad[i]))]
        if len(targets) < s_i:
            raise StageFailure("step1", f"cluster {i + 1} has too few uncovered vertices", counts)
        tset = set(targets)
        for b in targets:
            for w in pend[i]:
                p = phi[w]
                lm, lp = pairs[w]
                towards = g.has_edge(p, b)
                free = U[i] - tset - Y[i]
                x = _pick(g, p, not towards, (free & X[i], free - X[i]), set())
                if x is None:
                    continue
                phi[lp if towards else lm] = b
                phi[lm if towards else lp] = x
                U[i] -= {b, x}
                tset.discard(b)
                pend[i].remove(w)
                break
            else:
                raise StageFailure("step1", f"no pending centre in cluster {i + 1} can take vertex {b}", counts)

    # step 2: balance the uncovered counts
    state = BalanceState(U, X, pend, {w: pairs[w] for w in W}, phi, protected=Y)
    state = balance_clusters(g, state)
    counts.update(balance_iterations=len(state.trace) - 1)
    phi, U, pend = state.phi, state.uncovered, state.pending

    # step 3: perfect matchings between centres and the uncovered vertices
    size = len(pend[0])
    if any(len(U[i]) != 2 * size or len(pend[i]) != size for i in range(k)):
        raise StageFailure("step3", "clusters are not balanced after balancing", counts)
    if size == 0:
        return phi
    for _ in range(max(1, params.retries)):
        minus, plus = [], []
        for i in range(k):
            order = sorted(U[i])
            perm = rng.permutation(len(order)).tolist()
            minus.append([order[j] for j in perm[:size]])
            plus.append([order[j] for j in perm[size:]])
        done = {}
        for i in range(k):
            centres = [phi[w] for w in pend[i]]
            m_in = perfect_matching(g, centres, minus[(i - 1) % k], "backward")
            m_out = perfect_matching(g, centres, plus[(i + 1) % k], "forward") if m_in is not None else None
            if m_out is None:
                break
            for w in pend[i]:
                done[pairs[w][0]] = m_in[phi[w]]
                done[pairs[w][1]] = m_out[phi[w]]
        else:
            phi.update(done)
            return phi
    joint = _joint_matching(g, U, pend, phi, pairs)
    if joint is None:
        raise StageFailure("step3", "no joint placement of the remaining leaves", counts)
    phi.update(joint)
    return phi


def _joint_matching(g, U, pend, phi, pairs) -> dict[int, int] | None:
    """Exact fallback: match every uncovered vertex to one leaf slot of a neighbouring centre."""
    k = len(U)
    slots = []
    for i in range(k):
        for w in pend[i]:
            slots.append((i, w, 0))
            slots.append((i, w, 1))
    left = [(j, u) for j in range(k) for u in sorted(U[j])]
    adj = []
    for j, u in left:
        row = []
        for idx, (i, w, side) in enumerate(slots):
            p = phi[w]
            if side == 0 and j == (i - 1) % k and g.has_edge(u, p):
                row.append(idx)
            elif side == 1 and j == (i + 1) % k and g.has_edge(p, u):
                row.append(idx)
        adj.append(row)
    match = hopcroft_karp(adj, len(slots))
    if any(m < 0 for m in match) or len(left) != len(slots):
        return None
    return {pairs[slots[m][1]][slots[m][2]]: u for (_, u), m in zip(left, match)}


# --- the pipeline ------------------------------------------------------------


def cct_pipeline(t: OrientedTree, g: Tournament, decomp: ClusterDecomposition, params: CctParams = CctParams(), seed=None) -> Embedding:
    """Spanning embedding of a nice tree into a host with a cycle of cluster tournaments.

    Raises :class:`StageFailure` naming the stage that could not proceed, and
    ``ValueError`` when the inputs violate the preconditions.
    """
    n = g.n
    if t.n != n:
        raise ValueError(f"tree has {t.n} vertices but the host has {n}")
    if decomp.k < 2:
        raise ValueError("need at least two clusters")
    flat = [v for c in decomp.clusters for v in c]
    if len(flat) != len(set(flat)) or set(flat) & set(decomp.exceptional) or len(flat) + len(decomp.exceptional) != n:
        raise ValueError("clusters and exceptional set must partition the host")
    if len(decomp.exceptional) > params.psi * n:
        raise ValueError(f"exceptional set has {len(decomp.exceptional)} > psi*n vertices")
    nice, cert = is_alpha_nice(t, params.alpha)
    if cert.alpha_max == 0:
        raise ValueError("tree has no pendant stars of one of the two kinds (alpha_max = 0)")
    if not nice:
        raise ValueError(f"tree is not {params.alpha}-nice")

    marked = leaf_pair_centres(t)
    if not marked:
        raise StageFailure("split", "no vertex carries both an in-leaf and an out-leaf", {"n": n})
    part = tree_partition(t, marked)
    r = part.shared
    # the second subtree needs the leaf pairs; give it the richer side
    t1, t2 = sorted((part.t1, part.t2), key=lambda s: (len(leaf_pair_centres(s, {r})), s.n))
    counts = {"n": n, "k": decomp.k, "first_size": t1.n, "marked": len(marked)}

    rng = _rng(seed)
    last: StageFailure | None = None
    for attempt in range(max(1, params.retries)):
        counts["attempt"] = attempt
        try:
            phi = _first_phase(t1, r, g, decomp, params, rng, counts)
            phi = _second_phase(t2, r, g, decomp, set(phi.values()), phi, params, rng, counts)
        except StageFailure as exc:
            last = exc
            continue
        emb = Embedding(phi)
        problems = emb.problems(t, g, spanning=True)
        if problems:
            raise StageFailure("validate", "; ".join(problems[:3]), counts)
        return emb
    raise last
