import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from unavoidable.embed.cct import BalanceState
from unavoidable.otree import OrientedTree
from unavoidable.tournament import Tournament

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def naive_contains(t: OrientedTree, g: Tournament) -> bool:
    """Containment by trying every injection; independent of the backtracking engine."""
    verts = list(t.vertices)
    for image in itertools.permutations(range(g.n), len(verts)):
        phi = dict(zip(verts, image))
        if all(g.has_edge(phi[u], phi[v]) for u, v in t.edges):
            return True
    return False


def balance_fixture(rng: np.random.Generator, k: int, sizes: list[int], spare: int = 1):
    """A host and balancing state where every pending vertex reaches every needed cluster.

    Cluster ``i`` has ``sizes[i]`` uncovered host vertices and enough pending
    vertices for the whole run.  A pending vertex of cluster ``i`` beats all
    of cluster ``i+1`` and loses to clusters ``i`` and ``i-1``; other pairs
    are random.  For ``k = 2`` it beats alternate vertices of the other cluster.
    """
    mean = sum(sizes) // k
    potential = sum(abs(s - mean) for s in sizes)
    n_pending = potential // 2 + spare
    uncovered, pending_host = [], []
    nxt = 0
    for s in sizes:
        uncovered.append(list(range(nxt, nxt + s)))
        nxt += s
    for _ in range(k):
        pending_host.append(list(range(nxt, nxt + n_pending)))
        nxt += n_pending
    n = nxt
    upper = np.triu(rng.integers(0, 2, size=(n, n)).astype(bool), 1)
    adj = upper | np.tril(~upper.T, -1)
    for i in range(k):
        nxt = uncovered[(i + 1) % k]
        # with two clusters the next cluster is also the previous one: split it
        beats = nxt[::2] if k == 2 else nxt
        loses = uncovered[i] + (nxt[1::2] if k == 2 else uncovered[(i - 1) % k])
        for p in pending_host[i]:
            for u in beats:
                adj[p, u], adj[u, p] = True, False
            for u in loses:
                adj[u, p], adj[p, u] = True, False
    g = Tournament.from_matrix(adj)
    phi, leaves, pending = {}, {}, []
    tree_id = 0
    for i in range(k):
        row = []
        for p in pending_host[i]:
            w = tree_id
            phi[w] = p
            leaves[w] = (tree_id + 1, tree_id + 2)
            tree_id += 3
            row.append(w)
        pending.append(row)
    state = BalanceState(
        uncovered=[set(u) for u in uncovered],
        reservoir=[set(u[: len(u) // 2]) for u in uncovered],
        pending=pending,
        leaves=leaves,
        phi=phi,
    )
    return g, state


def bipartite_host(rng, nx, ny, p):
    """Tournament on nx + ny vertices; X = first nx, cross edges X -> Y with probability p."""
    n = nx + ny
    upper = np.triu(rng.random((n, n)) < 0.5, 1)
    adj = upper | np.tril(~upper.T, -1)
    cross = rng.random((nx, ny)) < p
    adj[:nx, nx:] = cross
    adj[nx:, :nx] = ~cross.T
    return Tournament.from_matrix(adj), list(range(nx)), list(range(nx, n))


def super_regular_pair(rng, size, d=0.5, eps=0.1):
    """Random balanced pair of density about ``d`` with every cross degree lifted to ``(d - eps/2) * size``."""
    g, X, Y = bipartite_host(rng, size, size, d)
    adj = g.matrix()
    cross = adj[:size, size:].copy()
    floor = int(np.ceil((d - eps / 2) * size))
    for _ in range(2):
        for i in range(size):
            missing = np.flatnonzero(~cross[i])
            lift = floor - int(cross[i].sum())
            if lift > 0:
                cross[i, rng.choice(missing, size=lift, replace=False)] = True
        cross = cross.T
    adj[:size, size:] = cross
    adj[size:, :size] = ~cross.T
    return Tournament.from_matrix(adj), X, Y


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def flow_matching_size(adj, n_right):
    """Maximum matching size via max-flow in networkx."""
    g = nx.DiGraph()
    for i, row in enumerate(adj):
        g.add_edge("s", ("x", i), capacity=1)
        for j in row:
            g.add_edge(("x", i), ("y", j), capacity=1)
    for j in range(n_right):
        g.add_edge(("y", j), "t", capacity=1)
    if "s" not in g or "t" not in g:
        return 0
    return nx.maximum_flow_value(g, "s", "t")


def feasible_balance_sizes(rng: np.random.Generator, k: int) -> list[int]:
    """Random cluster sizes with an even mean that stays reachable by balancing."""
    sizes = rng.integers(0, 9, size=k)
    sizes[-1] += (-sizes.sum()) % k
    mean = int(sizes.sum()) // k
    ups = int(np.abs(sizes - mean).sum())
    # shift every cluster so the mean is even and stays non-negative to the end
    shift = ups + (mean + ups) % 2
    return [int(s) + shift for s in sizes]


def random_pendant_family(t, rng, tries):
    """Disjoint pendant subtrees cut off by random edges; returns (in-subtrees, out-subtrees)."""
    ins, outs, used = [], [], set()
    for _ in range(tries):
        u, v = t.edges[int(rng.integers(len(t.edges)))]
        if rng.random() < 0.5:
            side, bucket = t.component_without(v, u), ins  # tail inside: edge leaves the subtree
        else:
            side, bucket = t.component_without(u, v), outs
        if side & used or len(used) + len(side) >= t.n:
            continue
        # later subtrees must stay pendant in T, which any edge side is
        bucket.append(side)
        used |= side
    return ins, outs
