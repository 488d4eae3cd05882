"""Planted instances for the embedding pipelines."""

from __future__ import annotations

import numpy as np

from .otree import OrientedTree, prufer_decode, random_oriented_tree
from .stars import is_alpha_nice
from .tournament import Tournament, _rng


def planted_nice_tree(n: int, a_cherries: int, b_cherries: int, seed=None) -> OrientedTree:
    """Random oriented tree with extra pendant cherries of both kinds hung on it.

    A uniform random oriented tree on ``n - 3*(a + b)`` vertices gets
    ``a_cherries`` cherries whose attach edge points out of the cherry and
    which contain an out-leaf, and ``b_cherries`` whose attach edge points in
    and which contain one leaf of each type.  Labels are then shuffled.
    """
    rng = _rng(seed)
    base = n - 3 * (a_cherries + b_cherries)
    if base < 2:
        raise ValueError("not enough vertices for the requested cherries")
    seq = rng.integers(0, base, size=base - 2).tolist()
    edges = [(x, y) if c else (y, x) for (x, y), c in zip(prufer_decode(seq, base), rng.integers(0, 2, size=base - 1).tolist())]
    nxt = base
    for kind in ["A"] * a_cherries + ["B"] * b_cherries:
        host = int(rng.integers(0, base))
        c, l1, l2 = nxt, nxt + 1, nxt + 2
        nxt += 3
        if kind == "A":
            edges.append((c, host))
            edges.append((c, l1))
            edges.append((c, l2) if rng.integers(0, 2) else (l2, c))
        else:
            edges.append((host, c))
            edges.append((l1, c))
            edges.append((c, l2))
    perm = rng.permutation(n).tolist()
    return OrientedTree(tuple(range(n)), tuple((perm[u], perm[v]) for u, v in edges))


def random_nice_tree(n: int, alpha=1 / 250, seed=None, max_tries: int = 1000) -> OrientedTree:
    """Uniform random oriented tree conditioned on being ``alpha``-nice (rejection sampling)."""
    rng = _rng(seed)
    for _ in range(max_tries):
        t = random_oriented_tree(n, rng)
        if is_alpha_nice(t, alpha)[0]:
            return t
    raise ValueError(f"no {alpha}-nice tree on {n} vertices in {max_tries} draws")


def planted_pair_host(
    n: int,
    mu: float,
    seed=None,
    u_fraction: float = 0.5,
    atypical: int = 2,
    atypical_degree: int | None = None,
) -> tuple[Tournament, list[int], list[int]]:
    """Host with all cross edges U -> W except about ``mu |U||W|`` reversed ones.

    Inside U and W the tournament is uniformly random.  ``atypical`` vertices
    (alternating between W and U) carry ``atypical_degree`` reversed edges
    each, which is enough to make them atypical; the remaining reversals are
    spread uniformly.
    """
    rng = _rng(seed)
    nu_ = int(round(u_fraction * n))
    labels = rng.permutation(n)
    U = sorted(int(x) for x in labels[:nu_])
    W = sorted(int(x) for x in labels[nu_:])
    adj = np.zeros((n, n), dtype=bool)
    upper = np.triu(rng.integers(0, 2, size=(n, n)).astype(bool), 1)
    adj |= upper | np.tril(~upper.T, -1)
    Ua, Wa = np.array(U), np.array(W)
    adj[np.ix_(Ua, Wa)] = True
    adj[np.ix_(Wa, Ua)] = False
    budget = int(mu * len(U) * len(W))
    if atypical_degree is None:
        atypical_degree = int(np.ceil(np.sqrt(mu) * max(len(U), len(W)))) + 1
    flips: set[tuple[int, int]] = set()
    for j in range(atypical):
        if len(flips) + atypical_degree > budget:
            break
        if j % 2 == 0:
            w = int(Wa[j // 2])
            for u in rng.choice(Ua, size=atypical_degree, replace=False):
                flips.add((int(u), w))
        else:
            u = int(Ua[j // 2])
            for w in rng.choice(Wa, size=atypical_degree, replace=False):
                flips.add((u, int(w)))
    while len(flips) < budget:
        flips.add((int(rng.choice(Ua)), int(rng.choice(Wa))))
    for u, w in flips:
        adj[u, w] = False
        adj[w, u] = True
    return Tournament.from_matrix(adj), U, W


def planted_cyclic_host(
    k: int,
    m: int,
    p: float = 0.9,
    seed=None,
    exceptional: int = 0,
) -> tuple[Tournament, list[list[int]], list[int]]:
    """Clusters ``V_1..V_k`` of size ``m`` with ``V_i -> V_{i+1}`` edges present with probability ``p``.

    Edges inside clusters and between non-consecutive clusters are uniformly
    random.  ``exceptional`` extra vertices with uniformly random edges form
    the exceptional set.
    """
    rng = _rng(seed)
    n = k * m + exceptional
    labels = rng.permutation(n)
    clusters = [sorted(int(x) for x in labels[i * m : (i + 1) * m]) for i in range(k)]
    exc = sorted(int(x) for x in labels[k * m :])
    upper = np.triu(rng.integers(0, 2, size=(n, n)).astype(bool), 1)
    adj = upper | np.tril(~upper.T, -1)
    if k >= 2:
        for i in range(k):
            A, B = np.array(clusters[i]), np.array(clusters[(i + 1) % k])
            if k == 2 and i == 1:
                break
            fwd = rng.random((m, m)) < p
            adj[np.ix_(A, B)] = fwd
            adj[np.ix_(B, A)] = ~fwd.T
    return Tournament.from_matrix(adj), clusters, exc
