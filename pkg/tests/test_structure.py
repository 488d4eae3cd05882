import math

import numpy as np
from hypothesis import given, settings, strategies as st

from unavoidable.embed import StructureParams, structure_search
from unavoidable.embed.structure import ALMOST_DIRECTED, DENSE
from unavoidable.planted import planted_pair_host
from unavoidable.tournament import Tournament, circulant, is_mu_almost_directed, random_tournament, transitive


def two_blocks(seed):
    rng = np.random.default_rng(seed)
    a = random_tournament(20, rng).matrix()
    b = random_tournament(20, rng).matrix()
    adj = np.zeros((40, 40), dtype=bool)
    adj[:20, :20], adj[20:, 20:], adj[:20, 20:] = a, b, True
    return Tournament.from_matrix(adj)


class TestExamples:
    def test_transitive(self):
        v = structure_search(transitive(40), StructureParams(eta=0.1, gamma=0.2))
        assert v.kind == ALMOST_DIRECTED and v.reverse_edges == 0

    def test_regular(self):
        v = structure_search(circulant(41))
        assert v.kind == DENSE and v.min_semidegree == 20 and v.moves == []

    def test_two_blocks(self):
        v = structure_search(two_blocks(0))
        assert v.kind == ALMOST_DIRECTED
        assert v.U == list(range(20)) and v.W == list(range(20, 40)) and v.reverse_edges == 0

    def test_planted_pair(self):
        g, U, W = planted_pair_host(120, 0.005, 3)
        v = structure_search(g)
        assert v.kind == ALMOST_DIRECTED and v.mu <= 0.05

    def test_json(self):
        data = structure_search(transitive(12)).to_json()
        assert data["kind"] == ALMOST_DIRECTED and "reverse_edges" in data
        assert "min_semidegree" in structure_search(circulant(11)).to_json()

    def test_empty(self):
        assert structure_search(Tournament.from_bits(0, "")).kind == DENSE


@settings(max_examples=60)
@given(st.integers(3, 60), st.integers(0, 2**32 - 1), st.sampled_from(["random", "planted", "transitive"]))
def test_invariants(n, seed, family):
    if family == "random":
        g = random_tournament(n, seed)
    elif family == "planted":
        g = planted_pair_host(n, 0.02, seed)[0]
    else:
        g = transitive(n)
    p = StructureParams()
    v = structure_search(g, p)
    X, Y, Z = set(v.X), set(v.Y), set(v.Z)
    assert X | Y | Z == set(range(n)) and len(X) + len(Y) + len(Z) == n
    assert all(a > b for a, b in zip(v.y_sizes, v.y_sizes[1:]))
    assert v.y_sizes[-1] == len(Y) and len(v.moves) == len(v.y_sizes) - 1
    if v.moves:
        assert len(Y) >= math.ceil(n / 3)
        back = sum(g.has_edge(a, b) for a in Y | Z for b in X) + sum(g.has_edge(a, b) for a in Z for b in Y)
        assert back <= min(p.eta * (len(X) + len(Z)) * n, 3 * p.gamma * p.eta * n * n) + 1e-9
    if v.kind == ALMOST_DIRECTED:
        assert len(Y) <= (1 - 2 * p.gamma) * n
        assert set(v.U) | set(v.W) == set(range(n)) and not set(v.U) & set(v.W)
        check = is_mu_almost_directed(g, v.U, v.W, 1.0)
        assert check.reverse_edges == v.reverse_edges
    else:
        semi = min(min(sum(g.has_edge(y, w) for w in Y), sum(g.has_edge(w, y) for w in Y)) for y in Y)
        assert semi == v.min_semidegree
