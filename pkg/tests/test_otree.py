import itertools
from collections import Counter

import networkx as nx
import pytest
from hypothesis import given, strategies as st
from scipy.stats import chisquare

from unavoidable.otree import (
    OrientedTree,
    ancestral_ordering,
    antidirected_path,
    directed_path,
    from_prufer,
    from_prufer_exchange,
    leaf_classes,
    out_star,
    prufer_decode,
    prufer_encode,
    random_oriented_tree,
    reattach,
    strip_leaf_pairs,
    to_prufer,
    to_prufer_exchange,
)
from unavoidable.tournament import FormatError

trees = st.integers(1, 40).flatmap(lambda n: st.builds(random_oriented_tree, st.just(n), st.integers(0, 2**32 - 1)))


def edge_set(edges):
    return frozenset(frozenset(e) for e in edges)


class TestPrufer:
    def test_two_vertices(self):
        assert prufer_decode([], 2) == [(0, 1)]

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_bijection(self, n):
        seen = set()
        for seq in itertools.product(range(n), repeat=n - 2):
            edges = prufer_decode(list(seq), n)
            g = nx.Graph(edges)
            g.add_nodes_from(range(n))
            assert nx.is_tree(g)
            seen.add(edge_set(edges))
            assert prufer_encode(edges, n) == list(seq)
        assert len(seen) == n ** (n - 2)

    def test_count_at_four(self):
        assert len({edge_set(prufer_decode(list(s), 4)) for s in itertools.product(range(4), repeat=2)}) == 16

    def test_encode_every_labelled_tree_at_five(self):
        # independent tree source: networkx's non-isomorphic trees under every labelling
        for base in nx.nonisomorphic_trees(5):
            for perm in itertools.permutations(range(5)):
                edges = [(perm[u], perm[v]) for u, v in base.edges]
                assert edge_set(prufer_decode(prufer_encode(edges, 5), 5)) == edge_set(edges)

    def test_bad_sequences(self):
        with pytest.raises(FormatError):
            prufer_decode([0], 4)
        with pytest.raises(FormatError):
            prufer_decode([7, 0], 4)

    @given(trees)
    def test_exchange_round_trip(self, t):
        if t.n >= 2:
            assert from_prufer_exchange(to_prufer_exchange(t)) == t
        assert OrientedTree.from_json(t.to_json()) == t

    def test_orientation_bits(self):
        t = from_prufer([1], orient="10")
        # decoding order: (0, 1) then (1, 2); bit 0 flips the second edge
        assert set(t.edges) == {(0, 1), (2, 1)}
        with pytest.raises(FormatError):
            from_prufer([1], orient="1")

    def test_to_prufer_needs_standard_labels(self):
        with pytest.raises(ValueError):
            to_prufer(OrientedTree((1, 2, 3), ((1, 2), (2, 3))))


class TestValidation:
    @pytest.mark.parametrize(
        "verts,edges",
        [
            ((0, 1, 2), ((0, 1),)),
            ((0, 1, 2), ((0, 1), (1, 0))),
            ((0, 1, 2, 3), ((0, 1), (1, 0), (2, 3))),
            ((0, 1), ((0, 0),)),
            ((0, 1), ((0, 5),)),
        ],
    )
    def test_rejects_non_trees(self, verts, edges):
        with pytest.raises(ValueError):
            OrientedTree(verts, edges)

    def test_json_errors(self):
        with pytest.raises(FormatError):
            OrientedTree.from_json({"n": 3, "edges": [[0, 1]]})
        with pytest.raises(FormatError):
            OrientedTree.from_json([1, 2])


class TestRandomTrees:
    def test_n2_frequencies(self):
        counts = Counter(random_oriented_tree(2, s).edges for s in range(10_000))
        assert len(counts) == 2
        assert all(abs(c / 10_000 - 0.5) <= 0.02 for c in counts.values())

    def test_n3_uniform(self):
        counts = Counter(frozenset(random_oriented_tree(3, s).edges) for s in range(30_000))
        assert len(counts) == 12
        assert chisquare(list(counts.values())).pvalue > 1e-3

    def test_n4_support(self):
        assert len({frozenset(random_oriented_tree(4, s).edges) for s in range(20_000)}) == 128

    def test_seeded(self):
        assert random_oriented_tree(50, 3) == random_oriented_tree(50, 3)

    @given(trees)
    def test_is_tree(self, t):
        g = nx.Graph(list(t.edges))
        g.add_nodes_from(t.vertices)
        assert nx.is_tree(g)


class TestLeaves:
    def test_directed_path(self):
        assert leaf_classes(directed_path(3)) == ({0}, {2})

    def test_out_star(self):
        assert leaf_classes(out_star(3)) == (set(), {1, 2})

    def test_antidirected(self):
        assert leaf_classes(antidirected_path(3)) == ({0, 2}, set())

    @given(trees)
    def test_partition_of_leaves(self, t):
        ins, outs = leaf_classes(t)
        leaves = {v for v in t.vertices if t.degree(v) == 1} if t.n > 1 else set()
        assert ins | outs == leaves and not ins & outs


class TestAncestralOrdering:
    def test_path_middle(self):
        order, parent = ancestral_ordering(directed_path(3), 1)
        assert order[0] == 1 and set(order) == {0, 1, 2} and parent[0] == parent[2] == 1

    def test_star_center_first(self):
        order, _ = ancestral_ordering(out_star(6), 0)
        assert order[0] == 0 and sorted(order) == list(range(6))

    def test_bad_root(self):
        with pytest.raises(ValueError):
            ancestral_ordering(directed_path(3), 9)

    @given(trees, st.data())
    def test_parent_precedes(self, t, data):
        root = data.draw(st.sampled_from(t.vertices))
        order, parent = ancestral_ordering(t, root)
        pos = {v: i for i, v in enumerate(order)}
        assert sorted(order) == list(t.vertices) and parent[root] is None
        for v in order[1:]:
            assert pos[parent[v]] < pos[v] and v in t.neighbours(parent[v])


class TestStripReattach:
    def fixture(self):
        return OrientedTree((1, 2, 3, 5, 6, 7), ((2, 1), (2, 3), (1, 5), (5, 6), (7, 5)))

    def test_strip_b_star_leaves(self):
        t = self.fixture()
        stripped, record = strip_leaf_pairs(t, {5: [7, 6]})
        assert stripped.vertices == (1, 2, 3, 5)
        assert sorted(record.leaves_of(5)) == [6, 7]
        assert reattach(stripped, record) == t

    def test_empty_removals(self):
        t = self.fixture()
        stripped, record = strip_leaf_pairs(t, {})
        assert stripped == t and record.edges == ()

    def test_rejects_non_leaf(self):
        with pytest.raises(ValueError):
            strip_leaf_pairs(self.fixture(), {2: [1]})
        with pytest.raises(ValueError):
            strip_leaf_pairs(self.fixture(), {5: [6, 6]})

    @given(trees, st.data())
    def test_round_trip(self, t, data):
        removals = {}
        for v in t.vertices:
            if t.n > 2 and t.degree(v) > 1:
                leaves = [y for y in t.neighbours(v) if t.degree(y) == 1]
                removals[v] = data.draw(st.lists(st.sampled_from(leaves), unique=True)) if leaves else []
        if sum(map(len, removals.values())) >= t.n:
            return
        stripped, record = strip_leaf_pairs(t, removals)
        assert stripped.n == t.n - len(record.edges)
        back = reattach(stripped, record)
        assert back == t and set(back.edges) == set(t.edges)
