import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_pendant_family
from unavoidable.otree import OrientedTree, directed_path, out_star, random_oriented_tree
from unavoidable.splitting import check_tree_partition, is_directed_split, nice_split, tree_partition


def brute_partition_check(t, part, L):
    """Direct restatement of the partition conditions."""
    v1, v2 = set(part.t1.vertices), set(part.t2.vertices)
    ok = v1 | v2 == set(t.vertices) and v1 & v2 == {part.shared}
    ok &= sorted(part.t1.edges + part.t2.edges) == sorted(t.edges)
    return ok and min(len(v1 & L), len(v2 & L)) * 3 >= len(L)


class TestTreePartition:
    def test_path(self):
        t = directed_path(5)
        part = tree_partition(t, range(5))
        assert check_tree_partition(t, part, range(5)) == []
        assert min(len(set(part.t1.vertices)), len(set(part.t2.vertices))) >= 2

    def test_star_leaves(self):
        t = out_star(5)
        part = tree_partition(t, [1, 2, 3, 4])
        assert part.shared == 0
        assert sorted([part.t1.n, part.t2.n]) == [3, 3]

    def test_single_marked(self):
        t = directed_path(4)
        part = tree_partition(t, [2])
        assert part.t1 == t and part.t2.vertices == (2,) and part.shared == 2

    def test_errors(self):
        with pytest.raises(ValueError):
            tree_partition(directed_path(3), [])
        with pytest.raises(ValueError):
            tree_partition(directed_path(3), [7])

    @settings(max_examples=300)
    @given(st.integers(1, 60), st.integers(0, 2**32 - 1), st.floats(0.01, 1.0))
    def test_invariants(self, n, seed, frac):
        rng = np.random.default_rng(seed)
        t = random_oriented_tree(n, rng)
        size = max(1, int(frac * n))
        L = set(rng.choice(n, size=size, replace=False).tolist())
        part = tree_partition(t, L)
        assert check_tree_partition(t, part, L) == []
        assert brute_partition_check(t, part, L)

    def test_checker_detects_bad_partition(self):
        t = directed_path(5)
        part = tree_partition(t, range(5))
        swapped = type(part)(part.t1, part.t1, part.shared)
        assert check_tree_partition(t, swapped, range(5))


class TestNiceSplit:
    def test_directed_path(self):
        A, B = nice_split(directed_path(4), [], [], 2, 2)
        assert (A, B) == ({0, 1}, {2, 3})

    def test_two_sources(self):
        t = OrientedTree(tuple(range(4)), ((0, 1), (2, 1), (2, 3)))
        A, B = nice_split(t, [], [], 2, 2)
        assert (A, B) == ({0, 2}, {1, 3})
        assert is_directed_split(t, A, B)

    def test_empty_a(self):
        t = directed_path(4)
        assert nice_split(t, [], [], 0, 4) == (set(), {0, 1, 2, 3})

    def test_subtrees_are_respected(self):
        # 1 -> 0 -> 2 -> 3: {3} hangs below 2 (out-subtree), {1} above 0 (in-subtree)
        t = OrientedTree(tuple(range(4)), ((1, 0), (0, 2), (2, 3)))
        A, B = nice_split(t, [{1}], [{3}], 1, 3)
        assert A == {1} and 3 in B

    def test_precondition_errors(self):
        t = directed_path(4)
        with pytest.raises(ValueError):
            nice_split(t, [{3}], [], 2, 2)  # edge 2 -> 3 enters {3}
        with pytest.raises(ValueError):
            nice_split(t, [], [], 3, 2)
        with pytest.raises(ValueError):
            nice_split(t, [{0}], [{0}], 2, 2)
        with pytest.raises(ValueError):
            nice_split(t, [{1}], [], 2, 2)  # not pendant

    @settings(max_examples=300)
    @given(st.integers(2, 80), st.integers(0, 2**32 - 1))
    def test_postconditions(self, n, seed):
        rng = np.random.default_rng(seed)
        t = random_oriented_tree(n, rng)
        ins, outs = random_pendant_family(t, rng, int(rng.integers(0, 6)))
        size_in, size_out = sum(map(len, ins)), sum(map(len, outs))
        a = int(rng.integers(size_in, n - size_out + 1))
        A, B = nice_split(t, ins, outs, a, n - a)
        assert len(A) == a and len(B) == n - a
        assert all(s <= A for s in ins) and all(s <= B for s in outs)
        # scan every edge: none may run from B back to A
        assert not [e for e in t.edges if e[0] in B and e[1] in A]
        assert is_directed_split(t, A, B)
