import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import naive_contains
from unavoidable.embed import backtrack_embed
from unavoidable.oracle import (
    AVOIDABLE,
    NO_COUNTEREXAMPLE,
    UNAVOIDABLE,
    avoiding_hosts,
    canonical_tree_id,
    census_csv,
    double_star_fixture,
    find_avoiding_host,
    g_bruteforce,
    is_unavoidable,
    iter_witness_checks,
    oriented_tree_census,
    oriented_tree_classes,
    regular_tournament,
    tree_from_id,
)
from unavoidable.otree import antidirected_path, directed_path, from_prufer, out_star, random_oriented_tree
from unavoidable.tournament import Tournament, circulant, random_tournament

THREE_CYCLE = circulant(3, [1])


def digraph(edges, n):
    d = nx.DiGraph(list(edges))
    d.add_nodes_from(range(n))
    return d


def nx_oriented_tree_classes(n):
    """Isomorphism classes of labelled oriented trees on n vertices, via networkx."""
    buckets = {}
    for seq in itertools.product(range(n), repeat=max(n - 2, 0)):
        for flips in range(1 << (n - 1)):
            bits = "".join("1" if flips >> i & 1 else "0" for i in range(n - 1))
            d = digraph(from_prufer(list(seq), n, bits).edges, n)
            key = nx.weisfeiler_lehman_graph_hash(d)
            reps = buckets.setdefault(key, [])
            if not any(nx.is_isomorphic(d, r) for r in reps):
                reps.append(d)
    return sum(len(r) for r in buckets.values())


class TestTreeClasses:
    def test_oeis_counts(self):
        # OEIS A000238
        assert [len(oriented_tree_classes(n)) for n in range(1, 7)] == [1, 1, 3, 8, 27, 91]

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_matches_networkx(self, n):
        assert len(oriented_tree_classes(n)) == nx_oriented_tree_classes(n)

    @given(st.integers(1, 15), st.integers(0, 2**32 - 1))
    def test_id_is_invariant(self, n, seed):
        t = random_oriented_tree(n, seed)
        perm = np.random.default_rng(seed).permutation(n).tolist()
        relabelled = t.relabel(dict(enumerate(perm)))
        code = canonical_tree_id(t)
        assert canonical_tree_id(relabelled) == code
        back = tree_from_id(code)
        assert canonical_tree_id(back) == code
        assert nx.is_isomorphic(digraph(back.edges, n), digraph(t.edges, n))

    def test_reverse_differs_for_path_star(self):
        assert canonical_tree_id(out_star(4)) != canonical_tree_id(out_star(4).reverse())


class TestUnavoidable:
    def test_directed_path(self):
        assert is_unavoidable(directed_path(5)).verdict == UNAVOIDABLE

    def test_antidirected_three(self):
        r = is_unavoidable(antidirected_path(3))
        assert r.verdict == AVOIDABLE
        assert nx.is_isomorphic(digraph(r.witness.edges(), 3), digraph(THREE_CYCLE.edges(), 3))

    def test_out_star_three(self):
        r = is_unavoidable(out_star(3))
        assert r.verdict == AVOIDABLE
        assert nx.is_isomorphic(digraph(r.witness.edges(), 3), digraph(THREE_CYCLE.edges(), 3))

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_dedup_agrees_with_raw(self, n):
        for code in oriented_tree_classes(n):
            t = tree_from_id(code)
            assert is_unavoidable(t, dedup=True).verdict == is_unavoidable(t, dedup=False).verdict

    @pytest.mark.parametrize("n", [3, 4])
    def test_raw_sweep_against_naive(self, n):
        for code in oriented_tree_classes(n):
            t = tree_from_id(code)
            hosts = (Tournament.from_code(n, c) for c in range(1 << (n * (n - 1) // 2)))
            expect = all(naive_contains(t, g) for g in hosts)
            assert (is_unavoidable(t, dedup=False).verdict == UNAVOIDABLE) == expect

    def test_sampled_never_certifies(self):
        r = is_unavoidable(directed_path(9), mode="sampled", samples=20, seed=0)
        assert r.verdict == NO_COUNTEREXAMPLE and r.hosts_checked == 20
        r = is_unavoidable(out_star(9), mode="sampled", samples=50, seed=0)
        assert r.verdict == AVOIDABLE and backtrack_embed(out_star(9), r.witness) is None

    def test_size_guard(self):
        with pytest.raises(ValueError):
            find_avoiding_host(directed_path(8), 8)
        with pytest.raises(ValueError):
            is_unavoidable(directed_path(3), mode="psychic")

    def test_jobs_do_not_change_witness(self):
        t = antidirected_path(5)
        a, _ = find_avoiding_host(t, 6, jobs=1)
        b, _ = find_avoiding_host(t, 6, jobs=2)
        assert a == b

    def test_havet_thomasse_hosts(self):
        assert backtrack_embed(antidirected_path(5), circulant(5, [1, 2])) is None
        assert len(avoiding_hosts(antidirected_path(5), 5)) == 1


class TestGValue:
    def test_out_star(self):
        assert g_bruteforce(out_star(3)).value == 4

    def test_directed_path(self):
        assert g_bruteforce(directed_path(4)).value == 4

    def test_antidirected_five(self):
        g = g_bruteforce(antidirected_path(5))
        assert g.value == 6 and 5 in g.witnesses

    def test_unresolved(self):
        g = g_bruteforce(out_star(5), n_max=6)
        assert g.value is None and str(g) == "g(T) > 6"


class TestDoubleStar:
    def test_two_two_two(self):
        t, g = double_star_fixture(2, 2, 2)
        assert t.n == 6 and g.n == 7
        assert backtrack_embed(t, g) is None
        assert not naive_contains(t, g)

    def test_one_one_one(self):
        t, g = double_star_fixture(1, 1, 1)
        assert t.n == 3 and g.n == 2
        assert backtrack_embed(t, g) is None

    def test_eight_vertex_hosts_contain_tree(self):
        t, _ = double_star_fixture(2, 2, 2)
        rng = np.random.default_rng(0)
        assert all(backtrack_embed(t, random_tournament(8, rng)) is not None for _ in range(1000))

    def test_blocks(self):
        _, g = double_star_fixture(3, 2, 2)
        # A = 0..4 regular, B = {5}, C = 6..8 regular
        assert [g.out_degree(v) for v in range(5)] == [2 + 4] * 5
        assert all(g.has_edge(5, c) for c in range(6, 9))

    def test_regular_needs_odd(self):
        with pytest.raises(ValueError):
            regular_tournament(4)


class TestCensus:
    def test_three(self):
        rows = oriented_tree_census(3)
        verdicts = {canonical_tree_id(tree_from_id(r[1])): r[4] for r in rows}
        assert len(rows) == 3
        assert verdicts[canonical_tree_id(directed_path(3))] == UNAVOIDABLE
        assert verdicts[canonical_tree_id(antidirected_path(3))] == AVOIDABLE
        assert verdicts[canonical_tree_id(antidirected_path(3).reverse())] == AVOIDABLE

    def test_four(self):
        rows = {r[1]: r for r in oriented_tree_census(4)}
        assert rows[canonical_tree_id(directed_path(4))][4] == UNAVOIDABLE
        star = rows[canonical_tree_id(out_star(4))]
        assert star[4] == AVOIDABLE and star[3] == "0"

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_byte_stable_and_witnesses(self, n):
        text = census_csv(oriented_tree_census(n))
        assert census_csv(oriented_tree_census(n, jobs=2)) == text
        rows = oriented_tree_census(n)
        assert all(ok for _, ok in iter_witness_checks(rows))

    def test_size_guard(self):
        with pytest.raises(ValueError):
            oriented_tree_census(7)
