"""Exhaustive ground truth: unavoidability, g(T), named avoiding hosts and the tree census."""

from __future__ import annotations

import csv
import io
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

from .embed.backtrack import backtrack_embed
from .otree import OrientedTree, double_star_tree, prufer_decode
from .stars import pendant_star_census
from .tournament import (
    MAX_ENUMERATION_N,
    Tournament,
    _rng,
    circulant,
    isomorphism_class_codes,
    pair_count,
    random_tournament,
)

UNAVOIDABLE = "unavoidable"
AVOIDABLE = "avoidable"
NO_COUNTEREXAMPLE = "no counterexample found"


@dataclass(frozen=True)
class UnavoidabilityReport:
    tree: OrientedTree
    verdict: str
    host_size: int
    witness: Tournament | None = None
    mode: str = "exhaustive"
    hosts_checked: int = 0

    def to_json(self) -> dict:
        return {
            "tree": self.tree.to_json(),
            "verdict": self.verdict,
            "host_size": self.host_size,
            "witness": None if self.witness is None else self.witness.to_json(),
            "mode": self.mode,
            "hosts_checked": self.hosts_checked,
        }


def _first_avoider(tree: OrientedTree, n: int, codes: Sequence[int]) -> int | None:
    for code in codes:
        if backtrack_embed(tree, Tournament.from_code(n, code)) is None:
            return code
    return None


def _host_codes(n: int, dedup: bool) -> Sequence[int]:
    return isomorphism_class_codes(n) if dedup else range(1 << pair_count(n))


def find_avoiding_host(tree: OrientedTree, n: int, dedup: bool = True, jobs: int = 1) -> tuple[Tournament | None, int]:
    """Smallest-code tournament on ``n`` vertices avoiding ``tree``, and the number of hosts scanned.

    With ``jobs > 1`` the host list is split into contiguous chunks; the
    smallest witness code over all chunks is returned, so the answer does not
    depend on the number of workers.
    """
    if n > MAX_ENUMERATION_N:
        raise ValueError(f"exhaustive sweeps are limited to n <= {MAX_ENUMERATION_N}")
    codes = list(_host_codes(n, dedup))
    if jobs <= 1 or len(codes) < 64:
        found = _first_avoider(tree, n, codes)
        scanned = len(codes) if found is None else codes.index(found) + 1
    else:
        size = -(-len(codes) // jobs)
        chunks = [codes[i : i + size] for i in range(0, len(codes), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_first_avoider, [tree] * len(chunks), [n] * len(chunks), chunks))
        hits = [c for c in results if c is not None]
        found = min(hits) if hits else None
        scanned = len(codes)
    return (None if found is None else Tournament.from_code(n, found)), scanned


def avoiding_hosts(tree: OrientedTree, n: int, dedup: bool = True) -> list[Tournament]:
    """Every host on ``n`` vertices (every class with ``dedup``) that contains no copy of ``tree``."""
    if n > MAX_ENUMERATION_N:
        raise ValueError(f"exhaustive sweeps are limited to n <= {MAX_ENUMERATION_N}")
    hosts = (Tournament.from_code(n, c) for c in _host_codes(n, dedup))
    return [g for g in hosts if backtrack_embed(tree, g) is None]


def is_unavoidable(
    t: OrientedTree,
    mode: str = "exhaustive",
    dedup: bool = True,
    samples: int = 1000,
    seed=None,
    jobs: int = 1,
) -> UnavoidabilityReport:
    """Does every tournament on |t| vertices contain ``t``?

    Exhaustive mode sweeps every tournament (one per isomorphism class with
    ``dedup``).  Sampled mode tries random tournaments and can only ever
    answer "avoidable" or "no counterexample found".
    """
    n = t.n
    if mode == "exhaustive":
        witness, scanned = find_avoiding_host(t, n, dedup=dedup, jobs=jobs)
        verdict = UNAVOIDABLE if witness is None else AVOIDABLE
        return UnavoidabilityReport(t, verdict, n, witness, mode, scanned)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = _rng(seed)
    for i in range(samples):
        g = random_tournament(n, rng)
        if backtrack_embed(t, g) is None:
            return UnavoidabilityReport(t, AVOIDABLE, n, g, mode, i + 1)
    return UnavoidabilityReport(t, NO_COUNTEREXAMPLE, n, None, mode, samples)


@dataclass(frozen=True)
class GValue:
    """``value`` is g(T) when determined; otherwise g(T) > ``lower_bound``."""

    value: int | None
    lower_bound: int
    witnesses: dict

    def __str__(self) -> str:
        return f"g(T) = {self.value}" if self.value is not None else f"g(T) > {self.lower_bound}"


def g_bruteforce(t: OrientedTree, n_max: int = MAX_ENUMERATION_N, jobs: int = 1) -> GValue:
    """Smallest N <= n_max such that every tournament on N vertices contains ``t``.

    Containment is monotone in N (a larger tournament has one on N vertices
    inside it), so the first N without an avoiding host is g(T).
    """
    witnesses = {}
    for size in range(t.n, n_max + 1):
        witness, _ = find_avoiding_host(t, size, dedup=True, jobs=jobs)
        if witness is None:
            return GValue(size, size - 1, witnesses)
        witnesses[size] = witness
    return GValue(None, n_max, witnesses)


def regular_tournament(size: int) -> Tournament:
    if size % 2 == 0:
        raise ValueError(f"no regular tournament on an even number ({size}) of vertices")
    return circulant(size)


def double_star_fixture(a: int, b: int, c: int) -> tuple[OrientedTree, Tournament]:
    """Double-star tree and a blocked host on ``2a + b + 2c - 3`` vertices that avoids it.

    The host has blocks A, B, C of sizes 2a-1, b-1, 2c-1: regular inside A
    and C, transitive inside B, and every other edge points A -> B, B -> C
    or A -> C.
    """
    tree = double_star_tree(a, b, c)
    sa, sb, sc = 2 * a - 1, b - 1, 2 * c - 1
    n = sa + sb + sc
    A, B, C = range(sa), range(sa, sa + sb), range(sa + sb, n)
    edges = []
    for block in (A, C):
        reg = regular_tournament(len(block))
        edges += [(block[u], block[v]) for u, v in reg.edges()]
    edges += [(u, v) for u, v in itertools.combinations(B, 2)]
    edges += [(u, v) for u in A for v in itertools.chain(B, C)]
    edges += [(u, v) for u in B for v in C]
    return tree, Tournament.from_edges(n, edges)


# --- census of small oriented trees -----------------------------------------


def _encode(t: OrientedTree, root: int, parent: int | None) -> str:
    parts = []
    for y in t.neighbours(root):
        if y != parent:
            arrow = ">" if t.has_edge(root, y) else "<"
            parts.append(arrow + _encode(t, y, root))
    return "(" + "".join(sorted(parts)) + ")"


def canonical_tree_id(t: OrientedTree) -> str:
    """Isomorphism invariant of an oriented tree: the least rooted encoding over all roots."""
    return min(_encode(t, r, None) for r in t.vertices)


def tree_from_id(code: str) -> OrientedTree:
    """Rebuild a labelled tree from its encoding; vertices are numbered in reading order."""
    edges = []
    stack: list[int] = []
    nxt = 0
    arrow = None
    for ch in code:
        if ch in "<>":
            arrow = ch
        elif ch == "(":
            v = nxt
            nxt += 1
            if stack:
                u = stack[-1]
                edges.append((u, v) if arrow == ">" else (v, u))
            stack.append(v)
        elif ch == ")":
            stack.pop()
    return OrientedTree(tuple(range(nxt)), tuple(edges))


def oriented_tree_classes(n: int) -> list[str]:
    """Encodings of all oriented trees on ``n`` vertices up to isomorphism, sorted."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return [canonical_tree_id(OrientedTree((0,), ()))]
    seen: set[str] = set()
    shapes: set[str] = set()
    for seq in itertools.product(range(n), repeat=n - 2):
        und = prufer_decode(list(seq), n)
        shape = canonical_tree_id(OrientedTree(tuple(range(n)), tuple(und)))
        # orientations of one labelled tree per undirected shape suffice
        if shape in shapes:
            continue
        shapes.add(shape)
        for flips in range(1 << (n - 1)):
            edges = tuple((v, u) if flips >> i & 1 else (u, v) for i, (u, v) in enumerate(und))
            seen.add(canonical_tree_id(OrientedTree(tuple(range(n)), edges)))
    return sorted(seen)


CENSUS_COLUMNS = ["n", "tree_canonical_id", "edges", "alpha_max", "verdict", "witness_bits"]


def _census_row(code: str) -> list:
    t = tree_from_id(code)
    report = is_unavoidable(t)
    alpha = pendant_star_census(t).alpha_max
    edges = " ".join(f"{u}>{v}" for u, v in sorted(t.edges))
    bits = "" if report.witness is None else report.witness.to_bits()
    return [t.n, code, edges, str(alpha), report.verdict, bits]


def oriented_tree_census(n: int, jobs: int = 1) -> list[list]:
    """One row per oriented tree on ``n`` vertices (up to isomorphism), in id order."""
    if n > 6:
        raise ValueError("the census is limited to n <= 6")
    codes = oriented_tree_classes(n)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_census_row, codes))
    return [_census_row(c) for c in codes]


def census_csv(rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CENSUS_COLUMNS)
    w.writerows(rows)
    return buf.getvalue()


def iter_witness_checks(rows: Sequence[Sequence]) -> Iterator[tuple[str, bool]]:
    """Re-validate every avoidable row: its witness must contain no copy of the tree."""
    for row in rows:
        if row[4] != AVOIDABLE:
            continue
        t = tree_from_id(row[1])
        g = Tournament.from_code(int(row[0]), int(row[5], 2))
        yield row[1], backtrack_embed(t, g) is None
