"""Tournaments stored as per-vertex out-neighbour bitsets.

Vertices are ``0..n-1``.  The canonical serialisation is the upper-triangular
bit string over pairs ``(i, j)``, ``i < j``, in lexicographic order, where a set
bit means ``i -> j``.  As an integer ("code") the first pair is the most
significant bit, so numeric order on codes equals lexicographic order on bit
strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

MAX_ENUMERATION_N = 7


class FormatError(ValueError):
    """Raised when serialised input does not describe a valid object."""


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits_of(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


@dataclass(frozen=True, eq=False)
class Tournament:
    n: int
    out: tuple[int, ...]
    _in: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.out) != self.n:
            raise ValueError(f"expected {self.n} out-neighbour sets, got {len(self.out)}")
        full = (1 << self.n) - 1
        ins = tuple(full & ~o & ~(1 << v) for v, o in enumerate(self.out))
        object.__setattr__(self, "_in", ins)

    @classmethod
    def from_out_sets(cls, n: int, out: Sequence[int]) -> "Tournament":
        """Build from bitsets, checking that every pair has exactly one direction."""
        out = tuple(int(o) for o in out)
        full = (1 << n) - 1
        for v, o in enumerate(out):
            if o & (1 << v):
                raise ValueError(f"loop at vertex {v}")
            if o & ~full:
                raise ValueError(f"vertex {v} has out-neighbours outside 0..{n - 1}")
        for u in range(n):
            for v in bits_of(out[u]):
                if out[v] >> u & 1:
                    raise ValueError(f"both {u}->{v} and {v}->{u} present")
        t = cls(n, out)
        if sum(o.bit_count() for o in out) != pair_count(n):
            raise ValueError("some pair of vertices has no edge")
        return t

    @classmethod
    def from_matrix(cls, adj: np.ndarray) -> "Tournament":
        """Build from a boolean adjacency matrix (trusted to be a tournament)."""
        adj = np.asarray(adj, dtype=bool)
        n = adj.shape[0]
        if n == 0:
            return cls(0, ())
        packed = np.packbits(adj, axis=1, bitorder="little")
        out = tuple(int.from_bytes(row.tobytes(), "little") for row in packed)
        return cls(n, out)

    @classmethod
    def from_code(cls, n: int, code: int) -> "Tournament":
        m = pair_count(n)
        out = [0] * n
        idx = m - 1
        for i in range(n):
            for j in range(i + 1, n):
                if code >> idx & 1:
                    out[i] |= 1 << j
                else:
                    out[j] |= 1 << i
                idx -= 1
        return cls(n, tuple(out))

    @classmethod
    def from_bits(cls, n: int, bits: str) -> "Tournament":
        bits = bits.strip()
        if len(bits) != pair_count(n):
            raise FormatError(f"bits: expected {pair_count(n)} characters for n={n}, got {len(bits)}")
        if set(bits) - {"0", "1"}:
            raise FormatError("bits: only '0' and '1' allowed")
        return cls.from_code(n, int(bits, 2) if bits else 0)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Tournament":
        out = [0] * n
        for e in edges:
            if len(e) != 2:
                raise FormatError(f"edges: entry {list(e)!r} is not a pair")
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise FormatError(f"edges: invalid pair ({u}, {v}) for n={n}")
            out[u] |= 1 << v
        try:
            return cls.from_out_sets(n, out)
        except ValueError as exc:
            raise FormatError(f"edges: {exc}") from None

    # --- queries -------------------------------------------------------------

    @property
    def in_sets(self) -> tuple[int, ...]:
        return self._in

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.out[u] >> v & 1)

    def out_degree(self, v: int) -> int:
        return self.out[v].bit_count()

    def in_degree(self, v: int) -> int:
        return self._in[v].bit_count()

    def out_neighbours(self, v: int) -> list[int]:
        return list(bits_of(self.out[v]))

    def in_neighbours(self, v: int) -> list[int]:
        return list(bits_of(self._in[v]))

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            for v in bits_of(self.out[u]):
                yield u, v

    def code(self) -> int:
        c = 0
        for i in range(self.n):
            o = self.out[i]
            for j in range(i + 1, self.n):
                c = (c << 1) | (o >> j & 1)
        return c

    def to_bits(self) -> str:
        m = pair_count(self.n)
        return format(self.code(), f"0{m}b") if m else ""

    def matrix(self) -> np.ndarray:
        adj = np.zeros((self.n, self.n), dtype=bool)
        for u in range(self.n):
            for v in bits_of(self.out[u]):
                adj[u, v] = True
        return adj

    def relabel(self, perm: Sequence[int]) -> "Tournament":
        """Return the tournament whose vertex ``i`` plays the role of ``perm[i]``."""
        pos = {v: i for i, v in enumerate(perm)}
        out = [0] * self.n
        for i, v in enumerate(perm):
            out[i] = mask_of(pos[w] for w in bits_of(self.out[v]))
        return Tournament(self.n, tuple(out))

    def induced(self, vertices: Sequence[int]) -> "Tournament":
        """Subtournament on ``vertices``, relabelled ``0..len-1`` in the given order."""
        pos = {v: i for i, v in enumerate(vertices)}
        out = [mask_of(pos[w] for w in bits_of(self.out[v] & mask_of(vertices))) for v in vertices]
        return Tournament(len(vertices), tuple(out))

    def __eq__(self, other):
        return isinstance(other, Tournament) and self.n == other.n and self.out == other.out

    def __hash__(self):
        return hash((self.n, self.out))

    # --- serialisation -------------------------------------------------------

    def to_json(self) -> dict:
        m = pair_count(self.n)
        width = (m + 3) // 4
        return {"n": self.n, "bits": format(self.code(), f"0{width}x") if m else ""}

    @classmethod
    def from_json(cls, data: dict) -> "Tournament":
        if not isinstance(data, dict) or "n" not in data:
            raise FormatError("n: missing")
        n = data["n"]
        if not isinstance(n, int) or n < 0:
            raise FormatError(f"n: expected a non-negative integer, got {n!r}")
        if "edges" in data:
            return cls.from_edges(n, data["edges"])
        if "bits" not in data:
            raise FormatError("bits: missing (or give 'edges')")
        hexstr = data["bits"]
        m = pair_count(n)
        if not isinstance(hexstr, str) or len(hexstr) != (m + 3) // 4:
            raise FormatError(f"bits: expected {(m + 3) // 4} hex digits for n={n}")
        try:
            code = int(hexstr, 16) if hexstr else 0
        except ValueError:
            raise FormatError("bits: not a hex string") from None
        if code >> m:
            raise FormatError("bits: value exceeds the pair count")
        return cls.from_code(n, code)

    def dumps(self) -> str:
        return json.dumps(self.to_json())


# --- generators --------------------------------------------------------------


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_tournament(n: int, seed=None) -> Tournament:
    rng = _rng(seed)
    upper = np.triu(rng.integers(0, 2, size=(n, n), dtype=np.int8).astype(bool), 1)
    lower = np.tril(~upper.T, -1)
    return Tournament.from_matrix(upper | lower)


def transitive(n: int) -> Tournament:
    full = (1 << n) - 1
    return Tournament(n, tuple(full & ~((1 << (i + 1)) - 1) for i in range(n)))


def circulant(n: int, offsets: Iterable[int] | None = None) -> Tournament:
    """Circulant tournament ``i -> i+s (mod n)`` for ``s`` in ``offsets``.

    The default offsets ``1..(n-1)/2`` give the regular tournament.
    """
    if n % 2 == 0:
        raise ValueError(f"circulant tournaments need odd n, got {n}")
    offs = {s % n for s in (offsets if offsets is not None else range(1, (n - 1) // 2 + 1))}
    neg = {(-s) % n for s in offs}
    if 0 in offs or offs & neg or len(offs | neg) != n - 1:
        raise ValueError(f"offsets {sorted(offs)} do not define a tournament on Z_{n}")
    return Tournament(n, tuple(mask_of((i + s) % n for s in offs) for i in range(n)))


def _is_prime(q: int) -> bool:
    return q >= 2 and all(q % p for p in range(2, int(q**0.5) + 1))


def paley(q: int) -> Tournament:
    if not _is_prime(q) or q % 4 != 3:
        raise ValueError(f"Paley tournaments need a prime q = 3 (mod 4), got {q}")
    residues = {x * x % q for x in range(1, q)}
    return circulant(q, residues)


def generate(kind: str, n: int, seed=None, offsets=None) -> Tournament:
    if kind == "random":
        return random_tournament(n, seed)
    if kind == "transitive":
        return transitive(n)
    if kind == "circulant":
        return circulant(n, offsets)
    if kind == "paley":
        return paley(n)
    raise ValueError(f"unknown tournament kind {kind!r}")


# --- enumeration and canonical forms ----------------------------------------


@lru_cache(maxsize=None)
def _perm_table(n: int) -> np.ndarray:
    return np.array(list(permutations(range(n))), dtype=np.intp).reshape(-1, n)


@lru_cache(maxsize=None)
def _pair_table(n: int):
    iu, ju = np.triu_indices(n, 1)
    weights = np.array([1 << k for k in range(len(iu) - 1, -1, -1)], dtype=np.int64)
    return iu, ju, weights


def canonical_codes(mats: np.ndarray) -> np.ndarray:
    """Minimum code over all relabelings, for a batch of ``(B, n, n)`` matrices."""
    mats = np.asarray(mats, dtype=bool)
    n = mats.shape[-1]
    if n <= 1:
        return np.zeros(mats.shape[0], dtype=np.int64)
    perms = _perm_table(n)
    iu, ju, weights = _pair_table(n)
    bits = mats[:, perms[:, iu], perms[:, ju]]  # (B, n!, m)
    return (bits.astype(np.int64) @ weights).min(axis=1)


def canonical_code(t: Tournament) -> int:
    if t.n > 9:
        raise ValueError("canonical form by relabeling is limited to n <= 9")
    return int(canonical_codes(t.matrix()[None])[0])


def canonical_form(t: Tournament) -> Tournament:
    return Tournament.from_code(t.n, canonical_code(t))


@lru_cache(maxsize=None)
def isomorphism_class_codes(n: int) -> tuple[int, ...]:
    """Canonical codes of all isomorphism classes on ``n`` vertices, ascending.

    Every tournament on ``n`` vertices is some class representative on
    ``n-1`` vertices plus one new vertex, so extending each smaller
    representative in all ``2^(n-1)`` ways reaches every class.
    """
    if n <= 1:
        return (0,)
    found: set[int] = set()
    for code in isomorphism_class_codes(n - 1):
        base = Tournament.from_code(n - 1, code).matrix()
        masks = np.arange(1 << (n - 1))
        beats_new = ((masks[:, None] >> np.arange(n - 1)) & 1).astype(bool)  # new -> u
        mats = np.zeros((len(masks), n, n), dtype=bool)
        mats[:, : n - 1, : n - 1] = base
        mats[:, n - 1, : n - 1] = beats_new
        mats[:, : n - 1, n - 1] = ~beats_new
        found.update(int(c) for c in canonical_codes(mats))
    return tuple(sorted(found))


def enumerate_tournaments(n: int, dedup: bool = False, allow_large: bool = False) -> Iterator[Tournament]:
    """All labelled tournaments on ``n`` vertices in bit-string order.

    With ``dedup`` one canonical representative per isomorphism class is
    produced instead, again in bit-string order.
    """
    if n > MAX_ENUMERATION_N and not allow_large:
        raise ValueError(f"refusing to enumerate tournaments on {n} > {MAX_ENUMERATION_N} vertices")
    if dedup:
        for code in isomorphism_class_codes(n):
            yield Tournament.from_code(n, code)
        return
    for code in range(1 << pair_count(n)):
        yield Tournament.from_code(n, code)


# --- degrees, density, directed pairs ---------------------------------------


def semidegree_profile(t: Tournament) -> list[tuple[int, int, int]]:
    prof = []
    for v in range(t.n):
        o, i = t.out_degree(v), t.in_degree(v)
        prof.append((o, i, min(o, i)))
    return prof


def low_semidegree_count(t: Tournament, d: int) -> int:
    """Number of vertices whose semidegree is below ``d``."""
    if d < 1:
        raise ValueError("threshold d must be at least 1")
    return sum(1 for _, _, m in semidegree_profile(t) if m < d)


def _side_masks(X, Y) -> tuple[int, int]:
    xm, ym = mask_of(X), mask_of(Y)
    if xm & ym:
        raise ValueError("vertex sets must be disjoint")
    return xm, ym


def edge_count(g: Tournament, X: Iterable[int], Y: Iterable[int]) -> int:
    """Number of edges directed from ``X`` to ``Y``."""
    ym = mask_of(Y)
    return sum((g.out[x] & ym).bit_count() for x in X)


def density(g: Tournament, X: Sequence[int], Y: Sequence[int]) -> float:
    X, Y = list(X), list(Y)
    if not X or not Y:
        raise ValueError("density needs two non-empty vertex sets")
    _side_masks(X, Y)
    return edge_count(g, X, Y) / (len(X) * len(Y))


class AlmostDirected(NamedTuple):
    holds: bool
    reverse_edges: int


def is_mu_almost_directed(g: Tournament, X: Sequence[int], Y: Sequence[int], mu: float) -> AlmostDirected:
    X, Y = list(X), list(Y)
    _side_masks(X, Y)
    rev = edge_count(g, Y, X)
    return AlmostDirected(rev <= mu * len(X) * len(Y), rev)


# --- Hamiltonian paths -------------------------------------------------------


def hamiltonian_directed_path(t: Tournament) -> list[int]:
    """A directed Hamiltonian path, built by binary-search insertion."""
    path: list[int] = []
    for v in range(t.n):
        if not path or t.has_edge(v, path[0]):
            path.insert(0, v)
        elif t.has_edge(path[-1], v):
            path.append(v)
        else:
            # path[lo] -> v and v -> path[hi] hold throughout
            lo, hi = 0, len(path) - 1
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if t.has_edge(path[mid], v):
                    lo = mid
                else:
                    hi = mid
            path.insert(hi, v)
    return path


def is_directed_path(t: Tournament, seq: Sequence[int]) -> bool:
    return len(set(seq)) == len(seq) and all(t.has_edge(a, b) for a, b in zip(seq, seq[1:]))
