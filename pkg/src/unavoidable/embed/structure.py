"""Vertex-moving search for an almost-directed partition or a dense core.

The host is split into X, Y, Z with few edges pointing "backwards"
(Y -> X, Z -> X, Z -> Y).  Starting from Y = V(G), vertices and whole cuts
are moved out of Y while the backward-edge budget allows it.  Either Y ends
up small, which yields an almost-directed partition of the host, or every
vertex of G[Y] has large in- and out-degree inside Y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..tournament import Tournament, bits_of, mask_of

ALMOST_DIRECTED = "almost_directed"
DENSE = "dense"


@dataclass(frozen=True)
class StructureParams:
    eta: float = 0.1
    gamma: float = 0.2
    mu_target: float = 0.01


@dataclass
class StructureVerdict:
    kind: str
    X: list[int]
    Y: list[int]
    Z: list[int]
    U: list[int] = field(default_factory=list)
    W: list[int] = field(default_factory=list)
    reverse_edges: int = 0
    mu: float = 0.0
    min_semidegree: int = 0
    moves: list[tuple[str, int]] = field(default_factory=list)
    y_sizes: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "X": self.X, "Y": self.Y, "Z": self.Z, "moves": [list(m) for m in self.moves]}
        if self.kind == ALMOST_DIRECTED:
            out.update(U=self.U, W=self.W, reverse_edges=self.reverse_edges, mu=self.mu)
        else:
            out["min_semidegree"] = self.min_semidegree
        return out


def _pop(x: int) -> int:
    return bin(x).count("1")


def backward_edges(g: Tournament, X: int, Y: int, Z: int) -> int:
    """e(Y -> X) + e(Z -> X) + e(Z -> Y) for vertex masks."""
    total = 0
    for v in bits_of(Y | Z):
        total += _pop(g.out[v] & X)
    for v in bits_of(Z):
        total += _pop(g.out[v] & Y)
    return total


def structure_search(g: Tournament, params: StructureParams | None = None) -> StructureVerdict:
    """Shrink Y by legal moves until the verdict is determined.

    A move is legal when Y keeps at least n/3 vertices and the backward-edge
    count stays within ``min(eta (|X|+|Z|) n, 3 gamma eta n^2)``.  Cut moves
    (sending a near-directed prefix of Y to X, or its suffix to Z) are tried
    first, then single vertices of low in-degree (to X) or low out-degree (to
    Z) inside G[Y].  Every move strictly shrinks Y, so at most n moves occur.
    The search stops as soon as ``|Y| <= (1 - 2 gamma) n``.
    """
    p = params or StructureParams()
    n = g.n
    X = Z = 0
    Y = (1 << n) - 1
    moves: list[tuple[str, int]] = []
    sizes = [n]
    y_floor = math.ceil(n / 3)
    stop_at = (1 - 2 * p.gamma) * n
    threshold = p.eta * n

    def legal(x: int, y: int, z: int) -> bool:
        if _pop(y) < y_floor:
            return False
        allowance = min(p.eta * (_pop(x) + _pop(z)) * n, 3 * p.gamma * p.eta * n * n)
        return backward_edges(g, x, y, z) <= allowance

    while n and _pop(Y) > stop_at:
        step = _cut_move(g, X, Y, Z, p.mu_target, legal) or _single_move(g, X, Y, Z, threshold, legal)
        if step is None:
            break
        X, Y, Z, move = step
        moves.append(move)
        sizes.append(_pop(Y))

    xs, ys, zs = list(bits_of(X)), list(bits_of(Y)), list(bits_of(Z))
    if n and len(ys) <= stop_at:
        if len(xs) >= p.gamma * n:
            A, B = X, Y | Z
        else:
            A, B = X | Y, Z
        rev = sum(_pop(g.out[v] & A) for v in bits_of(B))
        a, b = _pop(A), _pop(B)
        mu = rev / (a * b) if a and b else 0.0
        return StructureVerdict(ALMOST_DIRECTED, xs, ys, zs, list(bits_of(A)), list(bits_of(B)), rev, mu, 0, moves, sizes)
    semi = min((min(_pop(g.out[v] & Y), _pop(g.in_sets[v] & Y)) for v in ys), default=0)
    return StructureVerdict(DENSE, xs, ys, zs, min_semidegree=semi, moves=moves, y_sizes=sizes)


def _single_move(g, X, Y, Z, threshold, legal):
    ys = list(bits_of(Y))
    ins = sorted((_pop(g.in_sets[v] & Y), v) for v in ys)
    outs = sorted((_pop(g.out[v] & Y), v) for v in ys)
    for deg, v in ins:
        if deg >= threshold:
            break
        bit = 1 << v
        if legal(X | bit, Y & ~bit, Z):
            return X | bit, Y & ~bit, Z, ("to_X", 1)
    for deg, v in outs:
        if deg >= threshold:
            break
        bit = 1 << v
        if legal(X, Y & ~bit, Z | bit):
            return X, Y & ~bit, Z | bit, ("to_Z", 1)
    return None


def _cut_move(g, X, Y, Z, mu_target, legal):
    """Best legal near-directed cut (S, S') of G[Y] in ascending in-degree order.

    Cuts with fewer reverse edges (relative to mu_target |S||S'|) win; ties
    go to the most balanced cut.  The smaller side leaves Y.
    """
    order = sorted(bits_of(Y), key=lambda v: (_pop(g.in_sets[v] & Y), v))
    m = len(order)
    S = 0
    rev = 0
    candidates = []
    for s in range(1, m):
        v = order[s - 1]
        # v crosses from S' to S: edges S' -> v become reverse, v -> S stop being reverse
        rest = Y & ~S & ~(1 << v)
        rev += _pop(g.in_sets[v] & rest) - _pop(g.out[v] & S)
        S |= 1 << v
        if rev <= mu_target * s * (m - s):
            candidates.append((rev / (s * (m - s)), abs(2 * s - m), s, S))
    for _, _, s, S in sorted(candidates):
        if 2 * s <= m:
            if legal(X | S, Y & ~S, Z):
                return X | S, Y & ~S, Z, ("cut_to_X", s)
        else:
            rest = Y & ~S
            if legal(X, S, Z | rest):
                return X, S, Z | rest, ("cut_to_Z", m - s)
    return None
