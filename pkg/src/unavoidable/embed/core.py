"""Embeddings of oriented trees into tournaments, and structured stage failures."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from ..otree import OrientedTree
from ..tournament import Tournament


class StageFailure(Exception):
    """A pipeline stage could not proceed on this instance."""

    def __init__(self, stage: str, detail: str, counts: dict | None = None):
        super().__init__(f"{stage}: {detail}")
        self.stage = stage
        self.detail = detail
        self.counts = dict(counts or {})

    def to_dict(self) -> dict:
        return {"stage": self.stage, "detail": self.detail, "counts": self.counts}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class SearchBudgetExceeded(RuntimeError):
    pass


def embedding_problems(tree: OrientedTree, host: Tournament, mapping: dict, spanning: bool = False) -> list[str]:
    """Independent validation of a (partial) embedding; returns the problems found."""
    problems = []
    verts = set(tree.vertices)
    if not set(mapping) <= verts:
        problems.append("map contains non-tree vertices")
    images = list(mapping.values())
    if len(set(images)) != len(images):
        problems.append("map is not injective")
    if any(not (0 <= h < host.n) for h in images):
        problems.append("image outside the host")
        return problems
    for u, v in tree.edges:
        if u in mapping and v in mapping and not host.has_edge(mapping[u], mapping[v]):
            problems.append(f"edge {u}->{v} maps to a non-edge")
    if spanning and (set(mapping) != verts or len(images) != host.n):
        problems.append("embedding is not spanning")
    return problems


@dataclass
class Embedding:
    map: dict[int, int] = field(default_factory=dict)

    def problems(self, tree: OrientedTree, host: Tournament, spanning: bool = False) -> list[str]:
        return embedding_problems(tree, host, self.map, spanning)

    def is_valid(self, tree: OrientedTree, host: Tournament, spanning: bool = False) -> bool:
        return not self.problems(tree, host, spanning)

    def __len__(self):
        return len(self.map)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["tree_vertex", "host_vertex"])
        for v in sorted(self.map):
            w.writerow([v, self.map[v]])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"map": [[v, self.map[v]] for v in sorted(self.map)]}
