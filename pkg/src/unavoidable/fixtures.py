"""Named trees and tournaments, e.g. ``path-directed-5`` or ``paley-7``."""

from __future__ import annotations

import re

from .oracle import double_star_fixture
from .otree import OrientedTree, antidirected_path, directed_path, double_star_tree, in_star, out_star
from .tournament import Tournament, circulant, paley, transitive

_TREES = {
    "path-directed": directed_path,
    "path-antidirected": antidirected_path,
    "out-star": out_star,
    "in-star": in_star,
}

_HOSTS = {
    "paley": paley,
    "circulant": circulant,
    "transitive": transitive,
}

_NAME = re.compile(r"^([a-z-]+?)-(\d+(?:-\d+)*)$")


def _split(name: str) -> tuple[str, list[int]]:
    m = _NAME.match(name)
    if not m:
        raise KeyError(f"not a fixture name: {name!r}")
    return m.group(1), [int(x) for x in m.group(2).split("-")]


def named_tree(name: str) -> OrientedTree:
    """Tree fixture by name: path-directed-N, path-antidirected-N, out-star-N, in-star-N, double-star-A-B-C."""
    kind, args = _split(name)
    if kind == "double-star" and len(args) == 3:
        return double_star_tree(*args)
    if kind in _TREES and len(args) == 1:
        return _TREES[kind](args[0])
    raise KeyError(f"unknown tree fixture {name!r}")


def named_tournament(name: str) -> Tournament:
    """Host fixture by name: paley-Q, circulant-N, transitive-N, double-star-A-B-C (the blocked host)."""
    kind, args = _split(name)
    if kind == "double-star" and len(args) == 3:
        return double_star_fixture(*args)[1]
    if kind in _HOSTS and len(args) == 1:
        return _HOSTS[kind](args[0])
    raise KeyError(f"unknown tournament fixture {name!r}")
