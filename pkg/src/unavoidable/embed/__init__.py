"""Embedding engines for oriented trees in tournaments."""

from .backtrack import backtrack_embed, contains
from .cct import BalanceState, CctParams, ClusterDecomposition, balance_clusters, cct_pipeline
from .core import Embedding, SearchBudgetExceeded, StageFailure
from .matching import maximum_matching, perfect_matching
from .pair import PairDecomposition, PairParams, directed_pair_pipeline, greedy_pair_embed
from .structure import StructureParams, StructureVerdict, structure_search

__all__ = [
    "BalanceState",
    "CctParams",
    "ClusterDecomposition",
    "Embedding",
    "PairDecomposition",
    "PairParams",
    "SearchBudgetExceeded",
    "StageFailure",
    "StructureParams",
    "StructureVerdict",
    "backtrack_embed",
    "balance_clusters",
    "cct_pipeline",
    "contains",
    "directed_pair_pipeline",
    "greedy_pair_embed",
    "maximum_matching",
    "perfect_matching",
    "structure_search",
]
