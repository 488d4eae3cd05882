"""Oriented trees in tournaments: generators, embedders and exhaustive oracles."""

__version__ = "0.1.0"
FORMAT_VERSION = 1
