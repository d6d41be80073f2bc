"""Morita invariants and Picard groups of topologically stable Poisson structures on surfaces."""

from .graphs import automorphism_group, canonical_key, graph_isomorphisms, isomorphic_tss, morita_equivalent
from .model import TssSurface, build_graph, load_tss, parse_tss, serialize_tss, validate
from .picard import compose, elements_equal, invert, picard_group, static_picard

__version__ = "0.1.0"

__all__ = [
    "TssSurface", "parse_tss", "load_tss", "serialize_tss", "validate", "build_graph",
    "graph_isomorphisms", "automorphism_group", "canonical_key", "morita_equivalent", "isomorphic_tss",
    "picard_group", "static_picard", "compose", "invert", "elements_equal",
]
