"""Extremal 3-graph constructions: designs, Lagrangians, forbidden families."""

from .hcore import Hypergraph, VertexPartition

__all__ = ["Hypergraph", "VertexPartition"]
__version__ = "0.1.0"
