"""Graph containers for sparse induced subgraphs, with exact oracles."""

from .graph import Graph, GraphFormatError, VertexSet

__version__ = "0.1.0"

__all__ = ["Graph", "GraphFormatError", "VertexSet", "__version__"]
