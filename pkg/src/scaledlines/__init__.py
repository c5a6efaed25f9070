"""Exact combinatorics of boundary divisors on moduli of scaled marked lines.

The package computes, entirely over the integers, the local toric data
attached to a colored tree (edge weights, cone generators, boundary rays)
and the global Weil/Cartier classification of boundary divisor classes,
together with pullbacks along forgetful and cross-ratio maps.  Every
nontrivial theorem the code relies on is re-checked at runtime through an
independent second route; disagreement raises instead of guessing.
"""

from .trees import ColoredTree, Partition, Subset, Vertex

__version__ = "0.1.0"

__all__ = ["ColoredTree", "Partition", "Subset", "Vertex", "__version__"]
