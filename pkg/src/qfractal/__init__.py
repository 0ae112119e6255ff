"""Quantum central limit theorems for self-similar 1D fractal graphs."""

__version__ = "0.1.0"

from .errors import (ClosureOverflow, InvalidInput, NotAScheme, NotBidirectional,
                     NotCommutative, NotConnected, NotStratifiable, NotSymmetric,
                     NumericalFailure, QFractalError, ReducibleBlock, SizeLimit)
from .graphs import (CentroBlock, Family, FamilySpec, JacobiOperator, Protograph,
                     WeightedGraph, block_charpoly, centro_block, cycle_graph,
                     hypercube_graph, krawtchouk_block, named_graph, p_laplacian,
                     path_graph, substitute, triadic_valuation)
from .ifs import IFSSpec, ifs_catalog, ifs_moment, ladder_moment, orthopoly_eval
from .qdecomp import (extract_jacobi, mixed_moment, quantum_components, stratify,
                      symmetrize, vacuum_moment)

__all__ = [
    "ClosureOverflow", "InvalidInput", "NotAScheme", "NotBidirectional", "NotCommutative",
    "NotConnected", "NotStratifiable", "NotSymmetric", "NumericalFailure", "QFractalError",
    "ReducibleBlock", "SizeLimit",
    "CentroBlock", "Family", "FamilySpec", "JacobiOperator", "Protograph", "WeightedGraph",
    "block_charpoly", "centro_block", "cycle_graph", "hypercube_graph", "krawtchouk_block",
    "named_graph", "p_laplacian", "path_graph", "substitute", "triadic_valuation",
    "IFSSpec", "ifs_catalog", "ifs_moment", "ladder_moment", "orthopoly_eval",
    "extract_jacobi", "mixed_moment", "quantum_components", "stratify", "symmetrize",
    "vacuum_moment",
]
