"""Weighted Laplacians and Schrödinger operators on infinite graphs.

Finite-region certificates (Dirichlet problems, Harnack bounds, form bounds),
ball exhaustion for positive harmonic functions, the path metric built from
the edge coefficients, and deficiency probes for essential self-adjointness.
"""

from .errors import (BudgetError, CapacityError, ConstructionError, DomainError, InconsistencyError,
                     NumericError, ParseError, PreconditionError, UndeterminedError, UnreachableError,
                     UnsupportedError, VerificationError)
from .graph import (BinaryTree, FamilySpec, FiniteGraph, FiniteRegion, HalfLine, WeightedGraph, build_family,
                    combinatorial_ball, half_line, path_graph, region)
from .operator import SchrodingerData, form_lower_bound, gauge_to_schrodinger

__version__ = "0.1.0"

__all__ = [
    "BudgetError", "CapacityError", "ConstructionError", "DomainError", "InconsistencyError", "NumericError",
    "ParseError", "PreconditionError", "UndeterminedError", "UnreachableError", "UnsupportedError",
    "VerificationError", "BinaryTree", "FamilySpec", "FiniteGraph", "FiniteRegion", "HalfLine",
    "WeightedGraph", "build_family", "combinatorial_ball", "half_line", "path_graph", "region",
    "SchrodingerData", "form_lower_bound", "gauge_to_schrodinger",
]
