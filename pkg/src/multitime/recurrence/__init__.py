"""
Diagonal recurrences on N^m: providers, boundary data, solvers and
way-required (path-ordered) recurrences.
"""

from multitime.recurrence.boundary import BoundaryData, FaceTable, check_compatibility
from multitime.recurrence.field import SolutionField
from multitime.recurrence.providers import ConstantProvider, FunctionProvider, PeriodicTableProvider
from multitime.recurrence.solver import (
    DiagonalRecurrence,
    fundamental_matrix,
    solve_explicit,
    solve_homogeneous_via_phi,
    solve_iterative,
)

__all__ = [
    "BoundaryData",
    "FaceTable",
    "check_compatibility",
    "SolutionField",
    "ConstantProvider",
    "FunctionProvider",
    "PeriodicTableProvider",
    "DiagonalRecurrence",
    "fundamental_matrix",
    "solve_explicit",
    "solve_homogeneous_via_phi",
    "solve_iterative",
]
