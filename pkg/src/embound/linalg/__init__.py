"""Sparse symmetric solvers: CG, MINRES, classical AMG and eigenvalue estimates."""

from .sparse import as_sparse_sym, SymmetryError
from .krylov import (
    ConvergenceError,
    IndefiniteError,
    SolveResult,
    cg_solve,
    minres_solve,
)
from .amg import AmgHierarchy, amg_apply, amg_setup
from .eigs import extremal_eigs

__all__ = [
    "AmgHierarchy",
    "ConvergenceError",
    "IndefiniteError",
    "SolveResult",
    "SymmetryError",
    "amg_apply",
    "amg_setup",
    "as_sparse_sym",
    "cg_solve",
    "extremal_eigs",
    "minres_solve",
]
