"""Symmetric embedded-boundary finite differences on Cartesian grids."""

from .geometry import Geometry, LevelSet, ParametricCurve
from .grid import Grid, build_context, classify
from .problem import ProblemSpec
from .assembly import OperatorSystem, assemble, build_system
from .spd import check_operator, check_segment

__version__ = "0.1.0"

__all__ = [
    "Geometry",
    "Grid",
    "LevelSet",
    "OperatorSystem",
    "ParametricCurve",
    "ProblemSpec",
    "assemble",
    "build_context",
    "build_system",
    "check_operator",
    "check_segment",
    "classify",
]
