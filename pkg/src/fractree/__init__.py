"""Displacement fractals of a loaded binary-tree frame."""

from .errors import FractreeError
from .mechanics import Displacement
from .model import ExactPos, NodeRef, TreeParams, figure_params, validate

__all__ = [
    "Displacement",
    "ExactPos",
    "FractreeError",
    "NodeRef",
    "TreeParams",
    "figure_params",
    "validate",
]
__version__ = "0.1.0"
