"""Farey pivot sequences, Markov-triple traces and block-model predictions."""

from .farey import INF, BASE_TRIANGLE, Slope, farey_path, parse_slope
from .halfplane import EndInvariant, UHPoint, bracket, parse_end_invariant
from .markov import MarkovTriple, parse_triple, spectrum, vertex_trace
from .mobius import complex_length, omega
from .model import combinatorial_data, export_model
from .pivot import PivotSequence, pivot_sequence, predict

__version__ = "0.1.0"

__all__ = [
    "INF", "BASE_TRIANGLE", "Slope", "farey_path", "parse_slope",
    "EndInvariant", "UHPoint", "bracket", "parse_end_invariant",
    "MarkovTriple", "parse_triple", "spectrum", "vertex_trace",
    "complex_length", "omega", "combinatorial_data", "export_model",
    "PivotSequence", "pivot_sequence", "predict",
]
