"""Exact computations on the Farey triangulation: shears, lambda lengths, flips."""

from .farey import INF, ExtRat, GeodesicEdge, Window

__version__ = "0.1.0"

__all__ = ["ExtRat", "GeodesicEdge", "Window", "INF"]
