"""Colored-graph face maximization for Gaussian random tensor moments."""

__version__ = "0.1.0"
