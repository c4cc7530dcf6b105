"""Exact computations for determinantal models of symmetric-determinant Fano threefolds."""

__version__ = "0.1.0"
