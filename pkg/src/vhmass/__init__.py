"""Exact genus, mass and automorphism computations for even lattices and VH pairs."""

__version__ = "0.1.0"
