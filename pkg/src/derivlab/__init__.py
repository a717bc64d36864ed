"""Desk-scale exact computations for simplicial Galois deformation theory."""

__version__ = "0.1.0"
