"""Exact-arithmetic graph algebras with tails: constructions, ideal lattices and matrix checks."""

__version__ = "1.0.0"
