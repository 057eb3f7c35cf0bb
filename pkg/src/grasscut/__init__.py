"""Exact toolkit for 2-planes in a product of vector spaces: pair combinatorics,
Plücker maps, chart catalogs, secondary-polytope pavings and dual-cone embeddings."""

__version__ = "0.1.0"
