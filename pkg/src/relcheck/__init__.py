"""Equivalence and refinement checking for database-driven applications."""

__version__ = "0.1.0"
