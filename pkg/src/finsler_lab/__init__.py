"""Finsler Lab - Funk, Hilbert and weighted Finsler metrics on convex domains."""

__version__ = "0.1.0"
