"""Genus-two hyperelliptic curves, theta functions, kernels and topological recursion."""

__version__ = "0.1.0"
