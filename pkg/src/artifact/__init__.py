"""Certified gluing-equation toolkit for cusped hyperbolic 3-manifolds."""

__version__ = "0.1.0"
