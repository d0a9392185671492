"""Clifford algebras, spinor representations and metric-affine field equations."""

__version__ = "0.1.0"
