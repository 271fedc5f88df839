"""Exact Petersson pairings of theta series against unary theta functions."""

__version__ = "0.1.0"
