"""Degrees of freedom of asymmetric MIMO interference channels."""

__version__ = "1.0.0"
