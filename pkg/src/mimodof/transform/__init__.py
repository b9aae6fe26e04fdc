"""Invertible channel transformations that neutralize interference."""
