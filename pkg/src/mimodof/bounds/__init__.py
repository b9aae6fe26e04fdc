"""Closed-form DoF bounds and 2-D DoF regions."""
