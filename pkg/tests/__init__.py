"""Tests for mimodof."""
