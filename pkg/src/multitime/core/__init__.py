"""Lattice geometry, dense numerics and error types."""
