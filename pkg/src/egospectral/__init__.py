"""Guaranteed eigenvalue bounds from egonet spectral moments."""
