"""Numerical core of the spectral-instability laboratory."""
