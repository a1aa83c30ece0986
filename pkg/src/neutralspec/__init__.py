"""Spectral toolbox for the scalar neutral delay equation."""

__version__ = "0.1.0"
