"""Verification workbench for Fourier-Mukai functors on stacky toric pairs."""

__version__ = "0.1.0"
