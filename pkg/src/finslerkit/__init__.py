"""Numerical Finsler geometry and comparison-theorem checks."""

__version__ = "0.1.0"
