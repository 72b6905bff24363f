"""Numerical toolkit for the 2D smectic energy, its BPS decomposition and defect costs."""

__version__ = "0.1.0"
