"""Computational systolic geometry on flat tori and piecewise-flat surfaces."""

__version__ = "0.1.0"
