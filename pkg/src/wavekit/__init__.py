"""Spherical analysis and wave propagation on the ax+b group R+ x| R^n."""

__version__ = "0.1.0"
