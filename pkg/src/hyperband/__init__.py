"""Hyperbolic band theory on {4g,4g} tilings under a uniform magnetic field."""

__version__ = "0.1.0"
