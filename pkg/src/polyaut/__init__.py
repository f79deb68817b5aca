"""Polytopes with a prescribed automorphism group, built and certified exactly."""

__version__ = "0.1.0"
