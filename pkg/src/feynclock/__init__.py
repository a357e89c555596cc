"""Numerics for Feynman's clock-register model of quantum computation."""

__version__ = "0.1.0"
