"""Irreducible representation dimensions of classical groups over length-two local rings."""

__version__ = "0.1.0"
