"""Exact SL(2,C) character-variety systems for Montesinos knots."""

__version__ = "0.1.0"
