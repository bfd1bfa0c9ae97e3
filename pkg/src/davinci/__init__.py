"""Combinatorics and geometry of Da Vinci rod domes."""

__version__ = "0.1.0"
