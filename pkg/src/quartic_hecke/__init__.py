"""Quartic Hecke characters over Q(i): arithmetic, Gauss sums and central L-values."""

__version__ = "0.1.0"
