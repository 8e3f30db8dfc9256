"""Computational symbolic dynamics: subshifts of finite type, word avoidance,
dynamically defined Lagrange/Markov spectra, Cantor-set dimension enclosures
and linearization numerics."""
__version__ = "0.1.0"
