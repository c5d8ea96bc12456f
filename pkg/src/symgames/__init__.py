"""Data structures and equilibrium solvers for large symmetric games."""
__version__ = "0.1.0"
