"""Exact p-adic lattice calculus: Z_(p)-submodules of Q**n, linear
relations between them, double cosets of integral block groups and their
star product, characteristic functions, and a finite Heisenberg/Weil
model for numeric cross-checks."""

__version__ = "0.1.0"
