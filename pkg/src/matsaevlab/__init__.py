"""Finite-dimensional laboratory for multivariate Matsaev-type inequalities."""

__version__ = "0.1.0"
