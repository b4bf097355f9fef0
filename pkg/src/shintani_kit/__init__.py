"""Exact Shintani cone zeta values, perturbed cone cocycles, and p-adic
measures for real quadratic fields."""

__version__ = "0.1.0"
