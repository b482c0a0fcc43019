"""Best linear Chebyshev approximation through the L2-weighted Lagrange dual."""

__version__ = "0.1.0"
