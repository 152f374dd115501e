"""Numerical operations: curves, kernels, quadrature and the studies built on them."""
