"""Numerical photon-number integral of closed curves and its invariance checks."""
__version__ = "0.1.0"

from curverad.tools.closed_forms import n_circle, n_ellipse
from curverad.tools.geometry import Curve, invert, make_circle, make_ellipse, make_fourier
from curverad.tools.quadrature import QuadratureConfig, QuadratureResult, integrate_n

__all__ = [
    "__version__",
    "Curve",
    "QuadratureConfig",
    "QuadratureResult",
    "integrate_n",
    "invert",
    "make_circle",
    "make_ellipse",
    "make_fourier",
    "n_circle",
    "n_ellipse",
]
