"""Service for parameter sweeps over ellipses and intersection geometries."""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from curverad.errors import InvalidArgumentError
from curverad.tools.closed_forms import n_ellipse
from curverad.tools.geometry import make_ellipse
from curverad.tools.intersection import IntersectionConfig, IntersectionSweep, sweep
from curverad.tools.quadrature import QuadratureConfig, integrate_n

logger = logging.getLogger(__name__)

ELLIPSE_COLUMNS = ("xi", "n_numeric", "n_closed", "rel_err")
INTERSECTION_COLUMNS = ("phi", "mu", "I_numeric", "model", "coefficient_fit", "coefficient_exact", "rel_err")


@dataclass(frozen=True)
class EllipseRow:
    xi: float
    n_numeric: float
    n_closed: float
    rel_err: float
    grid: int
    converged: bool

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return self.xi, self.n_numeric, self.n_closed, self.rel_err


class SweepService:
    @staticmethod
    def ellipse_ratios(xi_min: float, xi_max: float, steps: int) -> np.ndarray:
        """Evenly spaced axis ratios in (0, 1]."""
        if not 0 < xi_min <= xi_max <= 1:
            raise InvalidArgumentError(f"need 0 < xi_min <= xi_max <= 1, got {xi_min}, {xi_max}")
        if steps < 1:
            raise InvalidArgumentError(f"steps must be >= 1, got {steps}")
        if steps == 1:
            return np.array([xi_min])
        return np.linspace(xi_min, xi_max, steps)

    @staticmethod
    def ellipse_sweep(
        xi_min: float, xi_max: float, steps: int, config: Optional[QuadratureConfig] = None
    ) -> List[EllipseRow]:
        """n for the ellipses (cos t, ξ sin t) against (ξ + 1/ξ)π²."""
        rows = []
        for xi in SweepService.ellipse_ratios(xi_min, xi_max, steps):
            xi = float(xi)
            result = integrate_n(make_ellipse(1.0, xi), config)
            closed = n_ellipse(xi)
            rel_err = abs(result.value - closed) / closed
            logger.info(f"ξ = {xi:.6g}: n = {result.value:.15g}, closed form {closed:.15g}, rel err {rel_err:.3e}")
            rows.append(EllipseRow(xi, result.value, closed, rel_err, result.grid, result.converged))
        return rows

    @staticmethod
    def gap_ratios(mu_min: float, mu_max: float, steps: int) -> np.ndarray:
        """Geometrically spaced gap ratios from mu_max down to mu_min."""
        if not 0 < mu_min <= mu_max:
            raise InvalidArgumentError(f"need 0 < mu_min <= mu_max, got {mu_min}, {mu_max}")
        if steps < 1:
            raise InvalidArgumentError(f"steps must be >= 1, got {steps}")
        if steps == 1:
            return np.array([mu_min])
        return np.geomspace(mu_max, mu_min, steps)

    @staticmethod
    def intersection_sweep(
        phi: float, mu_min: float, mu_max: float, steps: int, config: Optional[IntersectionConfig] = None
    ) -> IntersectionSweep:
        mus = SweepService.gap_ratios(mu_min, mu_max, steps)
        return sweep(phi, [float(mu) for mu in mus], config)

    @staticmethod
    def intersection_rows(result: IntersectionSweep) -> List[Tuple]:
        return [
            (row.phi, row.mu, row.value, row.model, row.coefficient_fit, row.coefficient_exact, row.rel_err)
            for row in result.rows
        ]
