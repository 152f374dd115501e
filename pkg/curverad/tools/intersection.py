"""Local contribution of two straight curve pieces approaching each other.

Two unit-length pieces x1 = (t cos φ, t sin φ, μ) and x2 = (t′, 0, 0), |t|, |t′| <= 1,
at gap ratio μ contribute ∬ M with

    M(t, t′) = (t t′ sin²φ + μ² cos φ)/(t² + t′² - 2 t t′ cos φ + μ²)².

Over the unit disk the polar angle integrates in closed form, and r = μ√u turns
the radial integral into (π/2) cos φ ∫₀^{1/μ²} (Q^{-1/2} + Q^{-3/2}) du with
Q = u² sin²φ + 2u + 1. That u-form is the production path; the radial and the
2-D polar quadratures are oracles for it.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from curverad.config import INTERSECTION_CONFIG
from curverad.errors import IndeterminateError, InvalidArgumentError, ResolutionError
from curverad.tools.closed_forms import COS_ZERO_TOL, Asymptote, AsymptoteKind, intersection_asymptote
from curverad.tools.geometry import CurveJet

logger = logging.getLogger(__name__)

Number = Union[float, np.ndarray]

# largest ln(1 + 1/μ²) whose exponential is still finite
_MAX_LOG_SPAN = 700.0


@dataclass(frozen=True)
class IntersectionConfig:
    """Gap ratio, tangent angle and the resolution of the 1-D and 2-D quadratures."""

    mu: float
    phi: float
    gauss_order: int = INTERSECTION_CONFIG["gauss_order"]
    panel_width: float = INTERSECTION_CONFIG["panel_width"]
    max_nodes: int = INTERSECTION_CONFIG["max_nodes"]
    theta_nodes: int = INTERSECTION_CONFIG["theta_nodes"]
    radial_octaves_below: int = INTERSECTION_CONFIG["radial_octaves_below"]

    def __post_init__(self):
        if not self.mu > 0:
            raise InvalidArgumentError(f"gap ratio μ must be positive, got {self.mu}")
        if not -math.pi <= self.phi <= math.pi:
            raise InvalidArgumentError(f"tangent angle φ must lie in [-π, π], got {self.phi}")
        if self.gauss_order < 1 or self.theta_nodes < 4:
            raise InvalidArgumentError("gauss_order must be >= 1 and theta_nodes >= 4")
        if not self.panel_width > 0:
            raise InvalidArgumentError(f"panel width must be positive, got {self.panel_width}")

    @classmethod
    def resolve(cls, mu: float, phi: float, config: Optional["IntersectionConfig"] = None) -> "IntersectionConfig":
        """Settings for (μ, φ), keeping the resolution of ``config`` when given."""
        if config is None:
            return cls(mu, phi)
        return replace(config, mu=mu, phi=phi)

    @property
    def cos_phi(self) -> float:
        return cos_phi(self.phi)

    @property
    def sin2_phi(self) -> float:
        return math.sin(self.phi) ** 2


@dataclass(frozen=True, eq=False)
class RadialKernel:
    """Coefficients of the angular integral at radius r of the unit disk."""

    r: Number
    mu: float
    phi: float

    def __post_init__(self):
        if not self.mu > 0:
            raise InvalidArgumentError(f"gap ratio μ must be positive, got {self.mu}")
        r = np.asarray(self.r, dtype=float)
        if np.any(r < 0):
            raise InvalidArgumentError("radius must be nonnegative")
        object.__setattr__(self, "r", r)

    @property
    def p(self) -> np.ndarray:
        return self.r**2 * math.sin(self.phi) ** 2

    @property
    def q(self) -> float:
        return 2 * self.mu**2 * cos_phi(self.phi)

    @property
    def alpha(self) -> np.ndarray:
        return self.r**2 * cos_phi(self.phi)

    @property
    def beta(self) -> np.ndarray:
        return self.r**2 + self.mu**2

    @property
    def L(self) -> np.ndarray:
        r2 = self.r**2
        return r2 * r2 * math.sin(self.phi) ** 2 + 2 * self.mu**2 * r2 + self.mu**4

    def intermediate(self) -> Number:
        """π(pα + qβ)/(β² - α²)^{3/2}, before simplification."""
        beta, alpha = self.beta, self.alpha
        return _squeeze(math.pi * (self.p * alpha + self.q * beta) / ((beta - alpha) * (beta + alpha)) ** 1.5)

    def reduced(self) -> Number:
        """π cos φ (L^{-1/2} + μ⁴ L^{-3/2})."""
        lr = self.L
        return _squeeze(math.pi * cos_phi(self.phi) * (lr**-0.5 + self.mu**4 * lr**-1.5))


@dataclass(frozen=True)
class AsymptoticFit:
    model: AsymptoteKind
    coefficient: float
    intercept: float
    exact: Asymptote
    points: int

    @property
    def rel_err(self) -> float:
        if self.exact.coefficient == 0:
            return abs(self.coefficient)
        return abs(self.coefficient - self.exact.coefficient) / abs(self.exact.coefficient)

    def to_dict(self) -> dict:
        return {
            "model": self.model.value,
            "coefficient_fit": self.coefficient,
            "intercept": self.intercept,
            "coefficient_exact": self.exact.coefficient,
            "rel_err": self.rel_err,
            "points": self.points,
        }


@dataclass(frozen=True)
class SweepRow:
    phi: float
    mu: float
    value: float
    model: AsymptoteKind
    coefficient_fit: float
    coefficient_exact: float
    rel_err: float


@dataclass(frozen=True)
class IntersectionSweep:
    rows: Tuple[SweepRow, ...]
    fit: Optional[AsymptoticFit]


def cos_phi(phi: float) -> float:
    """cos φ, snapped to 0 for orthogonal pieces."""
    c = math.cos(phi)
    return 0.0 if abs(c) < COS_ZERO_TOL else c


def m_integrand(t: Number, tp: Number, mu: float, phi: float) -> Number:
    if not mu > 0:
        raise InvalidArgumentError(f"gap ratio μ must be positive, got {mu}")
    t, tp = np.asarray(t, dtype=float), np.asarray(tp, dtype=float)
    c = cos_phi(phi)
    numerator = t * tp * math.sin(phi) ** 2 + mu * mu * c
    denominator = t * t + tp * tp - 2 * t * tp * c + mu * mu
    return _squeeze(numerator / (denominator * denominator))


def line_piece_jets(t: Number, tp: Number, mu: float, phi: float) -> Tuple[CurveJet, CurveJet]:
    """Jets of the two straight pieces in R³ at parameters t and t′."""
    t, tp = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(tp, dtype=float))
    c, s = math.cos(phi), math.sin(phi)
    zeros = np.zeros_like(t)
    x1 = np.stack([t * c, t * s, zeros + mu], axis=-1)
    v1 = np.stack([zeros + c, zeros + s, zeros], axis=-1)
    x2 = np.stack([tp, zeros, zeros], axis=-1)
    v2 = np.stack([zeros + 1, zeros, zeros], axis=-1)
    return CurveJet(x1, v1, np.zeros_like(x1)), CurveJet(x2, v2, np.zeros_like(x2))


def angular_reduction(r: Number, mu: float, phi: float) -> Number:
    """Closed-form polar-angle integral A(r) of M over the circle of radius r."""
    return RadialKernel(r, mu, phi).reduced()


def angular_integral(r: Number, mu: float, phi: float, nodes: Optional[int] = None) -> Number:
    """A(r) by the trapezoid rule in the polar angle."""
    nodes = INTERSECTION_CONFIG["theta_nodes"] if nodes is None else nodes
    if nodes < 4:
        raise InvalidArgumentError(f"angular integral needs at least 4 nodes, got {nodes}")
    theta = 2 * math.pi * np.arange(nodes) / nodes
    r = np.asarray(r, dtype=float)[..., None]
    values = np.asarray(m_integrand(r * np.cos(theta), r * np.sin(theta), mu, phi))
    return _squeeze(2 * math.pi / nodes * np.sum(values, axis=-1))


def disk_integral(mu: float, phi: float, config: Optional[IntersectionConfig] = None) -> float:
    """∬ M over the unit disk from the u-form.

    With u = e^s - 1 the integrand (1 + u)(Q^{-1/2} + Q^{-3/2}) is smooth and
    at most exponential in s, so fixed-width Gauss-Legendre panels over
    [0, ln(1 + 1/μ²)] resolve it with a node count linear in ln(1/μ).
    """
    setup = IntersectionConfig.resolve(mu, phi, config)
    c = setup.cos_phi
    if c == 0:
        return 0.0
    span = math.log1p(mu * mu) - 2 * math.log(mu)
    if span > _MAX_LOG_SPAN:
        raise ResolutionError(f"1/μ² overflows for μ = {mu:.3e}")
    panels = max(1, math.ceil(span / setup.panel_width))
    _check_budget(panels * setup.gauss_order, setup, "u-form")

    s, w = _composite_gauss(np.linspace(0.0, span, panels + 1), setup.gauss_order)
    u = np.expm1(s)
    q = setup.sin2_phi * u * u + 2 * u + 1
    values = (1 + u) * (q**-0.5 + q**-1.5)
    return math.pi / 2 * c * math.fsum(w * values)


def radial_integral(mu: float, phi: float, config: Optional[IntersectionConfig] = None) -> float:
    """∫₀¹ r A(r) dr with A in closed form, on radial panels that double from below μ."""
    setup = IntersectionConfig.resolve(mu, phi, config)
    r, w = _composite_gauss(_radial_edges(setup), setup.gauss_order)
    _check_budget(r.size, setup, "radial")
    return math.fsum(w * r * np.asarray(angular_reduction(r, mu, phi)))


def disk_integral_2d(mu: float, phi: float, config: Optional[IntersectionConfig] = None) -> float:
    """Polar product quadrature of M over the unit disk."""
    setup = IntersectionConfig.resolve(mu, phi, config)
    r, w = _composite_gauss(_radial_edges(setup), setup.gauss_order)
    _check_budget(r.size * setup.theta_nodes, setup, "2-D polar")
    inner = np.asarray(angular_integral(r, mu, phi, setup.theta_nodes))
    return math.fsum(w * r * inner)


def asymptotic_fit(
    phi: float,
    mus: Sequence[float],
    values: Optional[Sequence[float]] = None,
    config: Optional[IntersectionConfig] = None,
) -> AsymptoticFit:
    """Least-squares fit of c/μ + c0 (cos φ = ±1) or c ln(1/μ) + c0 (otherwise)."""
    mus = np.asarray(mus, dtype=float)
    if mus.size < 3:
        raise IndeterminateError(f"asymptotic fit needs at least 3 gap ratios, got {mus.size}")
    if np.any(mus <= 0):
        raise InvalidArgumentError("gap ratios must be positive")
    if math.log10(mus.max() / mus.min()) < 2 - 1e-9:
        raise IndeterminateError(
            f"gap ratios span {mus.min():.3e}..{mus.max():.3e}, less than two decades"
        )
    if values is None:
        values = [disk_integral(mu, phi, config) for mu in mus]
    values = np.asarray(values, dtype=float)
    if values.shape != mus.shape:
        raise InvalidArgumentError(f"{values.size} values for {mus.size} gap ratios")

    exact = intersection_asymptote(phi)
    model = exact.kind
    basis = 1 / mus if exact.kind is AsymptoteKind.POLE else np.log(1 / mus)
    design = np.column_stack([basis, np.ones_like(mus)])
    (coefficient, intercept), *_ = np.linalg.lstsq(design, values, rcond=None)
    fit = AsymptoticFit(model, float(coefficient), float(intercept), exact, int(mus.size))
    logger.info(
        f"φ = {phi:.6g}: {model.value} fit c = {fit.coefficient:.10g} "
        f"(exact {exact.coefficient:.10g}, rel err {fit.rel_err:.3e})"
    )
    return fit


def sweep(phi: float, mus: Sequence[float], config: Optional[IntersectionConfig] = None) -> IntersectionSweep:
    """Disk integral at each μ with the sweep-wide fit and the exact asymptote."""
    if len(mus) == 0:
        raise InvalidArgumentError("sweep needs at least one gap ratio")
    values = []
    for mu in mus:
        values.append(disk_integral(mu, phi, config))
        logger.debug(f"φ = {phi:.6g}, μ = {mu:.3e}: I = {values[-1]:.15g}")

    exact = intersection_asymptote(phi)
    try:
        fit = asymptotic_fit(phi, mus, values, config)
    except IndeterminateError as e:
        logger.warning(f"no asymptotic fit for this sweep: {e}")
        fit = None

    rows: List[SweepRow] = []
    for mu, value in zip(mus, values):
        target = exact.evaluate(mu)
        rel_err = abs(value - target) / abs(target) if target != 0 else abs(value)
        rows.append(
            SweepRow(
                phi=phi,
                mu=float(mu),
                value=value,
                model=exact.kind,
                coefficient_fit=fit.coefficient if fit else math.nan,
                coefficient_exact=exact.coefficient,
                rel_err=rel_err,
            )
        )
    return IntersectionSweep(tuple(rows), fit)


def _radial_edges(setup: IntersectionConfig) -> np.ndarray:
    """0, μ·2^-k, ..., μ, 2μ, ... up to 1."""
    edges = [0.0]
    r = setup.mu * 2.0 ** -setup.radial_octaves_below
    while r < 1:
        edges.append(r)
        r *= 2
    edges.append(1.0)
    return np.array(edges)


def _composite_gauss(edges: np.ndarray, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on each panel [edges[i], edges[i+1]]."""
    x, w = np.polynomial.legendre.leggauss(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = (hi - lo) / 2
    nodes = lo + half * (x + 1)
    weights = half * w
    return nodes.reshape(-1), weights.reshape(-1)


def _check_budget(nodes: int, setup: IntersectionConfig, name: str) -> None:
    if nodes > setup.max_nodes:
        logger.warning(f"{name} quadrature at μ = {setup.mu:.3e} needs {nodes} nodes")
        raise ResolutionError(
            f"{name} quadrature at μ = {setup.mu:.3e} needs {nodes} nodes, budget is {setup.max_nodes}"
        )


def _squeeze(values: np.ndarray) -> Number:
    values = np.asarray(values)
    return float(values.reshape(-1)[0]) if values.size == 1 else values
