"""Exact reference values used as oracles for the numerics."""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Tuple

import numpy as np

from curverad.errors import DomainError, InvalidArgumentError

PI2 = math.pi**2
POLE_COEFFICIENT = math.pi / math.sqrt(2)

# model selection for the intersection asymptote
SIN_POLE_TOL = 1e-6
COS_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class EllipseShape:
    """Semi-axes a, b of an ellipse; ξ = b/a."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise InvalidArgumentError(f"semi-axes must be positive, got a={self.a}, b={self.b}")

    @property
    def xi(self) -> float:
        return self.b / self.a

    @property
    def n(self) -> float:
        return n_ellipse(self.xi)

    def angular_params(self) -> "AngularIntegralParams":
        return AngularIntegralParams.from_axes(self.a, self.b)


@dataclass(frozen=True)
class AngularIntegralParams:
    """α = (a² - b²)/2, β = (a² + b²)/2 of the angular integrals T and J."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not self.beta > abs(self.alpha):
            raise DomainError(f"angular integrals need β > |α|, got β={self.beta}, α={self.alpha}")

    @classmethod
    def from_axes(cls, a: float, b: float) -> "AngularIntegralParams":
        return cls((a * a - b * b) / 2, (a * a + b * b) / 2)


def n_circle() -> float:
    return 2 * PI2


def n_ellipse(xi: float) -> float:
    """(ξ + 1/ξ)π²; symmetric under ξ ↦ 1/ξ."""
    if not xi > 0:
        raise InvalidArgumentError(f"axis ratio must be positive, got {xi}")
    return (xi + 1 / xi) * PI2


def n_ellipse_axes(a: float, b: float) -> float:
    return EllipseShape(a, b).n


def xi_from_eccentricity(eccentricity: float) -> float:
    """Axis ratio (1 - ε²)^{1/2} of an ellipse with eccentricity ε."""
    if not 0 <= eccentricity < 1:
        raise InvalidArgumentError(f"eccentricity must lie in [0, 1), got {eccentricity}")
    return math.sqrt((1 - eccentricity) * (1 + eccentricity))


def T_integral(beta: float, alpha: float) -> float:
    """∫₀^{2π} du/(β - α cos u) = 2π(β² - α²)^{-1/2}, valid for β > |α|."""
    if not beta > abs(alpha):
        raise DomainError(f"T(β) needs β > |α|, got β={beta}, α={alpha}")
    return 2 * math.pi / math.sqrt((beta - alpha) * (beta + alpha))


def dT_dbeta(beta: float, alpha: float) -> float:
    if not beta > abs(alpha):
        raise DomainError(f"T(β) needs β > |α|, got β={beta}, α={alpha}")
    return -2 * math.pi * beta / ((beta - alpha) * (beta + alpha)) ** 1.5


def J_integral(a: float, b: float) -> float:
    """∫_{-π}^{π} dx/(a² sin²x + b² cos²x)² = π(a² + b²)/(a³b³) = -∂β T."""
    if not (a > 0 and b > 0):
        raise InvalidArgumentError(f"semi-axes must be positive, got a={a}, b={b}")
    return math.pi * (a * a + b * b) / (a**3 * b**3)


class AsymptoteKind(str, Enum):
    POLE = "pole"
    LOG = "log"
    ZERO = "zero"


@dataclass(frozen=True)
class Asymptote:
    kind: AsymptoteKind
    coefficient: float

    def evaluate(self, mu: float) -> float:
        """Leading behaviour of the unit-disk integral at gap ratio μ."""
        if self.kind is AsymptoteKind.POLE:
            return self.coefficient / mu
        if self.kind is AsymptoteKind.LOG:
            return self.coefficient * math.log(1 / mu)
        return 0.0


def intersection_asymptote(
    phi: float, pole_tol: float = SIN_POLE_TOL, zero_tol: float = COS_ZERO_TOL
) -> Asymptote:
    """Small-μ behaviour of the local contribution of two line pieces at angle φ.

    ±π/√2 · 1/μ for cos φ = ±1, π cos φ/|sin φ| · ln(1/μ) otherwise, and
    identically zero for orthogonal pieces.
    """
    c, s = math.cos(phi), math.sin(phi)
    if abs(c) < zero_tol:
        return Asymptote(AsymptoteKind.ZERO, 0.0)
    if abs(s) < pole_tol:
        return Asymptote(AsymptoteKind.POLE, math.copysign(POLE_COEFFICIENT, c))
    return Asymptote(AsymptoteKind.LOG, math.pi * c / abs(s))


def disk_integral_closed(mu: float, phi: float) -> float:
    """Elementary antiderivative of the u-form of the unit-disk integral.

    With k = sin²φ, Q(u) = k u² + 2u + 1 and U = 1/μ² this evaluates
    (π/2) cos φ ∫₀^U (Q^{-1/2} + Q^{-3/2}) du.
    """
    if not mu > 0:
        raise InvalidArgumentError(f"gap ratio must be positive, got {mu}")
    c = math.cos(phi)
    if abs(c) < COS_ZERO_TOL:
        return 0.0
    k = math.sin(phi) ** 2
    u = 1 / (mu * mu)
    root_q = math.sqrt(k * u * u + 2 * u + 1)
    if k == 0:
        first = root_q - 1
    else:
        rk = math.sqrt(k)
        # ln((√k√Q + kU + 1)/(√k + 1)) / √k, written to stay accurate as k → 0
        z = rk * (root_q - 1 + rk * u) / (1 + rk)
        first = math.log1p(z) / rk
    # (kU + 1)/((k - 1)√Q) + 1/(1 - k), rationalised so k → 1 stays finite
    second = u * (k * u + 2) / ((root_q + k * u + 1) * root_q)
    return math.pi / 2 * c * (first + second)


def inverted_circle(center: Sequence[float], radius: float) -> Tuple[np.ndarray, float]:
    """Center and radius of the image of a plane circle under x ↦ x/|x|²."""
    c = np.asarray(center, dtype=float)
    if not radius > 0:
        raise InvalidArgumentError(f"radius must be positive, got {radius}")
    d = radius * radius - float(c @ c)
    if d == 0:
        raise DomainError("the circle passes through the origin; its image is a line")
    return -c / d, radius / abs(d)


def limacon_residual(point: Sequence[float], a: float, b: float) -> float:
    """x²/a² + y²/b² - (x² + y²)², zero on the inversion image of the ellipse."""
    x, y = (float(v) for v in point)
    r2 = x * x + y * y
    return x * x / (a * a) + y * y / (b * b) - r2 * r2
