"""Integrand g(t1, t2) of the photon-number integral in its equivalent forms.

All array helpers broadcast over leading axes, with coordinates on the last
axis, so the same code serves single point pairs and whole grid blocks.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Sequence, Tuple, Union

import numpy as np

from curverad.config import QUADRATURE_CONFIG
from curverad.errors import DomainError, InvalidArgumentError, UnsupportedDimensionError
from curverad.tools.geometry import Curve, CurveJet

logger = logging.getLogger(__name__)

Number = Union[float, np.ndarray]


class KernelForm(str, Enum):
    TRANSVERSE = "transverse"
    CROSS_PRODUCT = "cross_product"
    LOG_DERIVATIVE = "log_derivative"
    DIAGONAL_LIMIT = "diagonal_limit"
    NEAR_DIAGONAL = "near_diagonal"


@dataclass(frozen=True, eq=False)
class KernelValue:
    """Integrand value tagged with the formula that produced it."""

    value: Number
    form: KernelForm

    def __float__(self) -> float:
        return float(self.value)


class LogPartials(NamedTuple):
    """∂1 ln S, ∂2 ln S and ∂1∂2 ln S at a point pair."""

    d1: Number
    d2: Number
    d12: Number


def _dot(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.sum(u * v, axis=-1)


def delta_and_s2(j1: CurveJet, j2: CurveJet) -> Tuple[np.ndarray, Number]:
    """Chord Δ = x1 - x2 and its squared length S²."""
    if j1.dimension != j2.dimension:
        raise InvalidArgumentError(f"jets live in R^{j1.dimension} and R^{j2.dimension}")
    delta = j1.x - j2.x
    return delta, _dot(delta, delta)


def transverse_tangent(j: CurveJet, delta: np.ndarray, s2: Number) -> np.ndarray:
    """Tangent with its component along the chord removed: ẋ - (ẋ·Δ)Δ/S²."""
    s2 = np.asarray(s2, dtype=float)
    if np.any(s2 == 0):
        raise DomainError("transverse tangent is undefined for coincident points; use kernel_diagonal")
    return j.d1 - (_dot(j.d1, delta) / s2)[..., None] * delta


def transverse_values(x1, v1, x2, v2) -> np.ndarray:
    """((ẋ1·ẋ2)S² - (ẋ1·Δ)(ẋ2·Δ))/S⁴ without coincidence checks."""
    delta = x1 - x2
    s2 = _dot(delta, delta)
    return (_dot(v1, v2) * s2 - _dot(v1, delta) * _dot(v2, delta)) / (s2 * s2)


def kernel_transverse(j1: CurveJet, j2: CurveJet) -> KernelValue:
    """g = (ẋᵀ1·ẋᵀ2)/S²."""
    _, s2 = delta_and_s2(j1, j2)
    if np.any(s2 == 0):
        raise DomainError("kernel is undefined for coincident points; use kernel_diagonal")
    return KernelValue(transverse_values(j1.x, j1.d1, j2.x, j2.d1), KernelForm.TRANSVERSE)


def kernel_cross(j1: CurveJet, j2: CurveJet) -> KernelValue:
    """g = (ẋ1×Δ)·(ẋ2×Δ)/S⁴ in R³; plane curves are embedded with z = 0."""
    dim = max(j1.dimension, j2.dimension)
    if dim > 3:
        raise UnsupportedDimensionError(f"the cross-product form needs N <= 3, got N = {dim}")
    j1, j2 = j1.embed(3), j2.embed(3)
    delta, s2 = delta_and_s2(j1, j2)
    if np.any(s2 == 0):
        raise DomainError("kernel is undefined for coincident points; use kernel_diagonal")
    numerator = _dot(np.cross(j1.d1, delta), np.cross(j2.d1, delta))
    return KernelValue(numerator / (s2 * s2), KernelForm.CROSS_PRODUCT)


def log_distance_partials(curve: Curve, t1: Number, t2: Number) -> LogPartials:
    """Analytic partials of ln S from ∂1 ln S² = 2(Δ·ẋ1)/S², ∂2 ln S² = -2(Δ·ẋ2)/S²."""
    j1, j2 = curve.sample(t1), curve.sample(t2)
    delta, s2 = delta_and_s2(j1, j2)
    if np.any(s2 == 0):
        raise DomainError("ln S is singular for coincident parameters")
    p1 = _dot(delta, j1.d1) / s2
    p2 = _dot(delta, j2.d1) / s2
    d12 = -_dot(j1.d1, j2.d1) / s2 + 2 * p1 * p2
    return LogPartials(_squeeze(p1), _squeeze(-p2), _squeeze(d12))


def kernel_log_form(curve: Curve, t1: Number, t2: Number) -> KernelValue:
    """g = -∂1∂2 ln S - (∂1 ln S)(∂2 ln S)."""
    partials = log_distance_partials(curve, t1, t2)
    return KernelValue(-partials.d12 - partials.d1 * partials.d2, KernelForm.LOG_DERIVATIVE)


def diagonal_values(v: np.ndarray, a: np.ndarray) -> np.ndarray:
    """((ẋ·ẍ)² - |ẋ|²|ẍ|²)/(4|ẋ|⁴), i.e. -κ²|ẋ|²/4."""
    vv = _dot(v, v)
    va = _dot(v, a)
    return (va * va - vv * _dot(a, a)) / (4 * vv * vv)


def kernel_diagonal(j: CurveJet) -> KernelValue:
    """Limit of g(t, t + ε) as ε → 0."""
    if np.any(_dot(j.d1, j.d1) == 0):
        raise DomainError("diagonal limit needs a regular jet (ẋ ≠ 0)")
    return KernelValue(diagonal_values(j.d1, j.d2), KernelForm.DIAGONAL_LIMIT)


def near_diagonal_values(v1, a1, v2, a2, eps) -> np.ndarray:
    """g(t, t + ε) from the jets at both ends of a short chord.

    The chord comes from the end-corrected trapezoid rule applied to ẋ, and the
    numerator from the wedge form Σ_{i<j} (ẋ1∧Δ)_ij (ẋ2∧Δ)_ij, so rounding is
    amplified by 1/ε instead of 1/ε².
    """
    eps = np.asarray(eps, dtype=float)
    e = eps[..., None]
    # Δ/ε, exact up to O(ε⁴)
    chord = -((v1 + v2) / 2 + e * (a1 - a2) / 12)
    w1 = v1[..., :, None] * chord[..., None, :] - chord[..., :, None] * v1[..., None, :]
    w2 = v2[..., :, None] * chord[..., None, :] - chord[..., :, None] * v2[..., None, :]
    numerator = 0.5 * np.sum(w1 * w2, axis=(-2, -1))
    s2 = _dot(chord, chord)
    return numerator / (eps * eps * s2 * s2)


def kernel_near_diagonal(
    curve: Curve, t: Number, eps: Number, switch: float = QUADRATURE_CONFIG["near_diagonal_switch"]
) -> KernelValue:
    """g(t, t + ε) for small ε without the cancellation of the direct formula.

    Intended for |ε| < ``switch``; larger offsets still work but the truncation
    error of the chord model grows like ε³.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    eps = np.broadcast_to(np.asarray(eps, dtype=float), t.shape)
    if np.any(np.abs(eps) >= switch):
        logger.debug(f"near-diagonal model used beyond its switch {switch:.3e}")
    j1 = curve.sample(t)
    j2 = curve.sample(t + eps)
    with np.errstate(divide="ignore", invalid="ignore"):
        values = near_diagonal_values(j1.d1, j1.d2, j2.d1, j2.d2, eps)
    on_diagonal = eps == 0
    if np.any(on_diagonal):
        values = np.where(on_diagonal, kernel_diagonal(j1).value, values)
    return KernelValue(_squeeze(values), KernelForm.NEAR_DIAGONAL)


def richardson_limit(values: Sequence[float], step_ratio: float = 2.0) -> float:
    """Limit of f(ε) from samples at ε, ε/r, ε/r², ..., removing one power of ε per level."""
    if not values:
        raise InvalidArgumentError("richardson_limit needs at least one value")
    level = [float(v) for v in values]
    for m in range(1, len(level)):
        mult = step_ratio**m
        level = [(mult * high - low) / (mult - 1) for low, high in zip(level, level[1:])]
    return level[0]


def extrapolated_diagonal(curve: Curve, t: float, eps: float = 1e-2, levels: int = 4) -> float:
    """Diagonal value certified from off-diagonal kernels only, by ε → 0 extrapolation."""
    if levels < 1 or not eps > 0:
        raise InvalidArgumentError(f"need levels >= 1 and eps > 0, got {levels}, {eps}")
    j = curve.jet(t)
    values = [kernel_transverse(j, curve.jet(t + eps / 2**k)).value for k in range(levels)]
    return richardson_limit(values)


def _squeeze(values: np.ndarray) -> Number:
    values = np.asarray(values)
    return float(values.reshape(-1)[0]) if values.size == 1 else values
