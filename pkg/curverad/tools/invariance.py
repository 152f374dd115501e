"""Numerical checks that n_C is unchanged under reparametrization, Euclidean
motions, scaling and inversion, and that the inversion correction integrates to zero.

Under x ↦ x/|x|² the kernel picks up the correction

    I(t1, t2) = -p1 p2 + p1 ∂2 ln S + p2 ∂1 ln S,   p = (x·ẋ)/|x|² = f′/2,

with f = ln(x·x), so inversion invariance of n is the statement ∬ I = 0.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional, Sequence, Tuple, Union

import numpy as np

from curverad.config import GEOMETRY_CONFIG, INVARIANCE_CONFIG
from curverad.errors import DomainError, InvalidArgumentError, InversionCenterError
from curverad.tools.geometry import (
    Curve,
    CurveJet,
    TransformKind,
    apply_transform,
    diameter,
    invert,
    min_distance_to_point,
    parameter_grid,
)
from curverad.tools.kernel import kernel_transverse
from curverad.tools.quadrature import QuadratureConfig, integrate_n, sum_row_blocks

logger = logging.getLogger(__name__)

TransformOp = Tuple[Union[TransformKind, str], Any]


class ITerms(str, Enum):
    ALL = "all"
    PRODUCT = "product"
    LOG = "log"


@dataclass(frozen=True)
class InvarianceReport:
    transform: str
    n_before: float
    n_after: float
    abs_dev: float
    rel_dev: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "transform": self.transform,
            "n_before": self.n_before,
            "n_after": self.n_after,
            "abs_dev": self.abs_dev,
            "rel_dev": self.rel_dev,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass(frozen=True, eq=False)
class IIntegrandContext:
    """f = ln(x·x) and its first two derivatives along the curve."""

    f: np.ndarray
    f1: np.ndarray
    f2: np.ndarray

    @classmethod
    def from_jets(cls, jets: CurveJet) -> "IIntegrandContext":
        x, v, a = jets.x, jets.d1, jets.d2
        r2 = np.sum(x * x, axis=-1)
        f1 = 2 * np.sum(x * v, axis=-1) / r2
        f2 = 2 * (np.sum(v * v, axis=-1) + np.sum(x * a, axis=-1)) / r2 - f1 * f1
        return cls(np.log(r2), f1, f2)

    @property
    def p(self) -> np.ndarray:
        return self.f1 / 2


@dataclass(frozen=True)
class KernelShift:
    g_original: float
    g_inverted: float
    i_value: float

    @property
    def residual(self) -> float:
        """g_inverted - g_original - I, zero up to rounding."""
        return self.g_inverted - self.g_original - self.i_value


@dataclass(frozen=True)
class IIntegralCheck:
    value: float
    n_reference: float
    threshold: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "n_reference": self.n_reference,
            "threshold": self.threshold,
            "pass": self.passed,
        }


def check_invariance(
    curve: Curve,
    transform: Union[TransformKind, str],
    params: Any = None,
    tol: Optional[float] = None,
    config: Optional[QuadratureConfig] = None,
) -> InvarianceReport:
    """Compare n before and after one transform at the same quadrature settings."""
    return check_composite_invariance(curve, [(transform, params)], tol, config)


def check_composite_invariance(
    curve: Curve,
    ops: Sequence[TransformOp],
    tol: Optional[float] = None,
    config: Optional[QuadratureConfig] = None,
) -> InvarianceReport:
    """Compare n before and after a chain of transforms applied left to right."""
    if not ops:
        raise InvalidArgumentError("at least one transform is required")
    tol = INVARIANCE_CONFIG["tolerance"] if tol is None else tol
    if not tol > 0:
        raise InvalidArgumentError(f"tolerance must be positive, got {tol}")

    transformed = curve
    labels = []
    for kind, params in ops:
        transformed = apply_transform(transformed, kind, params)
        labels.append(_describe_op(kind, params))
    label = " ∘ ".join(reversed(labels))

    before = integrate_n(curve, config)
    after = integrate_n(transformed, config)
    for name, result in (("original", before), ("transformed", after)):
        if not result.converged:
            logger.warning(f"{name} curve did not converge; invariance verdict for {label} is unreliable")

    abs_dev = abs(after.value - before.value)
    rel_dev = abs_dev / abs(before.value) if before.value != 0 else abs_dev
    passed = rel_dev <= tol
    logger.info(f"{label}: n {before.value:.15g} -> {after.value:.15g}, rel dev {rel_dev:.3e}")
    return InvarianceReport(label, before.value, after.value, abs_dev, rel_dev, tol, passed)


def r_diagonal(curve: Curve, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Continuous extension of R = f′(t1)∂2K + f′(t2)∂1K, K = ln S², at t1 = t2 = t."""
    jets = curve.sample(t)
    context = IIntegrandContext.from_jets(jets)
    values = _r_diagonal_values(jets, context)
    return float(values[0]) if values.size == 1 else values


def i_integral(
    curve: Curve,
    grid: Optional[int] = None,
    terms: Union[ITerms, str] = ITerms.ALL,
    config: Optional[QuadratureConfig] = None,
) -> float:
    """Torus quadrature of I, or of its product or log-derivative part alone.

    The diagonal holds the limit -p² + R(t, t)/4.
    """
    grid = INVARIANCE_CONFIG["i_integral_grid"] if grid is None else grid
    if grid < 2:
        raise InvalidArgumentError(f"grid must be >= 2, got {grid}")
    try:
        terms = ITerms(terms)
    except ValueError:
        raise InvalidArgumentError(f"unknown terms {terms!r}; expected one of {[t.value for t in ITerms]}")
    config = config or QuadratureConfig()
    _require_origin_clearance(curve)

    h = 2 * math.pi / grid
    jets = curve.sample(parameter_grid(grid))
    context = IIntegrandContext.from_jets(jets)
    r_diag = _r_diagonal_values(jets, context)
    total = sum_row_blocks(lambda rows: _i_row_sums(jets, context, r_diag, rows, terms), grid, config)
    value = h * h * total
    logger.info(f"I-integral ({terms.value}) at grid {grid}: {value:.3e}")
    return value


def verify_i_integral(
    curve: Curve,
    grid: Optional[int] = None,
    rel_tol: Optional[float] = None,
    config: Optional[QuadratureConfig] = None,
) -> IIntegralCheck:
    """Pass when |∬ I| <= rel_tol · |n|."""
    rel_tol = INVARIANCE_CONFIG["i_integral_rel_tol"] if rel_tol is None else rel_tol
    value = i_integral(curve, grid, ITerms.ALL, config)
    n_reference = integrate_n(curve, config).value
    threshold = rel_tol * abs(n_reference)
    return IIntegralCheck(value, n_reference, threshold, abs(value) <= threshold)


def kernel_shift_under_inversion(curve: Curve, t1: float, t2: float) -> KernelShift:
    """Kernel of the curve and of its inversion about the origin at one parameter pair."""
    if math.isclose(math.remainder(t1 - t2, 2 * math.pi), 0.0, abs_tol=1e-15):
        raise DomainError(f"kernel shift needs distinct parameters, got t1 = t2 = {t1}")
    image = invert(curve)
    g_original = kernel_transverse(curve.jet(t1), curve.jet(t2)).value
    g_inverted = kernel_transverse(image.jet(t1), image.jet(t2)).value

    jets = curve.sample([t1, t2])
    context = IIntegrandContext.from_jets(jets)
    x, v = jets.x, jets.d1
    delta = x[0] - x[1]
    s2 = float(delta @ delta)
    d1 = float(delta @ v[0]) / s2
    d2 = -float(delta @ v[1]) / s2
    p1, p2 = context.p
    i_value = -p1 * p2 + p1 * d2 + p2 * d1
    return KernelShift(float(g_original), float(g_inverted), float(i_value))


def _r_diagonal_values(jets: CurveJet, context: IIntegrandContext) -> np.ndarray:
    v, a = jets.d1, jets.d2
    ratio = np.sum(v * a, axis=-1) / np.sum(v * v, axis=-1)
    return -2 * context.f2 + 2 * context.f1 * ratio


def _i_row_sums(
    jets: CurveJet, context: IIntegrandContext, r_diag: np.ndarray, rows: range, terms: ITerms
) -> np.ndarray:
    r = np.arange(rows.start, rows.stop)
    local = np.arange(len(r))
    p1 = context.p[r, None]
    p2 = context.p[None, :]
    block = np.zeros((len(r), len(context.p)))

    if terms is not ITerms.LOG:
        block -= p1 * p2
    if terms is not ITerms.PRODUCT:
        x, v = jets.x, jets.d1
        delta = x[r, None, :] - x[None, :, :]
        s2 = np.sum(delta * delta, axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            d1 = np.sum(delta * v[r, None, :], axis=-1) / s2
            d2 = -np.sum(delta * v[None, :, :], axis=-1) / s2
            log_part = p1 * d2 + p2 * d1
        log_part[local, r] = r_diag[r] / 4
        block += log_part
    return np.sum(block, axis=1)


def _require_origin_clearance(curve: Curve) -> None:
    distance, t = min_distance_to_point(curve, np.zeros(curve.dimension))
    limit = GEOMETRY_CONFIG["clearance"] * diameter(curve)
    if distance < limit:
        raise InversionCenterError(
            f"curve passes within {distance:.3e} of the origin (t = {t:.6f}); f = ln(x·x) is singular"
        )


def _describe_op(kind: Union[TransformKind, str], params: Any) -> str:
    name = kind.value if isinstance(kind, TransformKind) else str(kind)
    if params is None:
        return name
    if isinstance(params, dict):
        args = ", ".join(f"{k}={v}" for k, v in params.items())
    else:
        args = str(params)
    return f"{name}({args})"
