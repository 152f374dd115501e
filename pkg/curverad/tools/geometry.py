"""Parametric closed curves, their derivative jets and geometric transforms.

Every curve is 2π-periodic in its parameter and evaluates exact analytic jets
(position, first and second derivative). Transformed curves compose jets by the
chain rule; nothing here differentiates numerically.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from curverad.config import GEOMETRY_CONFIG
from curverad.errors import InvalidArgumentError, InversionCenterError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]


@dataclass(frozen=True, eq=False)
class CurveJet:
    """Position and first two derivatives at one parameter, or a batch of them.

    Arrays have shape (N,) for a single point or (M, N) for M samples; the
    coordinate axis is always last.
    """

    x: np.ndarray
    d1: np.ndarray
    d2: np.ndarray

    def __post_init__(self):
        x, d1, d2 = (np.asarray(v, dtype=float) for v in (self.x, self.d1, self.d2))
        if not (x.shape == d1.shape == d2.shape):
            raise InvalidArgumentError(
                f"jet components differ in shape: {x.shape}, {d1.shape}, {d2.shape}"
            )
        if x.ndim == 0 or x.shape[-1] < 2:
            raise InvalidArgumentError(f"jets need dimension >= 2, got shape {x.shape}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "d1", d1)
        object.__setattr__(self, "d2", d2)

    @property
    def dimension(self) -> int:
        return self.x.shape[-1]

    def __len__(self) -> int:
        return 1 if self.x.ndim == 1 else self.x.shape[0]

    def __getitem__(self, index) -> "CurveJet":
        return CurveJet(self.x[index], self.d1[index], self.d2[index])

    def embed(self, dimension: int) -> "CurveJet":
        """Pad with zero coordinates up to the given dimension."""
        extra = dimension - self.dimension
        if extra < 0:
            raise InvalidArgumentError(f"cannot embed dimension {self.dimension} into {dimension}")
        if extra == 0:
            return self
        pad = [(0, 0)] * (self.x.ndim - 1) + [(0, extra)]
        return CurveJet(np.pad(self.x, pad), np.pad(self.d1, pad), np.pad(self.d2, pad))


class CurveKind(str, Enum):
    CIRCLE = "circle"
    ELLIPSE = "ellipse"
    FOURIER = "fourier"
    TRANSFORMED = "transformed"


class TransformKind(str, Enum):
    INVERT = "invert"
    ROTATE = "rotate"
    SCALE = "scale"
    TRANSLATE = "translate"
    REPARAM = "reparam"


Evaluator = Callable[[np.ndarray], CurveJet]


@dataclass(frozen=True, eq=False)
class Curve:
    """A smooth closed curve t ↦ x(t) in R^N, 2π-periodic in t.

    ``evaluator`` maps a 1-D array of parameters to a batched CurveJet. ``params``
    keeps the constructor arguments (axes, base curve, transform) for reporting.
    """

    dimension: int
    evaluator: Evaluator
    kind: CurveKind
    params: Mapping[str, Any] = field(default_factory=dict)

    def sample(self, ts: ArrayLike) -> CurveJet:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        return self.evaluator(ts)

    def jet(self, t: float) -> CurveJet:
        return self.sample(np.array([float(t)]))[0]

    def positions(self, ts: ArrayLike) -> np.ndarray:
        return self.sample(ts).x

    def describe(self) -> str:
        if self.kind is CurveKind.TRANSFORMED:
            return f"{self.params['op']}({self.params['base'].describe()})"
        args = ", ".join(f"{k}={v}" for k, v in self.params.items() if not isinstance(v, FourierCurve))
        return f"{self.kind.value}({args})"


def parameter_grid(samples: int) -> np.ndarray:
    """Uniform nodes t_i = -π + 2πi/M, i = 0..M-1."""
    return -math.pi + 2 * math.pi * np.arange(samples) / samples


def make_ellipse(a: float, b: float, center: Optional[ArrayLike] = None) -> Curve:
    """Ellipse (a cos t, b sin t), optionally shifted to ``center``."""
    if not (a > 0 and b > 0):
        raise InvalidArgumentError(f"ellipse semi-axes must be positive, got a={a}, b={b}")
    offset = _center_vector(center, 2)

    def evaluate(ts: np.ndarray) -> CurveJet:
        c, s = np.cos(ts), np.sin(ts)
        x = np.stack([a * c, b * s], axis=-1) + offset
        d1 = np.stack([-a * s, b * c], axis=-1)
        d2 = np.stack([-a * c, -b * s], axis=-1)
        return CurveJet(x, d1, d2)

    params = {"a": float(a), "b": float(b)}
    if center is not None:
        params["center"] = offset.tolist()
    return Curve(2, evaluate, CurveKind.ELLIPSE, params)


def make_circle(r: float, center: Optional[ArrayLike] = None) -> Curve:
    """Circle of radius r; an ellipse with equal axes."""
    if not r > 0:
        raise InvalidArgumentError(f"circle radius must be positive, got {r}")
    ellipse = make_ellipse(r, r, center)
    params = {"r": float(r)}
    if center is not None:
        params["center"] = ellipse.params["center"]
    return Curve(2, ellipse.evaluator, CurveKind.CIRCLE, params)


@dataclass(frozen=True, eq=False)
class FourierCurve:
    """Finite Fourier series per coordinate.

    ``cos[k, m]`` and ``sin[k, m]`` multiply cos(m t) and sin(m t) in coordinate k.
    """

    cos: np.ndarray
    sin: np.ndarray

    def __post_init__(self):
        cos = _coefficient_matrix(self.cos)
        sin = _coefficient_matrix(self.sin)
        if cos.shape[0] != sin.shape[0]:
            raise InvalidArgumentError(
                f"cos and sin coefficients cover {cos.shape[0]} and {sin.shape[0]} coordinates"
            )
        if cos.shape[0] < 2:
            raise InvalidArgumentError("a Fourier curve needs at least 2 coordinates")
        width = max(cos.shape[1], sin.shape[1])
        object.__setattr__(self, "cos", np.pad(cos, [(0, 0), (0, width - cos.shape[1])]))
        object.__setattr__(self, "sin", np.pad(sin, [(0, 0), (0, width - sin.shape[1])]))

    @property
    def dimension(self) -> int:
        return self.cos.shape[0]

    def evaluate(self, ts: np.ndarray) -> CurveJet:
        m = np.arange(self.cos.shape[1], dtype=float)
        phase = np.outer(ts, m)
        c, s = np.cos(phase), np.sin(phase)
        x = c @ self.cos.T + s @ self.sin.T
        d1 = (s * -m) @ self.cos.T + (c * m) @ self.sin.T
        d2 = (c * -m**2) @ self.cos.T + (s * -m**2) @ self.sin.T
        return CurveJet(x, d1, d2)


def make_fourier(cos: Sequence[Sequence[float]], sin: Sequence[Sequence[float]]) -> Curve:
    series = FourierCurve(cos, sin)
    return Curve(series.dimension, series.evaluate, CurveKind.FOURIER, {"series": series})


@dataclass(frozen=True, eq=False)
class InversionCenter:
    """Center of the inversion x ↦ c + (x - c)/|x - c|²."""

    center: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))

    @classmethod
    def origin(cls, dimension: int) -> "InversionCenter":
        return cls(np.zeros(dimension))


def invert(
    curve: Curve,
    center: Union[InversionCenter, ArrayLike, None] = None,
    clearance: Optional[float] = None,
) -> Curve:
    """Image of the curve under inversion in the unit sphere about ``center``.

    Raises InversionCenterError when the curve comes within
    ``clearance × diameter`` of the center.
    """
    if not isinstance(center, InversionCenter):
        center = InversionCenter(_center_vector(center, curve.dimension))
    c = center.center
    if c.shape != (curve.dimension,):
        raise InvalidArgumentError(
            f"inversion center has shape {c.shape}, curve dimension is {curve.dimension}"
        )
    clearance = GEOMETRY_CONFIG["clearance"] if clearance is None else clearance
    distance, t_closest = min_distance_to_point(curve, c)
    limit = clearance * diameter(curve)
    logger.debug(f"inversion clearance: min |x - c| = {distance:.3e} at t = {t_closest:.6f}, limit {limit:.3e}")
    if distance < limit:
        raise InversionCenterError(
            f"curve passes within {distance:.3e} of the inversion center {c.tolist()} "
            f"(t = {t_closest:.6f}); its image would be unbounded"
        )

    def evaluate(ts: np.ndarray) -> CurveJet:
        base = curve.sample(ts)
        u, du, ddu = base.x - c, base.d1, base.d2
        r2 = np.sum(u * u, axis=-1, keepdims=True)
        r2_1 = 2 * np.sum(u * du, axis=-1, keepdims=True)
        r2_2 = 2 * (np.sum(du * du, axis=-1, keepdims=True) + np.sum(u * ddu, axis=-1, keepdims=True))
        w = 1 / r2
        w1 = -r2_1 / r2**2
        w2 = -r2_2 / r2**2 + 2 * r2_1**2 / r2**3
        return CurveJet(c + u * w, du * w + u * w1, ddu * w + 2 * du * w1 + u * w2)

    return _transformed(curve, evaluate, TransformKind.INVERT, {"center": c.tolist()})


def reparametrize(curve: Curve, phase_amplitude: float) -> Curve:
    """Curve t ↦ x(t + A sin t); a circle diffeomorphism for |A| < 1."""
    amp = float(phase_amplitude)
    if not abs(amp) < 1:
        raise InvalidArgumentError(
            f"|amplitude| must be < 1 for t + A sin t to be a diffeomorphism, got {amp}"
        )

    def evaluate(ts: np.ndarray) -> CurveJet:
        phi = ts + amp * np.sin(ts)
        phi1 = (1 + amp * np.cos(ts))[:, None]
        phi2 = (-amp * np.sin(ts))[:, None]
        base = curve.sample(phi)
        return CurveJet(base.x, base.d1 * phi1, base.d2 * phi1**2 + base.d1 * phi2)

    return _transformed(curve, evaluate, TransformKind.REPARAM, {"amplitude": amp})


def euclidean_transform(
    curve: Curve,
    rotation: Optional[ArrayLike] = None,
    translation: Optional[ArrayLike] = None,
    scale: float = 1.0,
    orthogonality_tol: Optional[float] = None,
) -> Curve:
    """Curve t ↦ scale·R·x(t) + translation."""
    n = curve.dimension
    tol = GEOMETRY_CONFIG["orthogonality_tol"] if orthogonality_tol is None else orthogonality_tol
    rot = np.eye(n) if rotation is None else np.asarray(rotation, dtype=float)
    if rot.shape != (n, n):
        raise InvalidArgumentError(f"rotation must be {n}x{n}, got {rot.shape}")
    defect = np.max(np.abs(rot.T @ rot - np.eye(n)))
    if defect > tol:
        raise InvalidArgumentError(f"rotation is not orthogonal (|RᵀR - I| = {defect:.3e})")
    shift = _center_vector(translation, n)
    if not scale > 0:
        raise InvalidArgumentError(f"scale must be positive, got {scale}")
    linear = scale * rot

    def evaluate(ts: np.ndarray) -> CurveJet:
        base = curve.sample(ts)
        return CurveJet(base.x @ linear.T + shift, base.d1 @ linear.T, base.d2 @ linear.T)

    return _transformed(
        curve,
        evaluate,
        "euclidean",
        {"rotation": rot.tolist(), "translation": shift.tolist(), "scale": float(scale)},
    )


def rotation_matrix(dimension: int, angle: float, plane: Sequence[int] = (0, 1)) -> np.ndarray:
    """Givens rotation by ``angle`` in the coordinate plane ``plane``."""
    i, j = (int(p) for p in plane)
    if i == j or not (0 <= i < dimension and 0 <= j < dimension):
        raise InvalidArgumentError(f"rotation plane {list(plane)} is invalid in dimension {dimension}")
    rot = np.eye(dimension)
    c, s = math.cos(angle), math.sin(angle)
    rot[i, i], rot[i, j], rot[j, i], rot[j, j] = c, -s, s, c
    return rot


def apply_transform(curve: Curve, kind: Union[TransformKind, str], params: Any = None) -> Curve:
    """Apply one named transform; ``params`` follows the curve-spec op syntax."""
    try:
        kind = TransformKind(kind)
    except ValueError:
        raise InvalidArgumentError(
            f"unknown transform {kind!r}; expected one of {[k.value for k in TransformKind]}"
        )
    params = {} if params is None else params
    try:
        return _apply_transform(curve, kind, params)
    except InvalidArgumentError:
        raise
    except (TypeError, ValueError) as e:
        raise InvalidArgumentError(f"bad {kind.value} parameters {params!r}: {e}")


def _apply_transform(curve: Curve, kind: TransformKind, params: Any) -> Curve:
    if kind is TransformKind.INVERT:
        center = params.get("center") if isinstance(params, Mapping) else params
        return invert(curve, center)
    if kind is TransformKind.REPARAM:
        amplitude = params.get("amplitude") if isinstance(params, Mapping) else params
        if amplitude is None:
            raise InvalidArgumentError("reparam needs an amplitude")
        return reparametrize(curve, float(amplitude))
    if kind is TransformKind.SCALE:
        factor = params.get("factor") if isinstance(params, Mapping) else params
        if factor is None:
            raise InvalidArgumentError("scale needs a factor")
        return euclidean_transform(curve, scale=float(factor))
    if kind is TransformKind.TRANSLATE:
        shift = params.get("vector") if isinstance(params, Mapping) else params
        if shift is None:
            raise InvalidArgumentError("translate needs a vector")
        return euclidean_transform(curve, translation=shift)

    # rotate
    if isinstance(params, Mapping) and "matrix" in params:
        return euclidean_transform(curve, rotation=params["matrix"])
    angle = params.get("angle") if isinstance(params, Mapping) else params
    if angle is None:
        raise InvalidArgumentError("rotate needs an angle or a matrix")
    plane = params.get("plane", (0, 1)) if isinstance(params, Mapping) else (0, 1)
    return euclidean_transform(curve, rotation=rotation_matrix(curve.dimension, float(angle), plane))


def diameter(curve: Curve, samples: Optional[int] = None) -> float:
    """Largest sampled chord."""
    samples = GEOMETRY_CONFIG["diameter_samples"] if samples is None else samples
    x = curve.positions(parameter_grid(samples))
    widest = 0.0
    for start in range(0, samples, 64):
        chord = x[start:start + 64, None, :] - x[None, :, :]
        widest = max(widest, float(np.sqrt(np.max(np.sum(chord * chord, axis=-1)))))
    return widest


def min_distance_to_point(
    curve: Curve, point: ArrayLike, samples: Optional[int] = None
) -> Tuple[float, float]:
    """Distance from ``point`` to the curve and the parameter where it is attained."""
    samples = GEOMETRY_CONFIG["clearance_samples"] if samples is None else samples
    p = np.asarray(point, dtype=float)
    ts = parameter_grid(samples)
    dist2 = np.sum((curve.positions(ts) - p) ** 2, axis=-1)
    k = int(np.argmin(dist2))
    h = 2 * math.pi / samples

    def squared(t: float) -> float:
        return float(np.sum((curve.jet(t).x - p) ** 2))

    refined = minimize_scalar(squared, bounds=(ts[k] - h, ts[k] + h), method="bounded",
                              options={"xatol": 1e-14})
    if refined.success and refined.fun < dist2[k]:
        return math.sqrt(max(refined.fun, 0.0)), float(refined.x)
    return math.sqrt(dist2[k]), float(ts[k])


def check_simple(curve: Curve, samples: Optional[int] = None) -> float:
    """Smallest ratio of chord length to torus parameter distance over sample pairs.

    A clearly positive value certifies the curve is simple at this resolution; a
    value near zero exposes a (near) self-intersection.
    """
    samples = GEOMETRY_CONFIG["check_simple_samples"] if samples is None else samples
    if samples < 16:
        raise InvalidArgumentError(f"check_simple needs at least 16 samples, got {samples}")
    ts = parameter_grid(samples)
    x = curve.positions(ts)
    worst = math.inf
    for start in range(0, samples, 64):
        rows = slice(start, start + 64)
        chord = np.sqrt(np.sum((x[rows, None, :] - x[None, :, :]) ** 2, axis=-1))
        gap = np.abs(ts[rows, None] - ts[None, :])
        gap = np.minimum(gap, 2 * math.pi - gap)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(gap > 0, chord / gap, np.inf)
        worst = min(worst, float(np.min(ratio)))
    return worst


def closest_self_approach(
    curve: Curve, samples: Optional[int] = None, candidates: Optional[int] = None
) -> Tuple[float, float, float]:
    """Shortest chord between parameters at least a few grid steps apart, refined off the grid.

    The ``candidates`` sample pairs with the smallest chord/parameter-distance
    ratio seed a bounded minimisation of S²(t1, t2) within one grid step, so a
    crossing between nodes is found rather than bounded by the grid spacing.
    Returns (chord, t1, t2).
    """
    samples = GEOMETRY_CONFIG["check_simple_samples"] if samples is None else samples
    candidates = GEOMETRY_CONFIG["self_approach_candidates"] if candidates is None else candidates
    min_steps = GEOMETRY_CONFIG["self_approach_min_steps"]
    if samples < 16 or candidates < 1:
        raise InvalidArgumentError(f"need samples >= 16 and candidates >= 1, got {samples}, {candidates}")
    ts = parameter_grid(samples)
    h = 2 * math.pi / samples
    x = curve.positions(ts)
    nodes = np.arange(samples)

    seeds = []
    for start in range(0, samples, 64):
        rows = nodes[start:start + 64]
        chord = np.sqrt(np.sum((x[rows, None, :] - x[None, :, :]) ** 2, axis=-1))
        steps = np.abs(rows[:, None] - nodes[None, :])
        steps = np.minimum(steps, samples - steps)
        # each unordered pair once, far enough from the diagonal that the boxes stay off it
        keep = (steps >= min_steps) & (rows[:, None] < nodes[None, :])
        ratio = np.where(keep, chord / np.maximum(steps, 1) / h, np.inf).ravel()
        count = min(candidates, ratio.size)
        for k in np.argpartition(ratio, count - 1)[:count]:
            if np.isfinite(ratio[k]):
                seeds.append((ratio[k], rows[k // samples], k % samples))
    seeds.sort()

    def squared(p: np.ndarray) -> Tuple[float, np.ndarray]:
        jets = curve.sample(p)
        delta = jets.x[0] - jets.x[1]
        return float(delta @ delta), np.array([2 * delta @ jets.d1[0], -2 * delta @ jets.d1[1]])

    best = (math.inf, math.nan, math.nan)
    for _, i, j in seeds[:candidates]:
        start = np.array([ts[i], ts[j]])
        grid_chord = float(np.linalg.norm(x[i] - x[j]))
        if grid_chord < best[0]:
            best = (grid_chord, float(ts[i]), float(ts[j]))
        refined = minimize(squared, start, jac=True, method="L-BFGS-B",
                           bounds=[(ts[i] - h, ts[i] + h), (ts[j] - h, ts[j] + h)],
                           options={"ftol": 0.0, "gtol": 1e-14, "maxiter": 200})
        chord = math.sqrt(max(float(refined.fun), 0.0))
        if chord < best[0]:
            best = (chord, float(refined.x[0]), float(refined.x[1]))
    logger.debug(f"closest self-approach of {curve.describe()}: {best[0]:.3e} at t = {best[1]:.6f}, {best[2]:.6f}")
    return best


def _transformed(base: Curve, evaluate: Evaluator, op: Union[TransformKind, str], args: Dict[str, Any]) -> Curve:
    name = op.value if isinstance(op, TransformKind) else op
    return Curve(base.dimension, evaluate, CurveKind.TRANSFORMED, {"base": base, "op": name, "args": args})


def _center_vector(value: Optional[ArrayLike], dimension: int) -> np.ndarray:
    if value is None:
        return np.zeros(dimension)
    vec = np.asarray(value, dtype=float).reshape(-1)
    if vec.shape != (dimension,):
        raise InvalidArgumentError(f"expected a vector of length {dimension}, got {vec.tolist()}")
    return vec


def _coefficient_matrix(rows: Any) -> np.ndarray:
    if isinstance(rows, np.ndarray):
        return np.atleast_2d(rows.astype(float))
    rows = [list(r) for r in rows]
    width = max((len(r) for r in rows), default=0)
    if width == 0:
        raise InvalidArgumentError("Fourier coefficient lists are empty")
    return np.array([r + [0.0] * (width - len(r)) for r in rows], dtype=float)
