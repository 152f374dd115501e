"""Torus quadrature of n_C = -2 ∬ g dt1 dt2 over [-π, π]².

The integrand is smooth and 2π-periodic in both variables, so the equal-weight
product trapezoid rule converges spectrally; refinement is grid doubling only.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from curverad.config import QUADRATURE_CONFIG
from curverad.errors import InvalidArgumentError, NotSimpleCurveError
from curverad.tools.geometry import (
    Curve,
    CurveJet,
    check_simple,
    closest_self_approach,
    diameter,
    parameter_grid,
)
from curverad.tools.kernel import diagonal_values, near_diagonal_values, transverse_values

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class QuadratureConfig:
    initial_grid: int = QUADRATURE_CONFIG["initial_grid"]
    max_grid: int = QUADRATURE_CONFIG["max_grid"]
    rel_tol: float = QUADRATURE_CONFIG["rel_tol"]
    threads: int = QUADRATURE_CONFIG["threads"]
    block_rows: int = QUADRATURE_CONFIG["block_rows"]
    near_diagonal_switch: float = QUADRATURE_CONFIG["near_diagonal_switch"]
    simple_samples: int = QUADRATURE_CONFIG["simple_samples"]
    simple_threshold: float = QUADRATURE_CONFIG["simple_threshold"]

    def __post_init__(self):
        if self.initial_grid < 2:
            raise InvalidArgumentError(f"initial grid must be >= 2, got {self.initial_grid}")
        if self.initial_grid > self.max_grid:
            raise InvalidArgumentError(
                f"initial grid {self.initial_grid} exceeds max grid {self.max_grid}"
            )
        if not self.rel_tol > 0:
            raise InvalidArgumentError(f"tolerance must be positive, got {self.rel_tol}")
        if self.threads < 1 or self.block_rows < 1:
            raise InvalidArgumentError("threads and block_rows must be >= 1")


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    grid: int
    history: Tuple[Tuple[int, float], ...]
    error_estimate: float
    converged: bool

    def to_dict(self) -> dict:
        payload = asdict(self)
        payload["history"] = [list(entry) for entry in self.history]
        return payload


class ConvergenceKind(str, Enum):
    SPECTRAL = "spectral"
    ALGEBRAIC = "algebraic"
    STALLED = "stalled"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class ConvergenceReport:
    kind: ConvergenceKind
    order: Optional[float] = None
    ratios: Tuple[float, ...] = field(default_factory=tuple)


def integrate_torus(f: Callable[[np.ndarray, np.ndarray], np.ndarray], grid: int) -> float:
    """Equal-weight product trapezoid sum of f over the 2-torus.

    ``f`` is called once with broadcastable node arrays of shape (M, 1) and (1, M).
    """
    if grid < 2:
        raise InvalidArgumentError(f"grid must be >= 2, got {grid}")
    ts = parameter_grid(grid)
    values = np.broadcast_to(np.asarray(f(ts[:, None], ts[None, :]), dtype=float), (grid, grid))
    h = TWO_PI / grid
    return h * h * math.fsum(np.sum(values, axis=1))


def _row_sums(jets: CurveJet, rows: range, band: int, h: float) -> np.ndarray:
    """Per-row sums of g for one block of rows of the M×M grid."""
    m = len(jets)
    r = np.arange(rows.start, rows.stop)
    x, v, a = jets.x, jets.d1, jets.d2
    with np.errstate(divide="ignore", invalid="ignore"):
        block = transverse_values(x[r, None, :], v[r, None, :], x[None, :, :], v[None, :, :])
    local = np.arange(len(r))
    block[local, r] = diagonal_values(v[r], a[r])
    for k in range(1, band + 1):
        for offset in (k, -k):
            cols = (r + offset) % m
            block[local, cols] = near_diagonal_values(v[r], a[r], v[cols], a[cols], offset * h)
    return np.sum(block, axis=1)


def photon_number_at_grid(curve: Curve, grid: int, config: Optional[QuadratureConfig] = None) -> float:
    """n_C on one M×M grid, with limit values on and model values next to the diagonal."""
    config = config or QuadratureConfig()
    if grid < 2:
        raise InvalidArgumentError(f"grid must be >= 2, got {grid}")
    h = TWO_PI / grid
    jets = curve.sample(parameter_grid(grid))
    # node offsets k with 0 < k·h < switch, in periodic distance
    band = min(int(math.ceil(config.near_diagonal_switch / h)) - 1, (grid - 1) // 2)
    band = max(band, 0)
    logger.debug(f"grid {grid}: near-diagonal band {band}")
    total = sum_row_blocks(lambda rows: _row_sums(jets, rows, band, h), grid, config)
    return -2 * h * h * total


def sum_row_blocks(row_sums: Callable[[range], np.ndarray], grid: int, config: QuadratureConfig) -> float:
    """Compensated total of per-row sums, computed block by block.

    Blocks are fixed by ``block_rows`` and summed in row order, so the result
    does not depend on the number of threads.
    """
    blocks = [range(s, min(s + config.block_rows, grid)) for s in range(0, grid, config.block_rows)]
    if config.threads > 1 and len(blocks) > 1:
        logger.debug(f"grid {grid}: {len(blocks)} blocks on {config.threads} threads")
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            sums = list(pool.map(row_sums, blocks))
    else:
        sums = [row_sums(rows) for rows in blocks]
    return math.fsum(np.concatenate(sums))


def integrate_n(curve: Curve, config: Optional[QuadratureConfig] = None) -> QuadratureResult:
    """n_C with grid doubling until successive values agree to rel_tol."""
    config = config or QuadratureConfig()
    ratio = check_simple(curve, config.simple_samples)
    width = diameter(curve)
    if not ratio > config.simple_threshold * width:
        raise NotSimpleCurveError(
            f"curve {curve.describe()} is not simple at {config.simple_samples} samples "
            f"(chord/parameter ratio {ratio:.3e}, diameter {width:.3e})"
        )
    chord, t1, t2 = closest_self_approach(curve, config.simple_samples)
    if chord < config.simple_threshold * width:
        raise NotSimpleCurveError(
            f"curve {curve.describe()} comes within {chord:.3e} of itself at t = {t1:.6f}, {t2:.6f} "
            f"(diameter {width:.3e})"
        )

    history: List[Tuple[int, float]] = []
    grid = config.initial_grid
    converged = False
    error = math.nan
    while grid <= config.max_grid:
        value = photon_number_at_grid(curve, grid, config)
        if history:
            error = abs(value - history[-1][1])
            logger.info(f"grid {grid}: n = {value:.15g} (change {error:.3e})")
        else:
            logger.info(f"grid {grid}: n = {value:.15g}")
        history.append((grid, value))
        if len(history) > 1 and error <= config.rel_tol * abs(value):
            converged = True
            break
        grid *= 2

    last_grid, last_value = history[-1]
    if not converged:
        logger.warning(
            f"n did not converge to rel_tol {config.rel_tol:g} by grid {last_grid} "
            f"(last change {error:.3e}) for {curve.describe()}"
        )
    return QuadratureResult(last_value, last_grid, tuple(history), error, converged)


def convergence_order(history: Sequence[Tuple[int, float]]) -> ConvergenceReport:
    """Classify how successive grid doublings approach their limit."""
    if len(history) < 3:
        return ConvergenceReport(ConvergenceKind.INDETERMINATE)
    values = [value for _, value in history]
    diffs = [abs(b - a) for a, b in zip(values, values[1:])]
    floor = 1e-12 * abs(values[-1])

    # differences down to and including the first one at the machine floor
    live: List[float] = []
    for d in diffs:
        live.append(d)
        if d <= floor:
            break
    ratios = tuple(
        a / b if b > 0 else math.inf for a, b in zip(live, live[1:]) if a > floor
    )
    if live[0] <= floor or (ratios and all(r >= 10 for r in ratios) and (live[-1] <= floor or len(ratios) >= 2)):
        return ConvergenceReport(ConvergenceKind.SPECTRAL, None, ratios)
    if ratios:
        last = ratios[-1]
        order = math.log2(last) if last > 0 else -math.inf
        if order > 0.5:
            return ConvergenceReport(ConvergenceKind.ALGEBRAIC, order, ratios)
    return ConvergenceReport(ConvergenceKind.STALLED, None, ratios)
