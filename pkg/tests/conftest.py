"""Shared fixtures: the reference curves used across the suite."""
import math
import os
import sys

_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, _ROOT)

import numpy as np
import pytest

from curverad.tools.geometry import make_circle, make_ellipse, make_fourier


@pytest.fixture
def unit_circle():
    return make_circle(1.0)


@pytest.fixture
def ellipse21():
    return make_ellipse(2.0, 1.0)


@pytest.fixture
def fourier_curve():
    """A unit circle in the xy-plane with small random harmonics 2..4 in all of x, y, z."""
    rng = np.random.default_rng(7)
    noise = 0.01 * rng.standard_normal((2, 3, 3))
    cos = [[0.0, 1.0, *noise[0, 0]], [0.0, 0.0, *noise[0, 1]], [0.0, 0.0, *noise[0, 2]]]
    sin = [[0.0, 0.0, *noise[1, 0]], [0.0, 1.0, *noise[1, 1]], [0.0, 0.0, 0.1 + noise[1, 2, 0], *noise[1, 2, 1:]]]
    return make_fourier(cos, sin)


@pytest.fixture
def figure_eight():
    """(sin t, sin 2t): crosses itself at the origin for t = 0 and t = ±π."""
    return make_fourier([[0.0], [0.0]], [[0.0, 1.0], [0.0, 0.0, 1.0]])


@pytest.fixture
def shifted_figure_eight():
    """(sin(t + 0.01), sin 2(t + 0.01)): the crossing at t = -0.01, π - 0.01 falls between grid nodes."""
    return make_fourier(
        [[0.0, math.sin(0.01)], [0.0, 0.0, math.sin(0.02)]],
        [[0.0, math.cos(0.01)], [0.0, 0.0, math.cos(0.02)]],
    )
