import math

import numpy as np
import pytest

from curverad.errors import DomainError, UnsupportedDimensionError
from curverad.tools.geometry import CurveJet, make_circle, make_fourier
from curverad.tools.kernel import (
    KernelForm,
    delta_and_s2,
    extrapolated_diagonal,
    kernel_cross,
    kernel_diagonal,
    kernel_log_form,
    kernel_near_diagonal,
    kernel_transverse,
    log_distance_partials,
    richardson_limit,
    transverse_tangent,
)


def _separated_pairs(n, seed=3, min_gap=0.1):
    rng = np.random.default_rng(seed)
    t1 = rng.uniform(-math.pi, math.pi, 2 * n)
    t2 = rng.uniform(-math.pi, math.pi, 2 * n)
    gap = np.abs(np.remainder(t1 - t2 + math.pi, 2 * math.pi) - math.pi)
    keep = gap > min_gap
    return t1[keep][:n], t2[keep][:n]


def test_delta_and_s2_on_the_ellipse(ellipse21):
    t1, t2 = 0.7, -1.9
    _, s2 = delta_and_s2(ellipse21.jet(t1), ellipse21.jet(t2))
    sigma, delta = (t1 + t2) / 2, t1 - t2
    expected = 4 * math.sin(delta / 2) ** 2 * (4 * math.sin(sigma) ** 2 + math.cos(sigma) ** 2)
    assert s2 == pytest.approx(expected, rel=1e-14)


def test_antipodal_points_of_the_unit_circle(unit_circle):
    delta, s2 = delta_and_s2(unit_circle.jet(0.0), unit_circle.jet(math.pi))
    assert s2 == pytest.approx(4.0)
    np.testing.assert_allclose(delta, [2.0, 0.0], atol=1e-15)


def test_transverse_tangent_is_orthogonal_to_the_chord(ellipse21):
    j1, j2 = ellipse21.jet(0.4), ellipse21.jet(2.5)
    delta, s2 = delta_and_s2(j1, j2)
    tangent = transverse_tangent(j1, delta, s2)
    assert abs(tangent @ delta) <= 1e-14 * np.linalg.norm(j1.d1) * np.linalg.norm(delta)
    with pytest.raises(DomainError):
        transverse_tangent(j1, np.zeros(2), 0.0)


def test_transverse_tangent_limits():
    along = CurveJet([0.0, 0.0], [1.0, 0.0], [0.0, 0.0])
    np.testing.assert_allclose(transverse_tangent(along, np.array([2.0, 0.0]), 4.0), [0.0, 0.0])
    np.testing.assert_allclose(transverse_tangent(along, np.array([0.0, 2.0]), 4.0), [1.0, 0.0])


def test_unit_circle_kernel_is_constant(unit_circle):
    t1, t2 = _separated_pairs(200)
    value = kernel_transverse(unit_circle.sample(t1), unit_circle.sample(t2))
    assert value.form is KernelForm.TRANSVERSE
    np.testing.assert_allclose(value.value, -0.25, rtol=1e-12)


def test_ellipse_kernel_depends_on_the_mean_angle_only(ellipse21):
    t1, t2 = _separated_pairs(200)
    value = kernel_transverse(ellipse21.sample(t1), ellipse21.sample(t2)).value
    sigma = (t1 + t2) / 2
    expected = -4 / (4 * (4 * np.sin(sigma) ** 2 + np.cos(sigma) ** 2) ** 2)
    np.testing.assert_allclose(value, expected, rtol=1e-10)


def test_kernel_forms_agree_on_random_pairs(ellipse21):
    t1, t2 = _separated_pairs(10_000)
    j1, j2 = ellipse21.sample(t1), ellipse21.sample(t2)
    transverse = kernel_transverse(j1, j2).value
    np.testing.assert_allclose(kernel_cross(j1, j2).value, transverse, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(kernel_log_form(ellipse21, t1, t2).value, transverse, rtol=1e-9, atol=1e-12)


def test_kernel_forms_agree_in_three_dimensions(fourier_curve):
    t1, t2 = _separated_pairs(500, seed=11)
    j1, j2 = fourier_curve.sample(t1), fourier_curve.sample(t2)
    transverse = kernel_transverse(j1, j2).value
    np.testing.assert_allclose(kernel_cross(j1, j2).value, transverse, rtol=1e-9, atol=1e-12)


def test_kernel_is_symmetric(ellipse21):
    t1, t2 = _separated_pairs(100)
    a = kernel_transverse(ellipse21.sample(t1), ellipse21.sample(t2)).value
    b = kernel_transverse(ellipse21.sample(t2), ellipse21.sample(t1)).value
    np.testing.assert_array_equal(a, b)


def test_orthogonal_tangents_give_zero():
    j1 = CurveJet([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0])
    j2 = CurveJet([0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0])
    assert kernel_transverse(j1, j2).value == 0.0


def test_coincident_points_are_rejected(ellipse21):
    j = ellipse21.jet(0.3)
    with pytest.raises(DomainError):
        kernel_transverse(j, j)
    with pytest.raises(DomainError):
        kernel_log_form(ellipse21, 0.3, 0.3)


def test_cross_form_needs_three_dimensions_or_fewer():
    curve = make_fourier([[0, 1], [0], [0], [0, 0, 0.1]], [[0], [0, 1], [0, 0, 0.1], [0]])
    with pytest.raises(UnsupportedDimensionError):
        kernel_cross(curve.jet(0.1), curve.jet(1.0))


def test_mixed_log_partial_matches_finite_differences(ellipse21):
    t1, t2, h = 0.5, 2.0, 1e-4

    def log_s(a, b):
        return 0.5 * math.log(delta_and_s2(ellipse21.jet(a), ellipse21.jet(b))[1])

    fd = (log_s(t1 + h, t2 + h) - log_s(t1 + h, t2 - h) - log_s(t1 - h, t2 + h) + log_s(t1 - h, t2 - h)) / (4 * h * h)
    assert log_distance_partials(ellipse21, t1, t2).d12 == pytest.approx(fd, rel=1e-6)


def test_diagonal_limits():
    assert kernel_diagonal(make_circle(1.0).jet(0.3)).value == pytest.approx(-0.25)
    line = CurveJet([0.0, 0.0], [1.0, 2.0], [0.0, 0.0])
    assert kernel_diagonal(line).value == 0.0
    with pytest.raises(DomainError):
        kernel_diagonal(CurveJet([0.0, 0.0], [0.0, 0.0], [1.0, 0.0]))


def test_ellipse_diagonal_at_the_major_vertex(ellipse21):
    # curvature a/b² = 2 with |ẋ| = 1
    assert kernel_diagonal(ellipse21.jet(0.0)).value == pytest.approx(-1.0)


@pytest.mark.parametrize("curve_name", ["unit_circle", "ellipse21", "fourier_curve"])
def test_diagonal_limit_matches_richardson_extrapolation(curve_name, request):
    curve = request.getfixturevalue(curve_name)
    for t in (-2.5, -0.4, 0.0, 1.1, 2.9):
        expected = extrapolated_diagonal(curve, t)
        assert kernel_diagonal(curve.jet(t)).value == pytest.approx(expected, abs=1e-8)


def test_richardson_limit_removes_polynomial_terms():
    values = [3.0 + 2 * e - 5 * e**2 + e**3 for e in (0.1, 0.05, 0.025, 0.0125)]
    assert richardson_limit(values) == pytest.approx(3.0, abs=1e-13)


def test_near_diagonal_model(ellipse21, unit_circle):
    assert kernel_near_diagonal(ellipse21, 0.7, 0.0).value == pytest.approx(kernel_diagonal(ellipse21.jet(0.7)).value)
    np.testing.assert_allclose(kernel_near_diagonal(unit_circle, np.linspace(-3, 3, 7), 1e-4).value, -0.25, rtol=1e-9)
    value = kernel_near_diagonal(ellipse21, 0.7, 1e-2)
    assert value.form is KernelForm.NEAR_DIAGONAL
    direct = kernel_transverse(ellipse21.jet(0.7), ellipse21.jet(0.71)).value
    assert value.value == pytest.approx(direct, rel=1e-7)


def test_near_diagonal_model_stays_accurate_where_direct_evaluation_cancels(ellipse21):
    eps = 1e-6
    expected = kernel_diagonal(ellipse21.jet(0.7)).value
    assert kernel_near_diagonal(ellipse21, 0.7, eps).value == pytest.approx(expected, abs=1e-5)


def test_kernel_approaches_the_diagonal_linearly(ellipse21):
    t = 0.7
    eps = np.geomspace(1e-3, 1e-1, 5)
    diagonal = kernel_diagonal(ellipse21.jet(t)).value
    gap = np.abs(kernel_transverse(ellipse21.sample(np.full(5, t)), ellipse21.sample(t + eps)).value - diagonal)
    slope = np.polyfit(np.log(eps), np.log(gap), 1)[0]
    assert slope == pytest.approx(1.0, abs=0.1)
