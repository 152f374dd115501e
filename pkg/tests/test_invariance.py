import math

import numpy as np
import pytest

from curverad.errors import DomainError, InvalidArgumentError, InversionCenterError
from curverad.tools.geometry import euclidean_transform, make_circle, make_ellipse
from curverad.tools.invariance import (
    IIntegrandContext,
    ITerms,
    check_composite_invariance,
    check_invariance,
    i_integral,
    kernel_shift_under_inversion,
    r_diagonal,
    verify_i_integral,
)
from curverad.tools.kernel import log_distance_partials

TWO_PI_SQUARED = 2 * math.pi**2


@pytest.fixture
def translated_circle():
    return make_circle(1.0, center=[3.0, 0.0])


@pytest.fixture
def translated_ellipse():
    return make_ellipse(2.0, 1.0, center=[5.0, 1.0])


def test_inverted_ellipse_keeps_its_value(ellipse21):
    report = check_invariance(ellipse21, "invert", {"center": [0.0, 0.0]}, tol=1e-6)
    assert report.passed
    assert report.n_before == pytest.approx(2.5 * math.pi**2, rel=1e-10)
    assert report.rel_dev <= 1e-6


def test_inverted_circle_keeps_two_pi_squared(translated_circle):
    report = check_invariance(translated_circle, "invert", [0.0, 0.0])
    assert report.n_before == pytest.approx(TWO_PI_SQUARED, rel=1e-10)
    assert report.n_after == pytest.approx(TWO_PI_SQUARED, rel=1e-10)


@pytest.mark.parametrize(
    "transform, params",
    [
        ("reparam", {"amplitude": 0.3}),
        ("rotate", {"angle": math.pi / 2}),
        ("scale", 7),
        ("scale", 3),
        ("translate", [5.0, 1.0]),
    ],
)
def test_ellipse_invariances(ellipse21, transform, params):
    report = check_invariance(ellipse21, transform, params, tol=1e-8)
    assert report.passed, report.to_dict()
    assert report.abs_dev >= 0 and report.rel_dev >= 0


def test_circle_reparametrization(unit_circle):
    assert check_invariance(unit_circle, "reparam", 0.3, tol=1e-8).passed


def test_composite_transform_stays_within_twice_the_tolerance(ellipse21):
    ops = [("scale", 2.0), ("rotate", {"angle": 0.7}), ("invert", {"center": [0.3, 0.1]})]
    report = check_composite_invariance(ellipse21, ops, tol=2e-6)
    assert report.passed
    assert report.transform.startswith("invert")


def test_report_serialization(ellipse21):
    payload = check_invariance(ellipse21, "scale", 3).to_dict()
    assert set(payload) == {"transform", "n_before", "n_after", "abs_dev", "rel_dev", "tolerance", "pass"}
    assert payload["pass"] is True


def test_invalid_transform_parameters_propagate(ellipse21):
    with pytest.raises(InvalidArgumentError):
        check_invariance(ellipse21, "reparam", {"amplitude": 1.5})
    with pytest.raises(InvalidArgumentError):
        check_composite_invariance(ellipse21, [])
    with pytest.raises(InversionCenterError):
        check_invariance(make_circle(1.0, center=[1.0, 0.0]), "invert")


def test_kernel_shift_identity():
    curve = make_circle(1.0, center=[0.3, 1.7])
    for t1, t2 in [(0.4, 2.1), (-2.0, 1.0), (3.0, -3.0)]:
        shift = kernel_shift_under_inversion(curve, t1, t2)
        assert abs(shift.residual) <= 1e-10
    with pytest.raises(DomainError):
        kernel_shift_under_inversion(curve, 0.5, 0.5)


def test_kernel_shift_vanishes_when_radial_speed_is_zero():
    # x·ẋ = 0 everywhere on a circle about the origin
    shift = kernel_shift_under_inversion(make_circle(2.0), 0.3, 1.9)
    assert shift.i_value == pytest.approx(0.0, abs=1e-15)
    assert shift.g_inverted == pytest.approx(shift.g_original, rel=1e-12)


def test_context_of_a_centered_circle():
    context = IIntegrandContext.from_jets(make_circle(2.0).sample(np.linspace(-3, 3, 5)))
    np.testing.assert_allclose(context.f, 2 * math.log(2.0))
    np.testing.assert_allclose(context.f1, 0.0, atol=1e-14)
    np.testing.assert_allclose(context.f2, 0.0, atol=1e-14)


@pytest.mark.parametrize("curve_name", ["translated_circle", "translated_ellipse"])
def test_i_integral_vanishes(curve_name, request):
    curve = request.getfixturevalue(curve_name)
    check = verify_i_integral(curve)
    assert check.passed, check.to_dict()
    assert abs(check.value) <= 1e-8 * check.n_reference


def test_product_term_integrates_to_zero(translated_ellipse):
    assert abs(i_integral(translated_ellipse, terms=ITerms.PRODUCT)) <= 1e-12


def test_i_integral_is_scale_invariant(translated_ellipse):
    scaled = euclidean_transform(translated_ellipse, scale=3.0)
    assert i_integral(scaled, 128, "log") == pytest.approx(i_integral(translated_ellipse, 128, "log"), abs=1e-10)


def test_i_integral_rejects_curves_through_the_origin():
    with pytest.raises(DomainError):
        i_integral(make_circle(1.0, center=[1.0, 0.0]))
    with pytest.raises(InvalidArgumentError):
        i_integral(make_circle(1.0, center=[3.0, 0.0]), terms="cross")


def test_r_is_continuous_across_the_diagonal(translated_ellipse):
    t, eps = 0.7, 1e-5
    partials = log_distance_partials(translated_ellipse, t, t + eps)
    f1 = IIntegrandContext.from_jets(translated_ellipse.sample([t, t + eps])).f1
    # K = ln S², so ∂K = 2 ∂ ln S
    off_diagonal = 2 * (f1[0] * partials.d2 + f1[1] * partials.d1)
    assert off_diagonal == pytest.approx(r_diagonal(translated_ellipse, t), abs=1e-3)
