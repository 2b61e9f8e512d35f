import logging
import math

import numpy as np
import pytest

from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

from src.radial_quadrature.integrate import (
    RadialIntegrand,
    integrate_line,
    integrate_radial,
    l2_distance_sq,
    sphere_measure,
)
from src.radial_quadrature.plan import PanelSegment, QuadraturePlan
from src.spectral_core.errors import ParameterError, QuadratureConvergenceError


def gaussian(r):
    return np.exp(-(r**2))


@pytest.mark.parametrize("n, measure", [(1, 2.0), (2, 2 * math.pi), (3, 4 * math.pi), (4, 2 * math.pi**2)])
def test_sphere_measure(n, measure):
    assert sphere_measure(n) == pytest.approx(measure, rel=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_gaussian_integral(n):
    plan = QuadraturePlan.for_decay(1.0, 2.0)
    result = integrate_radial(RadialIntegrand(gaussian, n), plan)
    assert result.value == pytest.approx(math.pi ** (n / 2), rel=1e-10)
    assert result.error <= 1e-8 * result.value
    assert result.n_evaluations > 0


def test_refinement_does_not_move_the_value():
    plan = QuadraturePlan.for_decay(1.0, 2.0, points_per_panel=8)
    coarse = integrate_radial(RadialIntegrand(gaussian, 3), plan)
    fine = integrate_radial(RadialIntegrand(gaussian, 3), plan.halved())
    assert abs(fine.value - coarse.value) <= max(coarse.error, 1e-13 * coarse.value)


@pytest.mark.parametrize("n, k", [(2, 1), (3, 1), (3, 2), (5, 4)])
def test_singular_weight_over_unit_ball(n, k):
    # integral of |xi|^(-k) over the unit ball is omega / (n - k)
    integrand = RadialIntegrand(lambda r: r ** (-float(k)), n, singular_order=k)
    result = integrate_radial(integrand, QuadraturePlan.build(1.0))
    assert result.value == pytest.approx(sphere_measure(n) / (n - k), rel=1e-10)


@pytest.mark.parametrize("k", [-1, 3])
def test_singular_order_range(k):
    with pytest.raises(ParameterError):
        RadialIntegrand(gaussian, 3, singular_order=k)


def test_oscillatory_line_integral():
    frequency = 400.0
    plan = QuadraturePlan.build(1.0, oscillation_frequency=frequency)
    result = integrate_line(lambda x: np.cos(frequency * x), plan)
    assert result.value == pytest.approx(math.sin(frequency) / frequency, rel=1e-9)


def test_coarse_plan_is_rejected():
    plan = QuadraturePlan.build(10.0, base_panels=1, points_per_panel=2)
    with pytest.raises(QuadratureConvergenceError) as exc_info:
        integrate_line(lambda x: np.cos(50 * x) + 2, plan)
    assert exc_info.value.tolerance == plan.tolerance


def test_lenient_mode_warns(caplog):
    plan = QuadraturePlan.build(10.0, base_panels=1, points_per_panel=2)
    with caplog.at_level(logging.WARNING):
        result = integrate_line(lambda x: np.cos(50 * x) + 2, plan, strict=False)
    assert math.isfinite(result.value)
    assert "disagreement" in caplog.text


def test_cancellation_floor_accepts_vanishing_integrals():
    plan = QuadraturePlan.build(2 * math.pi, base_panels=16)
    result = integrate_line(np.sin, plan)
    assert abs(result.value) < 1e-12


def test_l2_distance_between_gaussians():
    plan = QuadraturePlan.for_decay(1.0, 2.0)
    result = l2_distance_sq(gaussian, lambda r: 0.5 * gaussian(r), 3, plan)
    # 0.25 * integral of exp(-2 |xi|^2) over R^3
    assert result.value == pytest.approx(0.25 * (math.pi / 2) ** 1.5, rel=1e-10)


def test_quartic_exponential_integral():
    result = integrate_line(lambda x: np.exp(-(x**4)), QuadraturePlan.for_decay(1.0, 4.0))
    assert result.value == pytest.approx(gamma(1.25), rel=1e-10)
    assert result.value == pytest.approx(0.9064024771, abs=1e-10)


def test_quartic_exponential_over_the_line_at_t_16():
    t = 16.0
    integrand = RadialIntegrand(lambda r: np.exp(-t * r**4), 1)
    result = integrate_radial(integrand, QuadraturePlan.for_decay(t, 4.0))
    assert result.value == pytest.approx(t ** (-0.25) * 2 * gamma(1.25), rel=1e-10)


def profile_shape(eta):
    return np.exp(-(eta**4)) * (1 + eta**2)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=1e-2, max_value=1e4), st.integers(min_value=1, max_value=5))
def test_frequency_rescaling(t, n):
    scaled = RadialIntegrand(lambda r: profile_shape(t**0.25 * r), n)
    reference = integrate_radial(RadialIntegrand(profile_shape, n), QuadraturePlan.for_decay(1.0, 4.0))
    result = integrate_radial(scaled, QuadraturePlan.for_decay(t, 4.0))
    assert result.value == pytest.approx(t ** (-n / 4) * reference.value, rel=1e-8)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_panels_integrate_monomials_exactly(data):
    points = data.draw(st.integers(min_value=1, max_value=12), label="points")
    degree = data.draw(st.integers(min_value=0, max_value=2 * points - 1), label="degree")
    plan = QuadraturePlan(truncation_radius=2.0, segments=(PanelSegment(0.0, 2.0, 1),), points_per_panel=points)
    result = integrate_line(lambda x: x**degree, plan)
    assert result.value == pytest.approx(2.0 ** (degree + 1) / (degree + 1), rel=1e-13)
    assert result.error <= 1e-12 * result.value


def test_one_point_panel_misses_the_quadratic():
    plan = QuadraturePlan(truncation_radius=2.0, segments=(PanelSegment(0.0, 2.0, 1),), points_per_panel=1)
    result = integrate_line(lambda x: x**2, plan, strict=False)
    # midpoint rule on two panels of width 1
    assert result.value == pytest.approx(2.5)
