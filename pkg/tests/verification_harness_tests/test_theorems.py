import math

import numpy as np
import pytest

from src.data_library.datum import make_gaussian, zero_datum
from src.spectral_core.errors import HypothesisError, ParameterError
from src.spectral_core.models import ModelParams
from src.verification_harness.reports import FitMode, log_grid
from src.verification_harness.spectral_norms import SpectralSolution
from src.verification_harness.theorems import (
    Theorem,
    check_decomposition,
    check_hypotheses,
    initial_size,
    low_frequency_components,
    low_frequency_error,
    predicted_exponent,
    run_theorem_decay,
    theorem_rhs,
    two_sided_l2,
)


@pytest.fixture
def params():
    return ModelParams(theta=2.0, n=3)


def velocity_data(n=3):
    return zero_datum(n), make_gaussian(0.5, 1.0, n)


def displacement_data(n=3):
    return make_gaussian(0.5, 1.0, n), zero_datum(n)


def test_plancherel_at_time_zero(params):
    solution = SpectralSolution(params, displacement_data())
    gaussian = solution.data[0]
    assert solution.l2_sq(0.0) == pytest.approx(gaussian.l2_norm**2, rel=1e-8)
    assert solution.energy(0.0) == pytest.approx(gaussian.sobolev(1.0) ** 2, rel=1e-8)


def test_profile_error_splits_at_delta0(params):
    split = SpectralSolution(params, velocity_data()).profile_error_split(100.0, 0.5)
    assert split.low + split.high == pytest.approx(split.total, rel=1e-7)
    assert split.low > 0 and split.high >= 0


def test_dimension_mismatch_rejected(params):
    with pytest.raises(ParameterError):
        SpectralSolution(params, velocity_data(n=2))


def test_l2_decay_needs_three_dimensions():
    with pytest.raises(HypothesisError, match="n >= 3"):
        check_hypotheses(Theorem.L2_DECAY, ModelParams(theta=2.0, n=2), 2.0)


@pytest.mark.parametrize(
    "which, theta, n, ell",
    [
        (Theorem.ENERGY_DECAY, 2.0, 3, -1.0),
        (Theorem.L2_DECAY, 2.0, 3, 0.5),
        (Theorem.PROFILE_ERROR, 1.5, 3, 2.0),
        (Theorem.PROFILE_ERROR, 2.0, 3, 0.5),
    ],
)
def test_violated_hypotheses(which, theta, n, ell):
    with pytest.raises(HypothesisError):
        run_theorem_decay(which, ModelParams(theta=theta, n=n), velocity_data(n), ell, log_grid(1e2, 1e4, 5))


def test_high_dimensions_only_warn():
    notes = check_hypotheses(Theorem.PROFILE_ERROR, ModelParams(theta=2.0, n=8), 1.0)
    assert len(notes) == 1
    assert "ell > n/4 - 1/2" in notes[0]
    assert check_hypotheses(Theorem.PROFILE_ERROR, ModelParams(theta=2.0, n=8), 2.0) == []


def test_predicted_exponents(params):
    assert predicted_exponent(Theorem.ENERGY_DECAY, params, velocity_data()) == -0.75
    assert predicted_exponent(Theorem.ENERGY_DECAY, params, displacement_data()) == -1.25
    assert predicted_exponent(Theorem.L2_DECAY, params, velocity_data()) == -0.25
    assert predicted_exponent(Theorem.PROFILE_ERROR, params, displacement_data()) == -1.25


def test_right_hand_side_vanishes_for_zero_data(params):
    zero = zero_datum(3)
    for which in Theorem:
        assert theorem_rhs(which, params, (zero, zero), 2.0, 10.0) == 0.0


def test_high_frequency_term_is_negligible(params):
    data = velocity_data()
    u1 = data[1]
    t = 1e6
    rhs = theorem_rhs(Theorem.ENERGY_DECAY, params, data, 2.0, t)
    assert rhs == pytest.approx((1 + t) ** -0.75 * u1.norm_l1**2, rel=1e-6)


def test_zero_data_short_circuit(params):
    zero = zero_datum(3)
    report = run_theorem_decay(Theorem.L2_DECAY, params, (zero, zero), 2.0, log_grid(1e2, 1e6, 5))
    assert report.passed
    assert report.samples == ()


def test_decomposition_residual_bounded():
    radii = np.linspace(0.5 / 200, 0.5, 200)
    data = (make_gaussian(1.0, -0.5, 3), make_gaussian(0.5, 1.0, 3))
    report = check_decomposition(log_grid(1.0, 1e6, 4), radii, data)
    assert report.passed, f"{report.max_violation:.3e} at {report.worst_point}"


def test_two_sided_needs_velocity_mass(params):
    with pytest.raises(ParameterError):
        two_sided_l2(params, displacement_data(), 2.0, log_grid(1e2, 1e4, 5))


def test_initial_size_sums_norms():
    u0, u1 = velocity_data()
    assert initial_size((u0, u1), 2.0) == pytest.approx(u1.l2_norm + u1.norm_l1 + u1.norm_l11 + u1.sobolev(1.0))


@pytest.mark.slow
def test_l2_decay_rate(params):
    report = run_theorem_decay(Theorem.L2_DECAY, params, velocity_data(), 2.0, log_grid(1e2, 1e6, 5))
    assert report.passed, report.message
    assert report.fitted_slope == pytest.approx(-0.25, abs=0.05)


@pytest.mark.slow
def test_energy_decay_rate(params):
    report = run_theorem_decay(Theorem.ENERGY_DECAY, params, velocity_data(), 2.0, log_grid(1e2, 1e6, 5))
    assert report.passed, report.message
    assert report.fitted_slope == pytest.approx(-0.75, abs=0.08)


@pytest.mark.slow
@pytest.mark.parametrize("data", [velocity_data(), displacement_data()], ids=["velocity", "displacement"])
def test_profile_error_bounded(params, data):
    report = run_theorem_decay(Theorem.PROFILE_ERROR, params, data, 2.0, log_grid(1e3, 1e7, 3))
    assert report.passed, report.message
    assert report.mode is FitMode.UPPER_BOUND
    assert report.ratio_spread <= 3.0


@pytest.mark.slow
def test_low_frequency_error_and_components(params, subtests):
    data = (make_gaussian(1.0, -0.5, 3), make_gaussian(0.5, 1.0, 3))
    grid = log_grid(1e3, 1e6, 3)
    with subtests.test(part="error"):
        assert low_frequency_error(params, data, grid).passed
    for name, report in low_frequency_components(params, data, grid).items():
        with subtests.test(part=name):
            assert report.passed, report.message


@pytest.mark.slow
@pytest.mark.parametrize("n", [1, 2, 3])
def test_two_sided_l2_bounds(n):
    report = two_sided_l2(ModelParams(theta=2.0, n=n), velocity_data(n), 2.0, log_grid(1e2, 1e6, 3))
    assert report.passed
    assert report.ratio_spread <= 4.0
    assert 0 < report.extras["C1"] and report.extras["C2"] > 0
    assert math.isfinite(report.extras["I0"])
