import math

import numpy as np
import pytest

from hypothesis import given, settings
from hypothesis import strategies as st

from src.spectral_core.energy import (
    energy_constants,
    energy_snapshot,
    energy_terms,
    lyapunov_balance,
    require_beta,
    rho,
    richardson_derivative,
)
from src.spectral_core.errors import ParameterError
from src.spectral_core.evolution import evolve_exact
from src.spectral_core.models import ModelParams, SpectralState
from src.spectral_core.roots import characteristic_roots


finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)
states = st.builds(complex, finite, finite)


@pytest.fixture
def params():
    return ModelParams(theta=2.0, n=3)


def test_key_function(params):
    assert rho(params, 1.0) == pytest.approx(0.5)
    assert rho(params, 0.0) == 0.0
    np.testing.assert_allclose(rho(params, np.array([1.0, 2.0])), [0.5, 16 / 65])


def test_key_function_rejects_negative_frequency(params):
    with pytest.raises(ParameterError):
        rho(params, -1.0)


@pytest.mark.parametrize("beta", [0.0, 1.0, -0.1, 1.5])
def test_beta_range(beta):
    with pytest.raises(ParameterError):
        require_beta(beta)


def test_energy_constants():
    constants = energy_constants(0.1)
    assert constants.m1 == constants.m2 == pytest.approx(5.75)
    assert constants.c_beta == pytest.approx(1.15)
    assert constants.alpha == pytest.approx(0.9 / 5.75)
    assert constants.decay_constant == pytest.approx(1.15 / 0.9)


def test_large_beta_switches_the_coefficient_bound():
    # 1/2 + beta/4 never wins on (0, 1), the high-frequency branch always does
    for beta in (0.2, 0.5, 0.9):
        assert energy_constants(beta).m2 == pytest.approx(1 / (2 * beta) + 0.75)


@settings(max_examples=200)
@given(
    st.floats(min_value=1e-2, max_value=10.0),
    states,
    states,
    st.floats(min_value=0.05, max_value=0.95),
)
def test_dissipation_dominates_the_cross_term(r, u, v, beta):
    params = ModelParams(theta=2.0, n=3)
    e0, e, f, rr = energy_terms(params, r, u, v, beta)
    assert rr <= beta * f * (1 + 1e-12) + 1e-300
    assert (1 - beta) * e0 <= e * (1 + 1e-12) + 1e-300
    assert e <= energy_constants(beta).c_beta * e0 * (1 + 1e-12) + 1e-300


def test_snapshot_matches_terms(params):
    state = evolve_exact(characteristic_roots(params, 0.7), 1.0, 2.0j, 1.5)
    snapshot = energy_snapshot(state, params, 0.1)
    e0, e, f, rr = energy_terms(params, 0.7, state.u_hat, state.v_hat, 0.1)
    assert snapshot.e0 == pytest.approx(float(e0))
    assert snapshot.e == pytest.approx(float(e))
    assert snapshot.f == pytest.approx(float(f))
    assert snapshot.rr == pytest.approx(float(rr))


@pytest.mark.parametrize("r", [0.3, 1.0, 1.5, 3.0])
@pytest.mark.parametrize("t", [0.0, 0.5, 2.0, 5.0])
def test_lyapunov_identity(params, r, t):
    roots = characteristic_roots(params, r)
    assert abs(lyapunov_balance(params, roots, 1.0, -0.5j, 0.1, t)) < 1e-6


def test_richardson_derivative():
    assert richardson_derivative(math.sin, 1.0, 1e-3) == pytest.approx(math.cos(1.0), rel=1e-9)
    with pytest.raises(ParameterError):
        richardson_derivative(math.sin, 1e-4, 1e-3)


def test_snapshot_of_a_unit_state(params):
    snapshot = energy_snapshot(SpectralState(u_hat=1.0, v_hat=1.0, r=1.0, t=0.0), params, 0.1)
    assert snapshot.e0 == pytest.approx(1.0)
    assert snapshot.rr == pytest.approx(0.05)
    assert snapshot.f == pytest.approx(1.05)
    assert snapshot.e == pytest.approx(1.075)


def test_zero_state_has_no_energy(params):
    snapshot = energy_snapshot(SpectralState(u_hat=0j, v_hat=0j, r=2.0, t=1.0), params, 0.3)
    assert (snapshot.e0, snapshot.e, snapshot.f, snapshot.rr) == (0.0, 0.0, 0.0, 0.0)


@pytest.mark.parametrize("theta", [1.5, 2.0])
@pytest.mark.parametrize("r", [0.1, 0.7, 1.0, 2.0])
@pytest.mark.parametrize("t", [0.5, 3.0])
def test_free_energy_loses_the_damping_term(theta, r, t):
    params = ModelParams(theta=theta, n=3)
    roots = characteristic_roots(params, r)
    u0, u1 = 1.0, 0.5j
    h = 1e-3 / max(abs(roots.sigma2), 1e-3)

    def free_energy(s):
        return energy_snapshot(evolve_exact(roots, u0, u1, s), params, 0.1).e0

    state = evolve_exact(roots, u0, u1, t)
    loss = r ** (2 * theta) * abs(state.v_hat) ** 2
    e0 = energy_snapshot(state, params, 0.1).e0
    derivative = richardson_derivative(free_energy, t, h)
    assert abs(derivative + loss) <= 1e-7 * r ** (2 * theta) * 2 * e0
