import math

import numpy as np
import pytest

from scipy.special import gamma

from src.data_library.continuity import continuity_constants
from src.data_library.datum import (
    datum_from_config,
    make_datum,
    make_gaussian,
    make_spectral,
    zero_datum,
)
from src.radial_quadrature.integrate import RadialIntegrand, integrate_radial
from src.radial_quadrature.plan import QuadraturePlan
from src.spectral_core.errors import InconsistentDatumError, ParameterError


@pytest.fixture
def gaussian():
    return make_gaussian(0.5, 1.0, 3)


def test_gaussian_closed_forms(gaussian):
    # a = 1/2 in R^3: u_hat(0) = (2 pi)^(3/2)
    assert gaussian.mass == pytest.approx((2 * math.pi) ** 1.5, rel=1e-14)
    assert gaussian.norm_l1 == pytest.approx(gaussian.mass)
    # first moment 4 pi * integral r^3 e^(-r^2/2) = 8 pi
    assert gaussian.norm_l11 == pytest.approx(gaussian.mass + 8 * math.pi, rel=1e-14)
    assert gaussian.l2_norm == pytest.approx(math.pi**0.75, rel=1e-14)
    assert gaussian.values(np.array([0.0, 2.0])) == pytest.approx(gaussian.mass * np.exp([0.0, -2.0]))


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_plancherel_identity(n):
    datum = make_gaussian(0.7, 1.3, n)

    def squared(r):
        return datum.values(r) ** 2

    plan = QuadraturePlan.build(datum.spectral_radius, base_panels=128)
    spectral = integrate_radial(RadialIntegrand(squared, n), plan).value * (2 * math.pi) ** (-n)
    assert spectral == pytest.approx(datum.l2_norm**2, rel=1e-8)
    assert datum.sobolev(0.0) == pytest.approx(datum.l2_norm, rel=1e-12)


def test_sobolev_norm_grows_with_order(gaussian):
    values = [gaussian.sobolev(ell) for ell in (0.0, 1.0, 2.0, 3.0)]
    # for a = 1/2, ||D^l u||^2 = ||u||^2 Gamma(l + n/2) / Gamma(n/2)
    for ell, value in zip(range(4), values):
        assert value**2 == pytest.approx(gaussian.l2_norm**2 * gamma(ell + 1.5) / gamma(1.5), rel=1e-12)
    with pytest.raises(ParameterError):
        gaussian.sobolev(-1.0)


def test_continuity_bound_holds_for_gaussian(gaussian):
    radii = np.logspace(-6, 2, 500)
    bound = continuity_constants().l * radii * gaussian.norm_l11
    assert np.all(np.abs(gaussian.deviation(radii)) <= bound)


def test_zero_datum(subtests):
    zero = zero_datum(4)
    assert zero.is_zero
    for ell in (0.0, 1.0, 3.0):
        with subtests.test(ell=ell):
            assert zero.sobolev(ell) == 0.0
    assert not np.any(zero.values(np.linspace(0, 5, 6)))
    with pytest.raises(ParameterError):
        zero_datum(0)


def test_transform_is_real(gaussian):
    transform = gaussian.transform(np.array([0.5, 1.0]))
    assert transform.dtype == np.complex128
    assert not np.any(transform.imag)


@pytest.mark.parametrize("a, n", [(0.0, 3), (-1.0, 3), (1.0, 0)])
def test_invalid_gaussian(a, n):
    with pytest.raises(ParameterError):
        make_gaussian(a, 1.0, n)


def test_spectral_datum_matches_gaussian(gaussian):
    datum = make_spectral(
        gaussian.u_hat,
        3,
        norm_l1=gaussian.norm_l1,
        norm_l11=gaussian.norm_l11,
        spectral_radius=gaussian.spectral_radius,
    )
    assert datum.mass == pytest.approx(gaussian.mass)
    assert datum.l2_norm == pytest.approx(gaussian.l2_norm, rel=1e-8)
    assert datum.sobolev(1.0) == pytest.approx(gaussian.sobolev(1.0), rel=1e-8)


def test_spectral_datum_rejects_small_weighted_norm():
    # (1 - cos 10 r) outruns L r at r ~ 0.23 when the weighted norm is only 1
    with pytest.raises(InconsistentDatumError, match="continuity bound"):
        make_spectral(lambda r: np.cos(10 * r), 3, norm_l1=1.0, norm_l11=1.0)


def test_spectral_datum_rejects_norm_ordering(gaussian):
    with pytest.raises(InconsistentDatumError):
        make_spectral(gaussian.u_hat, 3, norm_l1=0.5 * gaussian.mass, norm_l11=gaussian.norm_l11)


def test_vanishing_profile_gives_zero_datum():
    datum = make_spectral(np.zeros_like, 2, norm_l1=0.0, norm_l11=0.0)
    assert datum.is_zero
    assert datum.label == "zero"


def test_datum_factories():
    assert make_datum("zero", 2).is_zero
    built = datum_from_config({"family": "gaussian", "a": 0.5, "amplitude": 2.0}, 3)
    assert built.mass == pytest.approx(2 * (2 * math.pi) ** 1.5)
    with pytest.raises(ParameterError):
        make_datum("lorentzian", 3)
    with pytest.raises(ParameterError):
        datum_from_config({"a": 0.5}, 3)
