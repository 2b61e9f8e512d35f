import logging
import math

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Mapping

import numpy as np
import numpy.typing as npt

from scipy.special import gamma

from src.data_library.continuity import continuity_constants
from src.radial_quadrature.integrate import (
    FloatArray,
    RadialFunction,
    RadialIntegrand,
    integrate_radial,
    sphere_measure,
)
from src.radial_quadrature.plan import QuadraturePlan
from src.spectral_core.errors import InconsistentDatumError, ParameterError


logger = logging.getLogger(__name__)

# |u_hat|^2 falls below e^(-SPECTRAL_TAIL) of its peak beyond the spectral radius
SPECTRAL_TAIL = 100.0
VALIDATION_GRID = np.logspace(-6, 2, 2001)
RELATIVE_SLACK = 1e-12


@dataclass(frozen=True)
class InitialDatum:
    """Radial real datum described through its Fourier transform u_hat(|xi|)."""

    u_hat: RadialFunction
    mass: float
    norm_l1: float
    norm_l11: float
    sobolev: Callable[[float], float]
    l2_norm: float
    n: int
    label: str
    spectral_radius: float

    @property
    def is_zero(self) -> bool:
        return self.mass == 0 and self.l2_norm == 0

    def values(self, r: npt.ArrayLike) -> FloatArray:
        return np.asarray(self.u_hat(np.asarray(r, dtype=np.float64)), dtype=np.float64)

    def transform(self, r: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        # real radial data have real transforms, the imaginary part is zero by construction
        return self.values(r).astype(np.complex128)

    def deviation(self, r: npt.ArrayLike) -> FloatArray:
        return self.values(r) - self.mass


def zero_datum(n: int) -> InitialDatum:
    if n < 1:
        raise ParameterError(f"dimension must be positive, got {n}")
    return InitialDatum(
        u_hat=np.zeros_like,
        mass=0.0,
        norm_l1=0.0,
        norm_l11=0.0,
        sobolev=lambda ell: 0.0,
        l2_norm=0.0,
        n=n,
        label="zero",
        spectral_radius=0.0,
    )


def make_gaussian(a: float, amplitude: float, n: int) -> InitialDatum:
    """u(x) = amplitude * exp(-a |x|^2)."""
    if not a > 0:
        raise ParameterError(f"Gaussian width parameter must be positive, got {a}")
    if n < 1:
        raise ParameterError(f"dimension must be positive, got {n}")

    peak = amplitude * (math.pi / a) ** (n / 2)
    omega = sphere_measure(n)

    def u_hat(r: FloatArray) -> FloatArray:
        return peak * np.exp(-(r**2) / (4 * a))

    def sobolev(ell: float) -> float:
        if ell < 0:
            raise ParameterError(f"Sobolev order must be nonnegative, got {ell}")
        moment = 0.5 * (2 * a) ** (ell + n / 2) * gamma(ell + n / 2)
        return math.sqrt((2 * math.pi) ** (-n) * peak**2 * omega * moment)

    l1 = abs(amplitude) * (math.pi / a) ** (n / 2)
    first_moment = abs(amplitude) * omega * gamma((n + 1) / 2) / (2 * a ** ((n + 1) / 2))
    return InitialDatum(
        u_hat=u_hat,
        mass=peak,
        norm_l1=l1,
        norm_l11=l1 + first_moment,
        sobolev=sobolev,
        l2_norm=abs(amplitude) * (math.pi / (2 * a)) ** (n / 4),
        n=n,
        label=f"gaussian(a={a:g}, amplitude={amplitude:g})",
        spectral_radius=math.sqrt(2 * a * SPECTRAL_TAIL) if amplitude != 0 else 0.0,
    )


def _check_declared_norms(profile: RadialFunction, mass: float, norm_l1: float, norm_l11: float) -> None:
    if norm_l1 < abs(mass) * (1 - RELATIVE_SLACK) or norm_l11 < norm_l1 * (1 - RELATIVE_SLACK):
        raise InconsistentDatumError(
            f"declared norms must satisfy L11 >= L1 >= |mass|, got L11={norm_l11}, L1={norm_l1}, mass={mass}"
        )

    bound = continuity_constants().l * VALIDATION_GRID * norm_l11
    gap = np.abs(np.asarray(profile(VALIDATION_GRID), dtype=np.float64) - mass)
    excess = gap - bound * (1 + RELATIVE_SLACK)
    worst = int(np.argmax(excess))
    if excess[worst] > 0:
        raise InconsistentDatumError(
            f"|u_hat(r) - u_hat(0)| = {gap[worst]:.6e} exceeds the continuity bound {bound[worst]:.6e} "
            f"at r={VALIDATION_GRID[worst]:.6e}; the declared L11 norm is too small"
        )


def make_spectral(
    profile: RadialFunction,
    n: int,
    *,
    norm_l1: float,
    norm_l11: float,
    label: str = "spectral",
    spectral_radius: float = 100.0,
    sobolev: Callable[[float], float] | None = None,
) -> InitialDatum:
    if n < 1:
        raise ParameterError(f"dimension must be positive, got {n}")
    mass = float(np.asarray(profile(np.zeros(1)), dtype=np.float64)[0])
    if not math.isfinite(mass):
        raise ParameterError("the transform must be finite at the origin")

    if mass == 0 and not np.any(np.asarray(profile(VALIDATION_GRID))):
        logger.info("spectral profile %s vanishes on the validation grid, using the zero datum", label)
        return zero_datum(n)

    _check_declared_norms(profile, mass, norm_l1, norm_l11)

    if sobolev is None:
        plan = QuadraturePlan.build(spectral_radius, breakpoints=(1.0, 10.0), base_panels=256)

        @lru_cache(maxsize=None)
        def quadrature_sobolev(ell: float) -> float:
            def weighted(r: FloatArray) -> FloatArray:
                return r ** (2 * ell) * np.asarray(profile(r), dtype=np.float64) ** 2

            total = integrate_radial(RadialIntegrand(weighted, n), plan).value
            return math.sqrt((2 * math.pi) ** (-n) * total)

        sobolev = quadrature_sobolev

    return InitialDatum(
        u_hat=profile,
        mass=mass,
        norm_l1=norm_l1,
        norm_l11=norm_l11,
        sobolev=sobolev,
        l2_norm=sobolev(0.0),
        n=n,
        label=label,
        spectral_radius=spectral_radius,
    )


DATUM_FAMILIES: dict[str, Callable[..., InitialDatum]] = {
    "zero": lambda n: zero_datum(n),
    "gaussian": lambda n, a, amplitude: make_gaussian(a, amplitude, n),
}


def make_datum(family: str, n: int, **parameters: Any) -> InitialDatum:
    try:
        builder = DATUM_FAMILIES[family]
    except KeyError as e:
        raise ParameterError(f"unknown datum family {family!r}; known: {sorted(DATUM_FAMILIES)}") from e
    return builder(n, **parameters)


def datum_from_config(spec: Mapping[str, Any], n: int) -> InitialDatum:
    """Build a datum from a `{"family": ..., **parameters}` mapping."""
    parameters = dict(spec)
    try:
        family = parameters.pop("family")
    except KeyError as e:
        raise ParameterError("datum config is missing its family") from e
    return make_datum(family, n, **parameters)
