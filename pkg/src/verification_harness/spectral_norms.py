import logging
import math

from dataclasses import dataclass

import numpy as np

from src.data_library.datum import InitialDatum
from src.radial_quadrature.integrate import FloatArray, RadialIntegrand, integrate_radial, l2_distance_sq
from src.radial_quadrature.plan import DEFAULT_POINTS_PER_PANEL, DEFAULT_TOLERANCE, TAIL_EXPONENT, QuadraturePlan
from src.spectral_core.errors import ParameterError
from src.spectral_core.evolution import evolve_spectrum
from src.spectral_core.models import ModelParams, ProfileParams
from src.spectral_core.profile import profile_hat
from src.spectral_core.roots import ComplexArray


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureSettings:
    points_per_panel: int = DEFAULT_POINTS_PER_PANEL
    tolerance: float = DEFAULT_TOLERANCE
    base_panels: int = 64


@dataclass(frozen=True)
class ProfileErrorSplit:
    low: float
    high: float
    total: float


class SpectralSolution:
    """Exact solution of one initial-value problem, with its L2-type norms by radial quadrature.

    Norms carry the Plancherel factor (2 pi)^(-n) of the non-normalised transform.
    """

    def __init__(
        self,
        params: ModelParams,
        data: tuple[InitialDatum, InitialDatum],
        settings: QuadratureSettings = QuadratureSettings(),
    ) -> None:
        for datum in data:
            if datum.n != params.n:
                raise ParameterError(f"datum {datum.label} lives in dimension {datum.n}, model in {params.n}")
        self.params = params
        self.data = data
        self.settings = settings

    @property
    def is_zero(self) -> bool:
        return all(datum.is_zero for datum in self.data)

    @property
    def profile_params(self) -> ProfileParams:
        return ProfileParams(p0=self.data[0].mass, p1=self.data[1].mass)

    @property
    def outer_radius(self) -> float:
        return max(datum.spectral_radius for datum in self.data)

    @property
    def plancherel(self) -> float:
        return float((2 * math.pi) ** (-self.params.n))

    def spectrum(self, t: float, r: FloatArray) -> tuple[ComplexArray, ComplexArray]:
        return evolve_spectrum(self.params, r, self.data[0].values(r), self.data[1].values(r), t)

    def plan(self, t: float, lower: float = 0.0, upper: float | None = None) -> QuadraturePlan:
        """Panels resolve the oscillation where e^(-t r^(2 theta)) is above the tail cut, and no further."""
        top = self.outer_radius if upper is None else upper
        oscillating = math.inf if t == 0 else (TAIL_EXPONENT / t) ** (1 / (2 * self.params.theta))
        return QuadraturePlan.build(
            top,
            lower=lower,
            breakpoints=(self.params.confluence_radius,),
            base_panels=self.settings.base_panels,
            oscillation_frequency=t if t > 0 else None,
            oscillation_limit=oscillating,
            points_per_panel=self.settings.points_per_panel,
            tolerance=self.settings.tolerance,
        )

    def energy(self, t: float) -> float:
        """||u_t||^2 + ||grad u||^2."""
        if self.is_zero:
            return 0.0

        def density(r: FloatArray) -> FloatArray:
            u, v = self.spectrum(t, r)
            return np.abs(v) ** 2 + r**2 * np.abs(u) ** 2

        result = integrate_radial(RadialIntegrand(density, self.params.n), self.plan(t))
        return self.plancherel * result.value

    def l2_sq(self, t: float, lower: float = 0.0, upper: float | None = None) -> float:
        if self.is_zero:
            return 0.0

        def density(r: FloatArray) -> FloatArray:
            return np.abs(self.spectrum(t, r)[0]) ** 2

        result = integrate_radial(RadialIntegrand(density, self.params.n), self.plan(t, lower, upper))
        return self.plancherel * result.value

    def profile_error_sq(self, t: float, lower: float = 0.0, upper: float | None = None) -> float:
        """Squared L2 distance in frequency space between the solution and the diffusion wave, unscaled."""
        self.params.require_profile_exponent()
        if self.is_zero:
            return 0.0
        p = self.profile_params
        result = l2_distance_sq(
            lambda r: self.spectrum(t, r)[0],
            lambda r: profile_hat(t, r, p, self.params),
            self.params.n,
            self.plan(t, lower, upper),
        )
        return result.value

    def profile_error_split(self, t: float, delta0: float) -> ProfileErrorSplit:
        low = self.profile_error_sq(t, upper=delta0)
        high = self.profile_error_sq(t, lower=delta0)
        total = self.profile_error_sq(t)
        logger.debug("profile error at t=%g: low=%.6e high=%.6e total=%.6e", t, low, high, total)
        return ProfileErrorSplit(low=low, high=high, total=total)
