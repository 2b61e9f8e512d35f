import logging
import math

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from scipy.special import exp1, gamma

from src.radial_quadrature.integrate import (
    FloatArray,
    RadialIntegrand,
    integrate_line,
    integrate_radial,
    sphere_measure,
)
from src.radial_quadrature.plan import TAIL_EXPONENT, QuadraturePlan
from src.spectral_core.errors import ParameterError
from src.verification_harness.decay_fit import fit_decay_rate
from src.verification_harness.reports import (
    DecayReport,
    FitMode,
    InequalityReport,
    inequality_report,
    relative_violation,
)


logger = logging.getLogger(__name__)

SUPPORTED_DIMENSIONS = (1, 2, 3, 4, 5)
IDENTITY_SLACK = 1e-7
SLOPE_TOLERANCE = 0.03
GROWTH_SLOPE_TOLERANCE = 0.05
# integral of r^3 e^(-r^4) |log r| over (0, inf)
LOG_MOMENT = (np.euler_gamma + 2 * float(exp1(1.0))) / 16


@dataclass(frozen=True)
class OptimalitySuite:
    reports: dict[str, DecayReport] = field(default_factory=dict)
    inequalities: dict[str, InequalityReport] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports.values()) and all(r.passed for r in self.inequalities.values())


def _require_dimension(n: int) -> None:
    if n not in SUPPORTED_DIMENSIONS:
        raise ParameterError(f"optimality integrals are checked for n in {SUPPORTED_DIMENSIONS}, got {n}")


def _plan(t: float, points_per_panel: int, tolerance: float) -> QuadraturePlan:
    return QuadraturePlan.for_decay(
        t, 4.0, oscillation_frequency=t, points_per_panel=points_per_panel, tolerance=tolerance
    )


def sine_integral(n: int, t: float, *, points_per_panel: int = 16, tolerance: float = 1e-8) -> float:
    """Integral over R^n of e^(-t |xi|^4) sin^2(t |xi|) / |xi|^2."""
    _require_dimension(n)

    def density(r: FloatArray) -> FloatArray:
        return np.exp(-t * r**4) * (t * np.sinc(t * r / np.pi)) ** 2

    return integrate_radial(RadialIntegrand(density, n), _plan(t, points_per_panel, tolerance)).value


def cosine_integral(n: int, t: float, *, points_per_panel: int = 16, tolerance: float = 1e-8) -> float:
    """Integral over R^n of e^(-t |xi|^4) cos^2(t |xi|)."""
    _require_dimension(n)

    def density(r: FloatArray) -> FloatArray:
        return np.exp(-t * r**4) * np.cos(t * r) ** 2

    return integrate_radial(RadialIntegrand(density, n), _plan(t, points_per_panel, tolerance)).value


def sine_constant(n: int) -> float:
    if n < 3:
        raise ParameterError(f"the sine constant diverges for n < 3, got {n}")
    return float(gamma((n - 2) / 4) / 4)


def cosine_constant(n: int) -> float:
    return float(gamma(n / 4) / 4)


def _oscillating_moment(power: int, t: float, points_per_panel: int) -> float:
    frequency = 2 * t**0.75

    def density(x: FloatArray) -> FloatArray:
        return np.exp(-(x**4)) * x**power * np.cos(frequency * x)

    plan = QuadraturePlan.build(
        TAIL_EXPONENT**0.25, oscillation_frequency=frequency, points_per_panel=points_per_panel
    )
    return integrate_line(density, plan).value


def sine_oscillation(n: int, t: float, *, points_per_panel: int = 16) -> float:
    """Integral over x > 0 of e^(-x^4) x^(n-3) cos(2 t^(3/4) x); decays to zero as t grows."""
    sine_constant(n)
    return _oscillating_moment(n - 3, t, points_per_panel)


def cosine_oscillation(n: int, t: float, *, points_per_panel: int = 16) -> float:
    """Integral over x > 0 of e^(-x^4) x^(n-1) cos(2 t^(3/4) x)."""
    return _oscillating_moment(n - 1, t, points_per_panel)


def optimality_suite(
    n: int,
    t_grid: Iterable[float],
    *,
    points_per_panel: int = 16,
    tolerance: float = 1e-8,
) -> OptimalitySuite:
    _require_dimension(n)
    times = [float(t) for t in t_grid]
    sines = [(t, sine_integral(n, t, points_per_panel=points_per_panel, tolerance=tolerance)) for t in times]
    cosines = [(t, cosine_integral(n, t, points_per_panel=points_per_panel, tolerance=tolerance)) for t in times]
    reports = {"cosine": fit_decay_rate(cosines, -n / 4, tolerance=SLOPE_TOLERANCE)}
    inequalities = {}

    if n >= 3:
        reports["sine"] = fit_decay_rate(sines, -(n - 2) / 4, tolerance=SLOPE_TOLERANCE)
        late = [t for t in times if t >= 1e3]
        if late:
            oscillation = np.array([abs(sine_oscillation(n, t, points_per_panel=points_per_panel)) for t in late])
            inequalities["riemann_lebesgue"] = inequality_report(
                "riemann_lebesgue",
                f"t in [{late[0]:.3g}, {late[-1]:.3g}] ({len(late)})",
                relative_violation(oscillation, sine_constant(n) / 2),
                late,
                np.zeros(len(late)),
            )
    elif n == 1:
        reports["sine"] = fit_decay_rate(sines, 1.0, tolerance=GROWTH_SLOPE_TOLERANCE, spread_bound=3.0)
    else:
        reports["sine"] = fit_decay_rate(sines, 0.0, mode=FitMode.LOG_TWO_SIDED, spread_bound=2.0)

    for name, report in reports.items():
        logger.info("n=%d %s integral: slope %.4f, verdict %s", n, name, report.fitted_slope, report.verdict.value)
    return OptimalitySuite(reports=reports, inequalities=inequalities)


def optimality_identities(
    n: int, t_grid: Iterable[float], *, points_per_panel: int = 16
) -> dict[str, InequalityReport]:
    """Direct quadrature against the rescaled constant-minus-oscillation form of each integral."""
    _require_dimension(n)
    times = [float(t) for t in t_grid]
    omega = sphere_measure(n)
    grid = f"t in [{times[0]:.3g}, {times[-1]:.3g}] ({len(times)})"
    zeros = np.zeros(len(times))

    cosine_gap = []
    for t in times:
        direct = cosine_integral(n, t, points_per_panel=points_per_panel)
        rescaled = 0.5 * omega * t ** (-n / 4) * (cosine_constant(n) + cosine_oscillation(n, t))
        cosine_gap.append(abs(direct - rescaled) / max(abs(direct), abs(rescaled)))
    reports = {"cosine_identity": inequality_report("cosine_identity", grid, cosine_gap, times, zeros, IDENTITY_SLACK)}

    if n >= 3:
        sine_gap = []
        for t in times:
            direct = sine_integral(n, t, points_per_panel=points_per_panel)
            rescaled = 0.5 * omega * t ** (-(n - 2) / 4) * (sine_constant(n) - sine_oscillation(n, t))
            sine_gap.append(abs(direct - rescaled) / max(abs(direct), abs(rescaled)))
        reports["sine_identity"] = inequality_report("sine_identity", grid, sine_gap, times, zeros, IDENTITY_SLACK)
    return reports


@dataclass(frozen=True)
class GrowthSplit:
    """Rescaled sine integral split at |eta| = t^(-3/4), with the envelopes each part must respect."""

    t: float
    inner: float
    outer: float
    inner_bounds: tuple[float, float]
    outer_bounds: tuple[float, float]


def _growth_bounds(n: int, t: float) -> tuple[tuple[float, float], tuple[float, float]]:
    damping = math.exp(-(t**-3))
    if n == 1:
        inner = (t**0.75 / 4 * damping, 2 * t**1.5 * (t**-0.75 + 4 * t**-3.75) * damping)
        outer = (
            2 * t**0.75 / (5 * math.pi) * math.exp(-625 * math.pi**4 / (256 * t**3)) - 2 * float(gamma(0.75)) / 4,
            2 * t**0.75,
        )
        return inner, outer
    a = 5 * math.pi / (4 * t**0.75)
    inner = (math.pi / 4 * damping, math.pi + 4 * math.pi * t**-3)
    outer = (
        math.pi / 2 * math.exp(-(a**4)) * (math.log(t**0.75) - math.log(5 * math.pi / 4)) - 2 * math.pi * LOG_MOMENT,
        2 * math.pi * math.log(t**0.75) + 8 * math.pi * LOG_MOMENT,
    )
    return inner, outer


def split_growth_integral(n: int, t: float, *, points_per_panel: int = 16) -> GrowthSplit:
    if n not in (1, 2):
        raise ParameterError(f"the growth split applies to n in (1, 2), got {n}")
    if t <= 1:
        raise ParameterError(f"the growth split needs t > 1, got {t}")
    frequency = t**0.75
    cut = 1 / frequency

    def density(eta: FloatArray) -> FloatArray:
        return np.exp(-(eta**4)) * (frequency * np.sinc(frequency * eta / np.pi)) ** 2

    integrand = RadialIntegrand(density, n)
    inner_plan = QuadraturePlan.build(
        cut, base_panels=8, oscillation_frequency=frequency, points_per_panel=points_per_panel
    )
    outer_plan = QuadraturePlan.build(
        TAIL_EXPONENT**0.25, lower=cut, oscillation_frequency=frequency, points_per_panel=points_per_panel
    )
    inner_bounds, outer_bounds = _growth_bounds(n, t)
    return GrowthSplit(
        t=t,
        inner=integrate_radial(integrand, inner_plan).value,
        outer=integrate_radial(integrand, outer_plan).value,
        inner_bounds=inner_bounds,
        outer_bounds=outer_bounds,
    )


def check_growth_split(n: int, t_grid: Iterable[float], *, points_per_panel: int = 16) -> dict[str, InequalityReport]:
    splits = [split_growth_integral(n, float(t), points_per_panel=points_per_panel) for t in t_grid]
    times = [split.t for split in splits]
    zeros = np.zeros(len(times))
    grid = f"n={n}, t in [{times[0]:.3g}, {times[-1]:.3g}] ({len(times)})"
    checks = {
        "inner_lower": ([s.inner_bounds[0] for s in splits], [s.inner for s in splits]),
        "inner_upper": ([s.inner for s in splits], [s.inner_bounds[1] for s in splits]),
        "outer_lower": ([s.outer_bounds[0] for s in splits], [s.outer for s in splits]),
        "outer_upper": ([s.outer for s in splits], [s.outer_bounds[1] for s in splits]),
    }
    return {
        name: inequality_report(name, grid, relative_violation(lhs, rhs), times, zeros)
        for name, (lhs, rhs) in checks.items()
    }
