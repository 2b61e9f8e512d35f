import dataclasses
import logging
import math

from enum import Enum
from typing import Callable, Iterable

import numpy as np

from src.data_library.datum import InitialDatum
from src.radial_quadrature.integrate import FloatArray, RadialIntegrand, integrate_radial
from src.spectral_core.errors import HypothesisError, ParameterError
from src.spectral_core.models import ModelParams
from src.spectral_core.profile import DEFAULT_DELTA0, profile_hat, remainder_arrays, validate_delta0
from src.verification_harness.decay_fit import fit_decay_rate
from src.verification_harness.reports import (
    DecayReport,
    FitMode,
    InequalityReport,
    RatioStats,
    Verdict,
    inequality_report,
    relative_violation,
)
from src.verification_harness.spectral_norms import QuadratureSettings, SpectralSolution


logger = logging.getLogger(__name__)

DEFAULT_SPREAD_BOUND = 3.0
TWO_SIDED_SPREAD_BOUND = 4.0


class Theorem(Enum):
    ENERGY_DECAY = "thm1_1"
    L2_DECAY = "thm1_2"
    PROFILE_ERROR = "thm1_3"


DEFAULT_SLOPE_TOLERANCE = {
    Theorem.ENERGY_DECAY: 0.08,
    Theorem.L2_DECAY: 0.05,
    Theorem.PROFILE_ERROR: math.nan,
}


def check_hypotheses(which: Theorem, params: ModelParams, ell: float) -> list[str]:
    """Raise on a violated hypothesis; return notes on conditions that only weaken the statement."""
    notes = []
    if which is Theorem.ENERGY_DECAY and ell < 0:
        raise HypothesisError(which.value, "ell >= 0")
    if which is Theorem.L2_DECAY:
        if params.n < 3:
            raise HypothesisError(which.value, "n >= 3")
        if ell < 1:
            raise HypothesisError(which.value, "ell >= 1")
    if which is Theorem.PROFILE_ERROR:
        if params.theta != 2:
            raise HypothesisError(which.value, "theta = 2")
        if ell < 1:
            raise HypothesisError(which.value, "ell >= 1")
        if params.n >= 6 and ell <= params.n / 4 - 0.5:
            notes.append(
                f"remainder rate t^-{ell:g} does not beat the profile rate t^-{(params.n - 2) / 4:g} "
                f"(needs ell > n/4 - 1/2 = {params.n / 4 - 0.5:g})"
            )
    return notes


def theorem_rhs(
    which: Theorem,
    params: ModelParams,
    data: tuple[InitialDatum, InitialDatum],
    ell: float,
    t: float,
    delta0: float = DEFAULT_DELTA0,
) -> float:
    """Norm-weighted right-hand side with unit constants."""
    u0, u1 = data
    theta, n = params.theta, params.n
    if which is Theorem.ENERGY_DECAY:
        return (
            (1 + t) ** (-n / (2 * theta)) * u1.norm_l1**2
            + (1 + t) ** (-(n + 2) / (2 * theta)) * u0.norm_l1**2
            + (1 + t) ** (-ell / (theta - 1)) * (u1.sobolev(ell) ** 2 + u0.sobolev(ell + 1) ** 2)
        )
    if which is Theorem.L2_DECAY:
        return (
            (1 + t) ** (-(n - 2) / (2 * theta)) * u1.norm_l1**2
            + (1 + t) ** (-n / (2 * theta)) * u0.norm_l1**2
            + (1 + t) ** (-ell / (theta - 1)) * (u1.sobolev(ell - 1) ** 2 + u0.sobolev(ell) ** 2)
        )
    # the exponential term decays at the high-frequency damping rate delta0^4 / 2
    return (
        u1.norm_l11**2 * t ** (-n / 4)
        + u0.norm_l11**2 * t ** (-(n + 2) / 4)
        + math.exp(-t * delta0**4 / 2) * (u1.norm_l1**2 + u0.norm_l1**2 + u1.l2_norm**2 + u0.l2_norm**2)
        + t ** (-ell) * (u1.sobolev(ell - 1) ** 2 + u0.sobolev(ell) ** 2)
    )


def predicted_exponent(which: Theorem, params: ModelParams, data: tuple[InitialDatum, InitialDatum]) -> float:
    """Leading low-frequency exponent for the data actually present."""
    theta, n = params.theta, params.n
    velocity_present = not data[1].is_zero
    if which is Theorem.ENERGY_DECAY:
        return -n / (2 * theta) if velocity_present else -(n + 2) / (2 * theta)
    if which is Theorem.L2_DECAY:
        return -(n - 2) / (2 * theta) if velocity_present else -n / (2 * theta)
    return -n / 4 if velocity_present else -(n + 2) / 4


def _left_hand_side(which: Theorem, solution: SpectralSolution) -> Callable[[float], float]:
    if which is Theorem.ENERGY_DECAY:
        return solution.energy
    if which is Theorem.L2_DECAY:
        return solution.l2_sq
    return solution.profile_error_sq


def _zero_report(predicted: float, tolerance: float, message: str) -> DecayReport:
    logger.info("%s", message)
    return DecayReport(
        samples=(),
        fitted_slope=math.nan,
        slope_stderr=math.nan,
        predicted_slope=predicted,
        ratio_spread=1.0,
        verdict=Verdict.PASS,
        tolerance=tolerance,
        mode=FitMode.UPPER_BOUND,
        fitted_constant=0.0,
        message=message,
    )


def _bounded_by(
    report: DecayReport, rhs: Iterable[float], spread_bound: float, require_slope: bool, notes: list[str]
) -> DecayReport:
    values = np.array([value for _, value in report.samples])
    if np.any(values <= 0):
        return report
    stats = RatioStats.from_values(values / np.array(list(rhs)))
    spread = stats.spread(FitMode.UPPER_BOUND)
    passed = spread <= spread_bound
    if require_slope:
        passed = passed and report.passed
    return dataclasses.replace(
        report,
        ratio_spread=spread,
        spread_bound=spread_bound,
        mode=FitMode.UPPER_BOUND if not require_slope else FitMode.RATE,
        fitted_constant=stats.max,
        verdict=Verdict.of(bool(passed)),
        message="; ".join([report.message, *notes]).strip("; "),
    )


def run_theorem_decay(
    which: Theorem,
    params: ModelParams,
    data: tuple[InitialDatum, InitialDatum],
    ell: float,
    t_grid: Iterable[float],
    *,
    settings: QuadratureSettings = QuadratureSettings(),
    tolerance: float | None = None,
    spread_bound: float = DEFAULT_SPREAD_BOUND,
    delta0: float = DEFAULT_DELTA0,
) -> DecayReport:
    notes = check_hypotheses(which, params, ell)
    for note in notes:
        logger.warning("%s: %s", which.value, note)

    predicted = predicted_exponent(which, params, data)
    slope_tolerance = DEFAULT_SLOPE_TOLERANCE[which] if tolerance is None else tolerance
    solution = SpectralSolution(params, data, settings)
    if solution.is_zero:
        return _zero_report(predicted, slope_tolerance, "zero data: every norm vanishes identically")

    times = [float(t) for t in t_grid]
    lhs = _left_hand_side(which, solution)
    samples = [(t, lhs(t)) for t in times]
    logger.info("%s: evaluated %d samples", which.value, len(samples))

    # the profile error only has to stay below its bound, it may decay faster
    require_slope = which is not Theorem.PROFILE_ERROR
    report = fit_decay_rate(
        samples,
        predicted,
        mode=FitMode.RATE if require_slope else FitMode.UPPER_BOUND,
        tolerance=slope_tolerance,
        spread_bound=None if require_slope else spread_bound,
    )
    rhs = [theorem_rhs(which, params, data, ell, t, delta0) for t in times]
    return _bounded_by(report, rhs, spread_bound, require_slope, notes)


def low_frequency_error(
    params: ModelParams,
    data: tuple[InitialDatum, InitialDatum],
    t_grid: Iterable[float],
    *,
    delta0: float = DEFAULT_DELTA0,
    settings: QuadratureSettings = QuadratureSettings(),
    spread_bound: float = DEFAULT_SPREAD_BOUND,
) -> DecayReport:
    """Profile error restricted to |xi| <= delta0, against the same bound as the full error."""
    params.require_profile_exponent()
    validate_delta0(delta0)
    predicted = predicted_exponent(Theorem.PROFILE_ERROR, params, data)
    solution = SpectralSolution(params, data, settings)
    if solution.is_zero:
        return _zero_report(predicted, math.nan, "zero data: the low-frequency error vanishes")

    times = [float(t) for t in t_grid]
    samples = [(t, solution.profile_error_sq(t, upper=delta0)) for t in times]
    report = fit_decay_rate(samples, predicted, mode=FitMode.UPPER_BOUND, spread_bound=spread_bound)
    n = params.n
    rhs = [data[1].norm_l11**2 * t ** (-n / 4) + data[0].norm_l11**2 * t ** (-(n + 2) / 4) for t in times]
    return _bounded_by(report, rhs, spread_bound, False, [])


def low_frequency_components(
    params: ModelParams,
    data: tuple[InitialDatum, InitialDatum],
    t_grid: Iterable[float],
    *,
    delta0: float = DEFAULT_DELTA0,
    settings: QuadratureSettings = QuadratureSettings(),
    spread_bound: float = DEFAULT_SPREAD_BOUND,
) -> dict[str, DecayReport]:
    """Integrals of |K1|^2, |K2|^2, |K3|^2 over |xi| <= delta0, each against its own rate."""
    params.require_profile_exponent()
    n = params.n
    solution = SpectralSolution(params, data, settings)
    p = solution.profile_params
    times = [float(t) for t in t_grid]
    rates = {
        "k1": (-(n + 6) / 4, p.p0**2),
        "k2": (-n / 4, data[1].norm_l11**2),
        "k3": (-(n + 2) / 4, data[0].norm_l11**2),
    }

    values: dict[str, list[float]] = {name: [] for name in rates}
    for t in times:
        plan = solution.plan(t, upper=delta0)
        for name in rates:

            def density(r: FloatArray, t: float = t, name: str = name) -> FloatArray:
                return np.asarray(getattr(remainder_arrays(t, r, data, p, delta0), name)) ** 2

            values[name].append(integrate_radial(RadialIntegrand(density, n), plan).value)

    reports = {}
    for name, (rate, weight) in rates.items():
        if weight == 0:
            reports[name] = _zero_report(rate, math.nan, f"{name} vanishes for these data")
            continue
        samples = list(zip(times, values[name]))
        report = fit_decay_rate(samples, rate, mode=FitMode.UPPER_BOUND, spread_bound=spread_bound)
        reports[name] = _bounded_by(report, [weight * t**rate for t in times], spread_bound, False, [])
    return reports


def check_decomposition(
    t_grid: Iterable[float],
    r_grid: Iterable[float],
    data: tuple[InitialDatum, InitialDatum],
    *,
    delta0: float = DEFAULT_DELTA0,
) -> InequalityReport:
    """Pointwise |u_hat - profile - K1 - K2 - K3| against the envelope sum."""
    n = data[0].n
    params = ModelParams(theta=2.0, n=n)
    solution = SpectralSolution(params, data)
    p = solution.profile_params
    radii = np.asarray(list(r_grid), dtype=np.float64)
    times = np.asarray(list(t_grid), dtype=np.float64)

    violations = []
    for t in times:
        u, _ = solution.spectrum(float(t), radii)
        terms = remainder_arrays(float(t), radii, data, p, delta0)
        residual = np.abs(u - profile_hat(float(t), radii, p, params) - terms.k1 - terms.k2 - terms.k3)
        violations.append(relative_violation(residual, terms.envelope_total + terms.rounding_bound))

    grid = f"t in [{times.min():.3g}, {times.max():.3g}] ({times.size}) x r in (0, {radii.max():.3g}] ({radii.size})"
    return inequality_report(
        "decomposition", grid, np.stack(violations), times[:, None], radii[None, :]
    )


def initial_size(data: tuple[InitialDatum, InitialDatum], ell: float) -> float:
    """Sum of the norms controlling the two-sided L2 bounds."""
    u0, u1 = data
    return (
        u0.l2_norm + u0.norm_l1 + u0.norm_l11 + u0.sobolev(ell)
        + u1.l2_norm + u1.norm_l1 + u1.norm_l11 + u1.sobolev(ell - 1)
    )


def two_sided_l2(
    params: ModelParams,
    data: tuple[InitialDatum, InitialDatum],
    ell: float,
    t_grid: Iterable[float],
    *,
    settings: QuadratureSettings = QuadratureSettings(),
    spread_bound: float = TWO_SIDED_SPREAD_BOUND,
) -> DecayReport:
    """||u(t)|| normalised by t^(-(n-2)/8), sqrt(log t) or sqrt(t) must stay in a fixed band."""
    check_hypotheses(Theorem.PROFILE_ERROR, params, ell)
    p1 = data[1].mass
    if p1 == 0:
        raise ParameterError("two-sided L2 bounds need a velocity datum with nonzero mass")

    solution = SpectralSolution(params, data, settings)
    n = params.n
    samples = [(float(t), math.sqrt(solution.l2_sq(float(t)))) for t in t_grid]
    if n == 2:
        report = fit_decay_rate(samples, 0.0, mode=FitMode.LOG_TWO_SIDED, spread_bound=spread_bound, log_power=0.5)
    else:
        predicted = 0.5 if n == 1 else -(n - 2) / 8
        report = fit_decay_rate(samples, predicted, mode=FitMode.TWO_SIDED, spread_bound=spread_bound)

    if n == 2:
        ratios = [value / math.sqrt(math.log(t)) for t, value in samples]
    else:
        ratios = [value * t ** (-report.predicted_slope) for t, value in samples]
    size = initial_size(data, ell)
    return dataclasses.replace(
        report,
        extras={"C1": min(ratios) / abs(p1), "C2": max(ratios) / size, "I0": size},
    )

