import math

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from scipy.optimize import minimize_scalar

from src.radial_quadrature.integrate import FloatArray, RadialIntegrand, integrate_radial
from src.radial_quadrature.plan import QuadraturePlan
from src.spectral_core.errors import ParameterError
from src.verification_harness.decay_fit import fit_decay_rate
from src.verification_harness.reports import DecayReport, FitMode


SUP_GRID_POINTS = 20001
SUP_GRID_DECADES = 10.0


def unit_ball_moment(
    theta: float,
    alpha: float,
    k: float,
    n: int,
    t: float,
    *,
    inverse: bool = False,
    points_per_panel: int = 16,
    tolerance: float = 1e-8,
) -> float:
    """Integral of e^(-alpha t |xi|^(2 theta)) |xi|^(+-k) over the unit ball."""
    if theta <= 1 or alpha <= 0 or t < 0:
        raise ParameterError(f"need theta > 1, alpha > 0, t >= 0; got {theta}, {alpha}, {t}")
    if k < 0:
        raise ParameterError(f"weight exponent must be nonnegative, got {k}")
    if inverse and (k > n - 1 or int(k) != k):
        raise ParameterError(f"inverse weights need an integer k <= n - 1, got k={k}, n={n}")

    exponent = -k if inverse else k

    def weighted(r: FloatArray) -> FloatArray:
        return np.exp(-alpha * t * r ** (2 * theta)) * r**exponent

    integrand = RadialIntegrand(weighted, n, singular_order=int(k) if inverse else 0)
    plan = QuadraturePlan.for_decay(
        alpha * t,
        2 * theta,
        outer_radius=1.0,
        points_per_panel=points_per_panel,
        tolerance=tolerance,
    )
    return integrate_radial(integrand, plan).value


def check_unit_ball_decay(
    theta: float,
    alpha: float,
    k: float,
    n: int,
    t_grid: Iterable[float],
    *,
    inverse: bool = False,
    tolerance: float = 0.03,
    spread_bound: float = 3.0,
) -> DecayReport:
    predicted = -(n - k) / (2 * theta) if inverse else -(k + n) / (2 * theta)
    samples = [(float(t), unit_ball_moment(theta, alpha, k, n, float(t), inverse=inverse)) for t in t_grid]
    return fit_decay_rate(samples, predicted, tolerance=tolerance, spread_bound=spread_bound, shift=1.0)


@dataclass(frozen=True)
class HighFrequencySup:
    closed_form: float
    numeric_max: float
    bound: float
    maximizer: float


def high_freq_sup(theta: float, ell: float, alpha: float, t: float) -> HighFrequencySup:
    """Supremum over r >= 1 of e^(-alpha t / (2 r^(2 theta - 2))) r^(-2 ell)."""
    if ell <= 0 or theta <= 1 or alpha <= 0 or t < 0:
        raise ParameterError(f"need ell > 0, theta > 1, alpha > 0, t >= 0; got {ell}, {theta}, {alpha}, {t}")

    k = ell / (theta - 1)
    stationary = alpha * t / (2 * k)  # in y = r^(2 theta - 2)
    if stationary >= 1:
        closed_form = math.exp(-k) * (2 * k / (alpha * t)) ** k
    else:
        closed_form = math.exp(-alpha * t / 2)

    def log_value(log_y: float) -> float:
        return -alpha * t / (2 * math.exp(log_y)) - k * log_y

    top = math.log(max(stationary, 1.0)) + SUP_GRID_DECADES
    grid = np.linspace(0.0, top, SUP_GRID_POINTS)
    logs = -alpha * t / (2 * np.exp(grid)) - k * grid
    best = int(np.argmax(logs))
    log_y, log_max = float(grid[best]), float(logs[best])
    if 0 < best < grid.size - 1:
        polished = minimize_scalar(
            lambda s: -log_value(s),
            bounds=(float(grid[best - 1]), float(grid[best + 1])),
            method="bounded",
            options={"xatol": 1e-12},
        )
        if -polished.fun > log_max:
            log_y, log_max = float(polished.x), -float(polished.fun)

    constant = math.exp(alpha / 2) * alpha ** (-k) * (2 * k) ** k * math.exp(-k)
    return HighFrequencySup(
        closed_form=closed_form,
        numeric_max=math.exp(log_max),
        bound=constant * (1 + t) ** (-k),
        maximizer=math.exp(log_y / (2 * theta - 2)),
    )


def high_freq_sup_rate(
    theta: float, ell: float, alpha: float, t_grid: Iterable[float], *, tolerance: float = 0.02
) -> DecayReport:
    samples = [(float(t), high_freq_sup(theta, ell, alpha, float(t)).closed_form) for t in t_grid]
    return fit_decay_rate(samples, -ell / (theta - 1), tolerance=tolerance, mode=FitMode.RATE)
