import logging
import math

from typing import Iterable

import numpy as np

from scipy.stats import linregress

from src.spectral_core.errors import ParameterError
from src.verification_harness.reports import DecayReport, FitMode, RatioStats, Verdict


logger = logging.getLogger(__name__)

MIN_RATE_SAMPLES = 8
DEFAULT_SPREAD_BOUND = 3.0


def fit_decay_rate(
    samples: Iterable[tuple[float, float]],
    predicted_slope: float = math.nan,
    *,
    mode: FitMode = FitMode.RATE,
    tolerance: float = 0.05,
    spread_bound: float | None = None,
    shift: float = 0.0,
    log_power: float = 1.0,
) -> DecayReport:
    """Least-squares slope on log-log axes plus the spread of value / reference(t).

    The reference is (t + shift)^predicted_slope, or log(t)^log_power in log mode.
    """
    points = tuple((float(t), float(value)) for t, value in samples)
    minimum = MIN_RATE_SAMPLES if mode is FitMode.RATE else 2
    if len(points) < minimum:
        raise ParameterError(f"{mode.value} fits need at least {minimum} samples, got {len(points)}")

    times = np.array([t for t, _ in points])
    values = np.array([value for _, value in points])
    if np.any(times <= 0):
        raise ParameterError("sample times must be positive")
    if mode is not FitMode.RATE and spread_bound is None:
        spread_bound = DEFAULT_SPREAD_BOUND

    bad = ~(np.isfinite(values) & (values > 0))
    if np.any(bad):
        index = int(np.argmax(bad))
        message = f"nonpositive value {values[index]:.6e} at t={times[index]:.6e}"
        logger.warning("decay fit rejected: %s", message)
        return DecayReport(
            samples=points,
            fitted_slope=math.nan,
            slope_stderr=math.nan,
            predicted_slope=predicted_slope,
            ratio_spread=math.nan,
            verdict=Verdict.FAIL,
            tolerance=tolerance,
            mode=mode,
            spread_bound=spread_bound,
            message=message,
        )

    slope = stderr = math.nan
    if len(points) >= 3:
        fit = linregress(np.log(times), np.log(values))
        slope, stderr = float(fit.slope), float(fit.stderr)
    else:
        logger.warning("only %d samples, skipping the slope fit", len(points))

    if mode is FitMode.LOG_TWO_SIDED:
        if np.any(times <= 1):
            raise ParameterError("logarithmic references need t > 1")
        reference = np.log(times) ** log_power
    else:
        reference = (times + shift) ** predicted_slope
    stats = RatioStats.from_values(values / reference)
    spread = stats.spread(mode)

    if mode is FitMode.RATE:
        passed = abs(slope - predicted_slope) <= tolerance
        if spread_bound is not None:
            passed = passed and spread <= spread_bound
    else:
        passed = spread <= (spread_bound if spread_bound is not None else DEFAULT_SPREAD_BOUND)

    return DecayReport(
        samples=points,
        fitted_slope=slope,
        slope_stderr=stderr,
        predicted_slope=predicted_slope,
        ratio_spread=spread,
        verdict=Verdict.of(bool(passed)),
        tolerance=tolerance,
        mode=mode,
        spread_bound=spread_bound,
        fitted_constant=stats.max,
    )
