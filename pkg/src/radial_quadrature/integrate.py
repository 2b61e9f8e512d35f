import logging
import math

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
import numpy.typing as npt

from numpy.polynomial.legendre import leggauss
from scipy.special import gamma

from src.radial_quadrature.plan import PanelSegment, QuadraturePlan
from src.spectral_core.errors import ParameterError, QuadratureConvergenceError


logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
RadialFunction = Callable[[FloatArray], npt.NDArray[np.generic]]

# nodes evaluated per vectorised call
CHUNK_NODES = 1 << 18
# cancellation floor, in units of eps times the absolute integral
ROUNDOFF_FACTOR = 1e3


@dataclass(frozen=True)
class RadialIntegrand:
    eval: RadialFunction
    n: int
    singular_order: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ParameterError(f"dimension must be positive, got {self.n}")
        if not 0 <= self.singular_order <= self.n - 1:
            raise ParameterError(f"singular order must lie in [0, n - 1], got {self.singular_order} for n={self.n}")


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    n_evaluations: int


@lru_cache(maxsize=None)
def _reference_rule(points: int) -> tuple[FloatArray, FloatArray]:
    nodes, weights = leggauss(points)
    return nodes, weights


def sphere_measure(n: int) -> float:
    if n < 1:
        raise ParameterError(f"dimension must be positive, got {n}")
    return float(2 * math.pi ** (n / 2) / gamma(n / 2))


def _panel_sums(
    fn: RadialFunction, segment: PanelSegment, first: int, points: int
) -> tuple[float, float, int]:
    nodes, weights = _reference_rule(points)
    half = segment.width / 2
    panels_per_chunk = max(1, CHUNK_NODES // points)
    total = 0.0
    magnitude = 0.0
    evaluations = 0
    for begin in range(first, segment.count, panels_per_chunk):
        index = np.arange(begin, min(begin + panels_per_chunk, segment.count))
        left = segment.start + index * segment.width
        grid = left[:, None] + (nodes[None, :] + 1.0) * half
        values = np.asarray(fn(grid.ravel()), dtype=np.float64).reshape(grid.shape)
        total += float(np.sum(values @ weights)) * half
        magnitude += float(np.sum(np.abs(values) @ weights)) * half
        evaluations += values.size
    return total, magnitude, evaluations


def _singular_panel(
    regular: RadialFunction, segment: PanelSegment, power: int, points: int
) -> tuple[float, float, int]:
    # int_0^b r^m g(r) dr = b^(m+1)/(m+1) int_0^1 g(b s^(1/(m+1))) ds
    nodes, weights = _reference_rule(points)
    b = segment.width
    s = (nodes + 1.0) / 2
    values = np.asarray(regular(b * s ** (1.0 / (power + 1))), dtype=np.float64)
    scale = b ** (power + 1) / (power + 1) / 2
    return float(values @ weights) * scale, float(np.abs(values) @ weights) * scale, values.size


def _line_sum(
    weighted: RadialFunction,
    plan: QuadraturePlan,
    singular: tuple[RadialFunction, int] | None,
) -> tuple[float, float, int]:
    total = 0.0
    magnitude = 0.0
    evaluations = 0
    for position, segment in enumerate(plan.segments):
        first = 0
        if position == 0 and singular is not None and segment.start == 0:
            regular, power = singular
            value, size, count = _singular_panel(regular, segment, power, plan.points_per_panel)
            total += value
            magnitude += size
            evaluations += count
            first = 1
        value, size, count = _panel_sums(weighted, segment, first, plan.points_per_panel)
        total += value
        magnitude += size
        evaluations += count
    return total, magnitude, evaluations


def _converged(
    weighted: RadialFunction,
    plan: QuadraturePlan,
    singular: tuple[RadialFunction, int] | None,
    strict: bool,
) -> QuadratureResult:
    coarse, _, coarse_count = _line_sum(weighted, plan, singular)
    fine, magnitude, fine_count = _line_sum(weighted, plan.halved(), singular)
    error = abs(fine - coarse)
    allowed = max(plan.tolerance * abs(fine), ROUNDOFF_FACTOR * np.finfo(np.float64).eps * magnitude)
    logger.debug(
        "radial quadrature over %d panels: value=%.12e error=%.3e", plan.panel_count, fine, error
    )
    if error > allowed:
        if strict:
            raise QuadratureConvergenceError(fine, error, plan.tolerance)
        logger.warning("quadrature refinement disagreement %.3e above %.3e", error, allowed)
    return QuadratureResult(value=fine, error=error, n_evaluations=coarse_count + fine_count)


def integrate_line(fn: RadialFunction, plan: QuadraturePlan, *, strict: bool = True) -> QuadratureResult:
    """One-dimensional integral of `fn` over the plan's range."""
    return _converged(fn, plan, None, strict)


def integrate_radial(f: RadialIntegrand, plan: QuadraturePlan, *, strict: bool = True) -> QuadratureResult:
    """Integral of the radial function f over the shell lower <= |xi| <= R in R^n."""
    n = f.n

    def weighted(r: FloatArray) -> npt.NDArray[np.generic]:
        return np.asarray(f.eval(r)) * r ** (n - 1)

    singular = None
    if f.singular_order > 0:
        k = f.singular_order

        def regular(r: FloatArray) -> npt.NDArray[np.generic]:
            return np.asarray(f.eval(r)) * r**k

        singular = (regular, n - 1 - k)

    result = _converged(weighted, plan, singular, strict)
    measure = sphere_measure(n)
    return QuadratureResult(
        value=measure * result.value,
        error=measure * result.error,
        n_evaluations=result.n_evaluations,
    )


def l2_distance_sq(
    a: RadialFunction,
    b: RadialFunction,
    n: int,
    plan: QuadraturePlan,
    *,
    strict: bool = True,
) -> QuadratureResult:
    def squared_gap(r: FloatArray) -> FloatArray:
        return np.abs(np.asarray(a(r)) - np.asarray(b(r))) ** 2

    return integrate_radial(RadialIntegrand(squared_gap, n), plan, strict=strict)
