import math

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
import numpy.typing as npt

from src.spectral_core.errors import ParameterError


INEQUALITY_SLACK = 1e-12
TINY = 1e-300


class Verdict(Enum):
    PASS = "pass"
    FAIL = "fail"

    @classmethod
    def of(cls, passed: bool) -> "Verdict":
        return cls.PASS if passed else cls.FAIL


class FitMode(Enum):
    RATE = "rate"
    TWO_SIDED = "two_sided"
    UPPER_BOUND = "upper_bound"
    LOG_TWO_SIDED = "log_two_sided"


@dataclass(frozen=True)
class RatioStats:
    first: float = math.nan
    min: float = math.nan
    max: float = math.nan

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "RatioStats":
        if not len(values):
            return cls()
        np_values = np.asarray(values, dtype=np.float64)
        return cls(first=float(np_values[0]), min=float(np.min(np_values)), max=float(np.max(np_values)))

    def spread(self, mode: FitMode) -> float:
        if mode is FitMode.UPPER_BOUND:
            return self.max / self.first
        return self.max / self.min


@dataclass(frozen=True)
class DecayReport:
    samples: tuple[tuple[float, float], ...]
    fitted_slope: float
    slope_stderr: float
    predicted_slope: float
    ratio_spread: float
    verdict: Verdict
    tolerance: float
    mode: FitMode = FitMode.RATE
    spread_bound: float | None = None
    fitted_constant: float = math.nan
    message: str = ""
    extras: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS


@dataclass(frozen=True)
class InequalityReport:
    name: str
    grid: str
    max_violation: float
    worst_point: tuple[float, float]
    verdict: Verdict
    n_points: int
    slack: float = INEQUALITY_SLACK

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS


def relative_violation(lhs: npt.ArrayLike, rhs: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """(lhs - rhs) scaled by the larger magnitude, so lhs <= rhs reads as a nonpositive number."""
    left = np.asarray(lhs, dtype=np.float64)
    right = np.asarray(rhs, dtype=np.float64)
    scale = np.maximum(np.maximum(np.abs(left), np.abs(right)), TINY)
    return (left - right) / scale


def inequality_report(
    name: str,
    grid: str,
    violation: npt.ArrayLike,
    t: npt.ArrayLike,
    r: npt.ArrayLike,
    slack: float = INEQUALITY_SLACK,
) -> InequalityReport:
    values = np.asarray(violation, dtype=np.float64)
    times = np.broadcast_to(np.asarray(t, dtype=np.float64), values.shape)
    radii = np.broadcast_to(np.asarray(r, dtype=np.float64), values.shape)
    if values.size == 0:
        raise ParameterError(f"inequality {name} was evaluated on an empty grid")
    worst = np.unravel_index(int(np.argmax(values)), values.shape)
    max_violation = float(values[worst])
    return InequalityReport(
        name=name,
        grid=grid,
        max_violation=max_violation,
        worst_point=(float(times[worst]), float(radii[worst])),
        verdict=Verdict.of(max_violation <= slack),
        n_points=int(values.size),
        slack=slack,
    )


def log_grid(t_min: float, t_max: float, points_per_decade: int) -> npt.NDArray[np.float64]:
    if not 0 < t_min < t_max or points_per_decade < 1:
        raise ParameterError(f"invalid log grid [{t_min}, {t_max}] with {points_per_decade} points per decade")
    decades = math.log10(t_max / t_min)
    count = max(2, round(decades * points_per_decade) + 1)
    return np.logspace(math.log10(t_min), math.log10(t_max), count)
