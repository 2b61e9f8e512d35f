import math

from dataclasses import dataclass
from functools import lru_cache

from scipy.optimize import brentq


@dataclass(frozen=True)
class ContinuityConstants:
    """Suprema of |1 - cos s| / |s| (l) and |sin s| / |s| (m) over s != 0."""

    l: float  # noqa: E741
    m: float
    maximizer: float


def _stationarity(s: float) -> float:
    # derivative of (1 - cos s) / s times s^2
    return s * math.sin(s) - (1.0 - math.cos(s))


@lru_cache(maxsize=1)
def continuity_constants() -> ContinuityConstants:
    # the only interior critical point in the first period lies in [2, 3]
    s = float(brentq(_stationarity, 2.0, 3.0, xtol=1e-15, rtol=4 * math.ulp(1.0)))
    return ContinuityConstants(l=(1.0 - math.cos(s)) / s, m=1.0, maximizer=s)
