from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from src.spectral_core.errors import ParameterError
from src.spectral_core.models import CONFLUENCE_THRESHOLD, ModelParams, Regime, RootPair


FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]


@dataclass(frozen=True)
class RootArrays:
    """Roots of lambda^2 + r^(2 theta) lambda + r^2 = 0 on a whole frequency grid."""

    r: FloatArray
    sigma1: ComplexArray
    sigma2: ComplexArray
    oscillatory: npt.NDArray[np.bool_]
    critical: npt.NDArray[np.bool_]
    overdamped: npt.NDArray[np.bool_]

    def regime_at(self, index: int) -> Regime:
        if self.critical[index]:
            return Regime.CRITICAL
        if self.oscillatory[index]:
            return Regime.OSCILLATORY
        return Regime.OVERDAMPED


def root_arrays(params: ModelParams, r: npt.ArrayLike) -> RootArrays:
    radii = np.asarray(r, dtype=np.float64)
    if np.any(radii < 0) or not np.all(np.isfinite(radii)):
        raise ParameterError("frequency modulus must be finite and nonnegative")

    mean = -0.5 * radii ** (2 * params.theta)
    # s^2 - r^2 = (r^2 / 4) * (r^(4 theta - 2) - 4)
    gap = radii ** (4 * params.theta - 2) - 4.0
    critical = (np.abs(gap) < CONFLUENCE_THRESHOLD) | (radii == 0)
    oscillatory = (gap < 0) & ~critical
    overdamped = (gap > 0) & ~critical

    half_gap = np.zeros(radii.shape, dtype=np.complex128)
    below = gap < 0
    above = ~below
    half_gap[below] = 0.5j * radii[below] * np.sqrt(-gap[below])
    half_gap[above] = 0.5 * radii[above] * np.sqrt(gap[above])

    sigma1 = mean + half_gap
    sigma2 = mean - half_gap
    # the slow overdamped root comes from Vieta to avoid cancellation in s + delta
    slow = overdamped & (radii > 0)
    sigma1[slow] = radii[slow] ** 2 / sigma2[slow]

    return RootArrays(
        r=radii,
        sigma1=sigma1,
        sigma2=sigma2,
        oscillatory=oscillatory,
        critical=critical,
        overdamped=overdamped,
    )


def characteristic_roots(params: ModelParams, r: float) -> RootPair:
    roots = root_arrays(params, np.array([r], dtype=np.float64))
    return RootPair(
        sigma1=complex(roots.sigma1[0]),
        sigma2=complex(roots.sigma2[0]),
        regime=roots.regime_at(0),
        r=float(r),
    )
