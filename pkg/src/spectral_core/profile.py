from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import numpy.typing as npt

from src.spectral_core.errors import ParameterError
from src.spectral_core.models import ModelParams, ProfileParams, RemainderTerms


if TYPE_CHECKING:
    from src.data_library.datum import InitialDatum


FloatArray = npt.NDArray[np.float64]

DEFAULT_DELTA0 = 0.5
# 4^(1/6), the confluence radius for theta = 2
PROFILE_CONFLUENCE_RADIUS = 4.0 ** (1.0 / 6.0)
ROUNDING_FACTOR = 512.0


def profile_hat(
    t: float,
    r: npt.ArrayLike,
    p: ProfileParams,
    params: ModelParams | None = None,
) -> FloatArray:
    """Diffusion-wave profile e^(-t r^4 / 2) (P1 sin(t r) / r + P0 cos(t r)).

    The profile itself does not depend on theta; it approximates the solution only for theta = 2.
    Pass `params` to have that checked; without it the caller is responsible for theta = 2.
    """
    if params is not None:
        params.require_profile_exponent()
    if t < 0:
        raise ParameterError(f"time must be nonnegative, got {t}")
    radii = np.asarray(r, dtype=np.float64)
    if np.any(radii < 0):
        raise ParameterError("frequency modulus must be nonnegative")

    envelope = np.exp(-0.5 * t * radii**4)
    # sin(t r) / r == t * sinc(t r / pi), finite at r = 0
    wave = p.p1 * t * np.sinc(t * radii / np.pi) + p.p0 * np.cos(t * radii)
    return envelope * wave


def validate_delta0(delta0: float) -> None:
    if not 0 < delta0 < PROFILE_CONFLUENCE_RADIUS:
        raise ParameterError(f"delta0 must lie in (0, 4^(1/6)), got {delta0}")


@dataclass(frozen=True)
class RemainderArrays:
    k1: FloatArray
    k2: FloatArray
    k3: FloatArray
    env4: FloatArray
    env5: FloatArray
    env6: FloatArray
    envelope_total: FloatArray
    rounding_bound: FloatArray


def remainder_arrays(
    t: float,
    r: npt.ArrayLike,
    data: tuple[InitialDatum, InitialDatum],
    p: ProfileParams,
    delta0: float = DEFAULT_DELTA0,
) -> RemainderArrays:
    """Explicit remainders K1..K3 and envelopes of the implicit K4..K6 on a low-frequency grid."""
    validate_delta0(delta0)
    if t < 0:
        raise ParameterError(f"time must be nonnegative, got {t}")
    radii = np.asarray(r, dtype=np.float64)
    if np.any(radii <= 0) or np.any(radii > delta0):
        raise ParameterError(f"remainder terms need 0 < r <= delta0={delta0}")

    a0 = data[0].deviation(radii)
    a1 = data[1].deviation(radii)

    r6 = radii**6
    root = np.sqrt(4.0 - r6)
    phase = 0.5 * t * radii * root
    envelope = np.exp(-0.5 * t * radii**4)
    skew = radii**3 * envelope * np.sin(phase) / root

    sine_kernel = envelope * t * np.sinc(phase / np.pi)
    cosine_kernel = skew + envelope * np.cos(phase)

    env4 = t * envelope * r6 / root
    env5 = t * radii * envelope * r6 / 2
    env6 = abs(p.p1) * envelope * t * 6 * r6 / (4.0 - r6) ** 1.5
    magnitude = (abs(p.p1) + np.abs(a1)) * np.minimum(t, 1 / radii) + abs(p.p0) + np.abs(a0)

    return RemainderArrays(
        k1=p.p0 * skew,
        k2=a1 * sine_kernel,
        k3=a0 * cosine_kernel,
        env4=env4,
        env5=env5,
        env6=env6,
        envelope_total=abs(p.p1) * env4 + abs(p.p0) * env5 + env6,
        rounding_bound=ROUNDING_FACTOR * np.finfo(np.float64).eps * (1 + t * radii) * envelope * magnitude,
    )


def remainder_terms(
    t: float,
    r: float,
    data: tuple[InitialDatum, InitialDatum],
    p: ProfileParams,
    delta0: float = DEFAULT_DELTA0,
) -> RemainderTerms:
    terms = remainder_arrays(t, np.array([r]), data, p, delta0)
    return RemainderTerms(
        k1=complex(terms.k1[0]),
        k2=complex(terms.k2[0]),
        k3=complex(terms.k3[0]),
        env4=float(terms.env4[0]),
        env5=float(terms.env5[0]),
        env6=float(terms.env6[0]),
        envelope_total=float(terms.envelope_total[0]),
        rounding_bound=float(terms.rounding_bound[0]),
    )
