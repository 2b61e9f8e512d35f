from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from src.spectral_core.errors import ParameterError
from src.spectral_core.models import ModelParams, RootPair, SpectralState
from src.spectral_core.roots import ComplexArray, root_arrays


SERIES_RADIUS = 0.5
SERIES_TERMS = 8


@dataclass(frozen=True)
class Propagator:
    """Fundamental solutions of the per-frequency ODE and their time derivatives.

    u(t) = m1 * u1 + m0 * u0 and u_t(t) = dm1 * u1 + dm0 * u0.
    """

    m1: ComplexArray
    m0: ComplexArray
    dm1: ComplexArray
    dm0: ComplexArray


def _sinhc(z: ComplexArray) -> ComplexArray:
    # sum_k z^(2k) / (2k+1)! in Horner form, accurate for |z| < SERIES_RADIUS
    z2 = z * z
    acc = np.ones_like(z)
    for k in range(SERIES_TERMS - 1, 0, -1):
        acc = 1.0 + acc * z2 / ((2 * k) * (2 * k + 1))
    return acc


def propagator(
    sigma1: npt.ArrayLike, sigma2: npt.ArrayLike, r_squared: npt.ArrayLike, t: npt.ArrayLike
) -> Propagator:
    """`t` is a single time or one time per frequency."""
    s1 = np.atleast_1d(np.asarray(sigma1, dtype=np.complex128))
    s2 = np.atleast_1d(np.asarray(sigma2, dtype=np.complex128))
    r2 = np.broadcast_to(np.asarray(r_squared, dtype=np.float64), s1.shape)
    times = np.broadcast_to(np.asarray(t, dtype=np.float64), s1.shape)
    if np.any(times < 0) or not np.all(np.isfinite(times)):
        raise ParameterError(f"time must be finite and nonnegative, got {t}")

    mean = 0.5 * (s1 + s2)
    half_gap = 0.5 * (s1 - s2)
    z = half_gap * times
    near = np.abs(z) < SERIES_RADIUS
    far = ~near

    m1 = np.empty_like(s1)
    m0 = np.empty_like(s1)
    dm1 = np.empty_like(s1)

    if np.any(near):
        envelope = np.exp(mean[near] * times[near])
        sine_part = times[near] * _sinhc(z[near])
        cosine_part = np.cosh(z[near])
        m1[near] = envelope * sine_part
        m0[near] = envelope * (cosine_part - mean[near] * sine_part)
        dm1[near] = envelope * (cosine_part + mean[near] * sine_part)

    if np.any(far):
        e1 = np.exp(s1[far] * times[far])
        e2 = np.exp(s2[far] * times[far])
        gap = 2.0 * half_gap[far]
        m1[far] = (e1 - e2) / gap
        m0[far] = (s1[far] * e2 - s2[far] * e1) / gap
        dm1[far] = (s1[far] * e1 - s2[far] * e2) / gap

    return Propagator(m1=m1, m0=m0, dm1=dm1, dm0=-r2 * m1)


def evolve_exact(roots: RootPair, u0_hat: complex, u1_hat: complex, t: float) -> SpectralState:
    kernel = propagator(roots.sigma1, roots.sigma2, roots.r**2, t)
    u_hat = complex(kernel.m1[0] * u1_hat + kernel.m0[0] * u0_hat)
    v_hat = complex(kernel.dm1[0] * u1_hat + kernel.dm0[0] * u0_hat)
    return SpectralState(u_hat=u_hat, v_hat=v_hat, r=roots.r, t=t)


def evolve_spectrum(
    params: ModelParams,
    r: npt.ArrayLike,
    u0_hat: npt.ArrayLike,
    u1_hat: npt.ArrayLike,
    t: npt.ArrayLike,
) -> tuple[ComplexArray, ComplexArray]:
    """Solution and time derivative on a frequency grid, at one time or one time per frequency."""
    roots = root_arrays(params, r)
    kernel = propagator(roots.sigma1, roots.sigma2, roots.r**2, t)
    u0 = np.asarray(u0_hat)
    u1 = np.asarray(u1_hat)
    u_hat = kernel.m1 * u1 + kernel.m0 * u0
    v_hat = kernel.dm1 * u1 + kernel.dm0 * u0
    return u_hat.reshape(roots.r.shape), v_hat.reshape(roots.r.shape)
