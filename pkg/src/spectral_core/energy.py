import math

from typing import Callable, overload

import numpy as np
import numpy.typing as npt

from src.spectral_core.errors import ParameterError
from src.spectral_core.evolution import evolve_exact
from src.spectral_core.models import EnergyConstants, EnergySnapshot, ModelParams, RootPair, SpectralState
from src.spectral_core.roots import FloatArray


def require_beta(beta: float) -> None:
    if not 0 < beta < 1:
        raise ParameterError(f"beta must lie in (0, 1), got {beta}")


@overload
def rho(params: ModelParams, r: float) -> float: ...


@overload
def rho(params: ModelParams, r: FloatArray) -> FloatArray: ...


def rho(params: ModelParams, r: float | FloatArray) -> float | FloatArray:
    radii = np.asarray(r, dtype=np.float64)
    if np.any(radii < 0):
        raise ParameterError("frequency modulus must be nonnegative")
    value = radii ** (2 * params.theta) / (1.0 + radii ** (4 * params.theta - 2))
    if np.ndim(value) == 0:
        return float(value)
    return value


def energy_terms(
    params: ModelParams,
    r: npt.ArrayLike,
    u_hat: npt.ArrayLike,
    v_hat: npt.ArrayLike,
    beta: float,
) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
    """Return (E0, E, F, R) evaluated elementwise."""
    require_beta(beta)
    radii = np.asarray(r, dtype=np.float64)
    u = np.asarray(u_hat, dtype=np.complex128)
    v = np.asarray(v_hat, dtype=np.complex128)

    key = rho(params, radii)
    damping = radii ** (2 * params.theta)
    u_sq = np.abs(u) ** 2
    v_sq = np.abs(v) ** 2

    e0 = 0.5 * v_sq + 0.5 * radii**2 * u_sq
    e = e0 + beta * key * np.real(v * np.conj(u)) + 0.5 * beta * key * damping * u_sq
    f = damping * v_sq + beta * key * radii**2 * u_sq
    rr = beta * key * v_sq
    return e0, e, f, rr


def energy_snapshot(state: SpectralState, params: ModelParams, beta: float) -> EnergySnapshot:
    e0, e, f, rr = energy_terms(params, state.r, state.u_hat, state.v_hat, beta)
    return EnergySnapshot(e0=float(e0), e=float(e), f=float(f), rr=float(rr), beta=beta)


def energy_constants(beta: float) -> EnergyConstants:
    """Lyapunov constants for the weight beta.

    The cross term is at most beta E0 / 2 because rho / r <= 1/2, and the damping term at most beta E0
    because r^(2 theta) rho <= r^2, so (1 - beta) E0 <= E <= (1 + 3 beta / 2) E0.
    """
    require_beta(beta)
    m2 = max(0.5 + beta / 4, 1 / (2 * beta) + 0.75)
    c_beta = 1 + 1.5 * beta
    return EnergyConstants(
        beta=beta,
        m1=m2,
        m2=m2,
        c_beta=c_beta,
        alpha=(1 - beta) / m2,
        decay_constant=c_beta / (1 - beta),
    )


def richardson_derivative(fn: Callable[[float], float], t: float, h: float) -> float:
    if t < h:
        raise ParameterError(f"central differences need t >= h, got t={t}, h={h}")
    coarse = (fn(t + h) - fn(t - h)) / (2 * h)
    fine = (fn(t + h / 2) - fn(t - h / 2)) / h
    return (4 * fine - coarse) / 3


def lyapunov_balance(
    params: ModelParams,
    roots: RootPair,
    u0_hat: complex,
    u1_hat: complex,
    beta: float,
    t: float,
    h: float | None = None,
) -> float:
    """Residual of dE/dt + F - R, relative to the size of its largest term."""
    # resolve the fast mode: the step is a small fraction of its time scale
    step = h if h is not None else 1e-3 / max(abs(roots.sigma2), 1e-3)
    # the derivative at t = 0 is one-sided, so probe slightly later
    probe = max(t, step)

    def lyapunov(s: float) -> float:
        return energy_snapshot(evolve_exact(roots, u0_hat, u1_hat, s), params, beta).e

    derivative = richardson_derivative(lyapunov, probe, step)
    snapshot = energy_snapshot(evolve_exact(roots, u0_hat, u1_hat, probe), params, beta)
    scale = max(abs(derivative), snapshot.f, snapshot.rr, math.ulp(1.0))
    return (derivative + snapshot.f - snapshot.rr) / scale
