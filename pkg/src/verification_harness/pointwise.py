import logging

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from src.data_library.datum import InitialDatum, make_gaussian
from src.spectral_core.energy import energy_constants, energy_terms, require_beta, rho
from src.spectral_core.evolution import evolve_spectrum
from src.spectral_core.models import ModelParams
from src.spectral_core.roots import root_arrays
from src.verification_harness.reports import InequalityReport, inequality_report, relative_violation


logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]

DEFAULT_R_GRID = np.logspace(-2, 1, 60)
DECAY_R_GRID = np.logspace(-2, 1, 50)
DECAY_T_GRID = np.linspace(0.0, 100.0, 50)
BALANCE_R_GRID = np.logspace(-1, 1, 30)
BALANCE_T_GRID = np.linspace(0.5, 20.0, 40)
IDENTITY_SLACK = 1e-6
# e^(-40) of the fast mode no longer moves the energy
FAST_MODE_EXPONENT = 40.0
RANDOM_STATES = 200


@dataclass(frozen=True)
class PointwiseReports:
    dissipation_ratio: InequalityReport
    coefficient_low: InequalityReport
    coefficient_high: InequalityReport
    lyapunov_dissipation: InequalityReport
    lower_sandwich: InequalityReport
    upper_sandwich: InequalityReport
    energy_decay: InequalityReport

    def all(self) -> tuple[InequalityReport, ...]:
        return (
            self.dissipation_ratio,
            self.coefficient_low,
            self.coefficient_high,
            self.lyapunov_dissipation,
            self.lower_sandwich,
            self.upper_sandwich,
            self.energy_decay,
        )


@dataclass(frozen=True)
class BalanceReports:
    lyapunov_identity: InequalityReport
    free_energy_identity: InequalityReport
    exponential_bound: InequalityReport

    def all(self) -> tuple[InequalityReport, ...]:
        return self.lyapunov_identity, self.free_energy_identity, self.exponential_bound


def random_states(count: int, seed: int) -> tuple[ComplexArray, ComplexArray]:
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(count) + 1j * rng.standard_normal(count)
    v = rng.standard_normal(count) + 1j * rng.standard_normal(count)
    return u, v


def _initial_states(
    r: FloatArray, data: tuple[InitialDatum, InitialDatum], extra: int, seed: int
) -> tuple[FloatArray, ComplexArray, ComplexArray]:
    """Datum values at each r plus `extra` random complex states, on an (r, state) grid."""
    u_random, v_random = random_states(extra, seed)
    u0 = np.column_stack([data[0].transform(r), np.broadcast_to(u_random, (r.size, extra))])
    u1 = np.column_stack([data[1].transform(r), np.broadcast_to(v_random, (r.size, extra))])
    radii = np.broadcast_to(r[:, None], u0.shape).copy()
    return radii, u0, u1


def check_pointwise_lemmas(
    params: ModelParams,
    beta: float,
    r_grid: FloatArray = DEFAULT_R_GRID,
    *,
    n_states: int = RANDOM_STATES,
    decay_r_grid: FloatArray = DECAY_R_GRID,
    decay_t_grid: FloatArray = DECAY_T_GRID,
    data: tuple[InitialDatum, InitialDatum] | None = None,
    seed: int = 0,
) -> PointwiseReports:
    require_beta(beta)
    constants = energy_constants(beta)
    r = np.asarray(r_grid, dtype=np.float64)
    grid = f"r in [{r.min():.3g}, {r.max():.3g}] ({r.size} points) x {n_states} random states"

    u, v = random_states(n_states, seed)
    radii = np.broadcast_to(r[:, None], (r.size, n_states))
    e0, e, f, rr = energy_terms(params, radii, u[None, :], v[None, :], beta)
    zero_t = np.zeros_like(radii)

    key = rho(params, r)
    damping = r ** (2 * params.theta)
    low = (key + beta * key**2 / r) / (2 * damping)
    high = 1 / (2 * beta) + key / (2 * r) + key * r ** (2 * params.theta - 2) / 2
    zero_r = np.zeros_like(r)

    if data is None:
        gaussian = make_gaussian(0.5, 1.0, params.n)
        data = (gaussian, gaussian)
    decay = _energy_decay(params, beta, np.asarray(decay_r_grid), np.asarray(decay_t_grid), data, seed)

    return PointwiseReports(
        dissipation_ratio=inequality_report("dissipation_ratio", grid, relative_violation(rr, beta * f), zero_t, radii),
        coefficient_low=inequality_report(
            "coefficient_low", grid, relative_violation(low, 0.5 + beta / 4), zero_r, r
        ),
        coefficient_high=inequality_report(
            "coefficient_high", grid, relative_violation(high, 1 / (2 * beta) + 0.75), zero_r, r
        ),
        lyapunov_dissipation=inequality_report(
            "lyapunov_dissipation",
            grid,
            relative_violation(rho(params, radii) * e, constants.m2 * f),
            zero_t,
            radii,
        ),
        lower_sandwich=inequality_report(
            "lower_sandwich", grid, relative_violation((1 - beta) * e0, e), zero_t, radii
        ),
        upper_sandwich=inequality_report(
            "upper_sandwich", grid, relative_violation(e, constants.c_beta * e0), zero_t, radii
        ),
        energy_decay=decay,
    )


def _energy_decay(
    params: ModelParams,
    beta: float,
    r_grid: FloatArray,
    t_grid: FloatArray,
    data: tuple[InitialDatum, InitialDatum],
    seed: int,
) -> InequalityReport:
    constants = energy_constants(beta)
    radii, u0, u1 = _initial_states(r_grid, data, 20, seed)
    start, _, _, _ = energy_terms(params, radii, u0, u1, beta)
    live = start > 0
    if not np.all(live):
        logger.warning("skipping %d zero-energy initial states", int(np.size(live) - np.count_nonzero(live)))

    key = rho(params, radii)
    violations = []
    for t in t_grid:
        u, v = evolve_spectrum(params, radii, u0, u1, float(t))
        e0, _, _, _ = energy_terms(params, radii, u, v, beta)
        bound = constants.decay_constant * np.exp(-constants.alpha * key * t) * start
        violations.append(np.where(live, relative_violation(e0, bound), -np.inf))

    grid = (
        f"r in [{r_grid.min():.3g}, {r_grid.max():.3g}] ({r_grid.size}) x "
        f"t in [{t_grid.min():.3g}, {t_grid.max():.3g}] ({t_grid.size})"
    )
    times = np.broadcast_to(np.asarray(t_grid)[:, None, None], (t_grid.size, *radii.shape))
    return inequality_report("energy_decay", grid, np.stack(violations), times, radii[None, :, :])


def _difference_step(sigma1: ComplexArray, sigma2: ComplexArray, t: float) -> FloatArray:
    """A thousandth of the fastest time scale still present at t, per frequency, and at most t / 50."""
    alive = np.where(sigma2.real * t < -FAST_MODE_EXPONENT, np.abs(sigma1), np.abs(sigma2))
    return np.minimum(1e-3 / np.maximum(alive, 1e-3), t / 50)


def _richardson(values: dict[float, FloatArray], h: FloatArray) -> FloatArray:
    coarse = (values[1.0] - values[-1.0]) / (2 * h)
    fine = (values[0.5] - values[-0.5]) / h
    return (4 * fine - coarse) / 3


def check_energy_balance(
    params: ModelParams,
    beta: float,
    r_grid: FloatArray = BALANCE_R_GRID,
    t_grid: FloatArray = BALANCE_T_GRID,
    *,
    data: tuple[InitialDatum, InitialDatum] | None = None,
    seed: int = 0,
) -> BalanceReports:
    """Energy identities by Richardson-extrapolated differences, and the exponential Lyapunov bound."""
    require_beta(beta)
    constants = energy_constants(beta)
    if data is None:
        gaussian = make_gaussian(0.5, 1.0, params.n)
        data = (gaussian, gaussian)
    r = np.asarray(r_grid, dtype=np.float64)
    radii, u0, u1 = _initial_states(r, data, 8, seed)

    roots = root_arrays(params, radii)
    key = rho(params, radii)
    damping = radii ** (2 * params.theta)
    _, start, _, _ = energy_terms(params, radii, u0, u1, beta)

    lyapunov, free, bound = [], [], []
    for t in t_grid:
        h = _difference_step(roots.sigma1, roots.sigma2, float(t))
        e_shift: dict[float, FloatArray] = {}
        e0_shift: dict[float, FloatArray] = {}
        for offset in (-1.0, -0.5, 0.5, 1.0):
            u, v = evolve_spectrum(params, radii, u0, u1, float(t) + offset * h)
            e0_shift[offset], e_shift[offset], _, _ = energy_terms(params, radii, u, v, beta)
        u, v = evolve_spectrum(params, radii, u0, u1, float(t))
        e0, e, f, rr = energy_terms(params, radii, u, v, beta)

        d_e = _richardson(e_shift, h)
        scale = np.maximum(np.maximum(np.abs(d_e), f), np.maximum(rr, 1e-300))
        lyapunov.append(np.abs(d_e + f - rr) / scale)

        d_e0 = _richardson(e0_shift, h)
        loss = damping * np.abs(v) ** 2
        # measured against a thousandth of the largest possible loss near zeros of v
        floor = np.maximum(1e-3 * damping * 2 * e0, 1e-300)
        free.append(np.abs(d_e0 + loss) / np.maximum(np.maximum(np.abs(d_e0), loss), floor))

        bound.append(relative_violation(e, np.exp(-constants.alpha * key * t) * start))

    grid = f"r in [{r.min():.3g}, {r.max():.3g}] ({r.size}) x t in [{t_grid.min():.3g}, {t_grid.max():.3g}]"
    times = np.broadcast_to(np.asarray(t_grid)[:, None, None], (len(t_grid), *radii.shape))
    cells = radii[None, :, :]
    return BalanceReports(
        lyapunov_identity=inequality_report(
            "lyapunov_identity", grid, np.stack(lyapunov), times, cells, IDENTITY_SLACK
        ),
        free_energy_identity=inequality_report(
            "free_energy_identity", grid, np.stack(free), times, cells, IDENTITY_SLACK
        ),
        exponential_bound=inequality_report("exponential_bound", grid, np.stack(bound), times, cells),
    )
