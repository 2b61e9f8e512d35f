import abc
import logging
import math

from dataclasses import dataclass
from typing import Callable, ClassVar, Iterable, Mapping, Sequence

import numpy as np

from src.cli.config import CheckName, ExperimentConfig
from src.cli.csv_io import Cell
from src.data_library.continuity import continuity_constants
from src.data_library.datum import InitialDatum
from src.spectral_core.energy import energy_constants
from src.spectral_core.errors import HypothesisError, ParameterError, QuadratureConvergenceError
from src.spectral_core.models import ModelParams
from src.spectral_core.profile import validate_delta0
from src.verification_harness.formulas import check_unit_ball_decay, high_freq_sup, high_freq_sup_rate
from src.verification_harness.optimality import check_growth_split, optimality_identities, optimality_suite
from src.verification_harness.pointwise import PointwiseReports, check_energy_balance, check_pointwise_lemmas
from src.verification_harness.reports import (
    DecayReport,
    InequalityReport,
    Verdict,
    inequality_report,
    log_grid,
    relative_violation,
)
from src.verification_harness.spectral_norms import QuadratureSettings
from src.verification_harness.theorems import (
    Theorem,
    check_decomposition,
    check_hypotheses,
    low_frequency_components,
    low_frequency_error,
    run_theorem_decay,
    two_sided_l2,
)


logger = logging.getLogger(__name__)

DECAY_HEADER = ("variant", "t", "value")
INEQUALITY_HEADER = ("name", "grid", "n_points", "max_violation", "worst_t", "worst_r", "slack", "verdict")
SUMMARY_HEADER = ("check", "predicted", "fitted", "stderr", "ratio_spread", "verdict")

CONTINUITY_R_GRID = np.logspace(-6, 2, 2001)
CONSTANT_SLACK = 1e-6
DECOMPOSITION_POINTS = 200


@dataclass(frozen=True)
class SummaryRow:
    check: str
    predicted: float
    fitted: float
    stderr: float
    ratio_spread: float
    verdict: Verdict

    def cells(self) -> tuple[Cell, ...]:
        return self.check, self.predicted, self.fitted, self.stderr, self.ratio_spread, self.verdict.value


@dataclass(frozen=True)
class CheckResult:
    """Everything one check writes: its sample table, optional bound table and summary rows."""

    name: str
    header: tuple[str, ...]
    rows: tuple[tuple[Cell, ...], ...]
    summary: tuple[SummaryRow, ...]
    bound_rows: tuple[tuple[Cell, ...], ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return bool(self.summary) and all(row.verdict is Verdict.PASS for row in self.summary)

    @classmethod
    def build(
        cls,
        name: str,
        decay: Mapping[str, DecayReport] | None = None,
        bounds: Sequence[InequalityReport] = (),
        notes: Iterable[str] = (),
    ) -> "CheckResult":
        decay = decay or {}
        summary = [_decay_summary(name, variant, report) for variant, report in decay.items()]
        summary += [_bound_summary(name, report) for report in bounds]
        sample_rows = tuple(
            (variant, t, value) for variant, report in decay.items() for t, value in report.samples
        )
        bound_rows = tuple(_bound_cells(report) for report in bounds)
        messages = [*notes, *(report.message for report in decay.values() if report.message)]
        if decay:
            return cls(name, DECAY_HEADER, sample_rows, tuple(summary), bound_rows, tuple(messages))
        return cls(name, INEQUALITY_HEADER, bound_rows, tuple(summary), (), tuple(messages))

    @classmethod
    def failed(cls, name: str, header: tuple[str, ...], message: str) -> "CheckResult":
        row = SummaryRow(name, math.nan, math.nan, math.nan, math.nan, Verdict.FAIL)
        return cls(name, header, (), (row,), (), (message,))


def _qualified(name: str, variant: str) -> str:
    return f"{name}:{variant}" if variant else name


def _decay_summary(name: str, variant: str, report: DecayReport) -> SummaryRow:
    return SummaryRow(
        _qualified(name, variant),
        report.predicted_slope,
        report.fitted_slope,
        report.slope_stderr,
        report.ratio_spread,
        report.verdict,
    )


def _bound_summary(name: str, report: InequalityReport) -> SummaryRow:
    return SummaryRow(_qualified(name, report.name), math.nan, math.nan, math.nan, math.nan, report.verdict)


def _bound_cells(report: InequalityReport) -> tuple[Cell, ...]:
    return (
        report.name,
        report.grid,
        report.n_points,
        report.max_violation,
        report.worst_point[0],
        report.worst_point[1],
        report.slack,
        report.verdict.value,
    )


class HarnessCheck(abc.ABC):
    name: ClassVar[CheckName]
    description: ClassVar[str]
    header: ClassVar[tuple[str, ...]] = DECAY_HEADER

    def __init__(self, config: ExperimentConfig) -> None:
        self.config = config

    @property
    def params(self) -> ModelParams:
        return self.config.params

    @property
    def data(self) -> tuple[InitialDatum, InitialDatum]:
        return self.config.data

    @property
    def t_grid(self) -> list[float]:
        grid = self.config.t_grid
        return [float(t) for t in log_grid(grid.t_min, grid.t_max, grid.points_per_decade)]

    @property
    def settings(self) -> QuadratureSettings:
        quadrature = self.config.quadrature
        return QuadratureSettings(points_per_panel=quadrature.points_per_panel, tolerance=quadrature.tolerance)

    def validate(self) -> None:
        """Raise ParameterError before any work when the configuration cannot satisfy the check."""

    @abc.abstractmethod
    def evaluate(self) -> CheckResult:
        pass

    def run(self) -> CheckResult:
        logger.info("running %s", self.name.value)
        try:
            result = self.evaluate()
        except QuadratureConvergenceError as e:
            logger.warning("%s failed: %s", self.name.value, e)
            return CheckResult.failed(self.name.value, self.header, str(e))
        logger.info("%s: %s", self.name.value, "pass" if result.passed else "fail")
        return result

    def _require(self, accepted: bool, condition: str) -> None:
        if not accepted:
            raise HypothesisError(self.name.value, condition)


CHECKS: dict[CheckName, type[HarnessCheck]] = {}


def register(check: type[HarnessCheck]) -> type[HarnessCheck]:
    CHECKS[check.name] = check
    return check


def registered_checks() -> list[type[HarnessCheck]]:
    """Checks in declaration order of CheckName."""
    return [CHECKS[name] for name in CheckName if name in CHECKS]


class _PointwiseCheck(HarnessCheck):
    header = INEQUALITY_HEADER
    selected: ClassVar[Callable[[PointwiseReports], Sequence[InequalityReport]]]

    def validate(self) -> None:
        energy_constants(self.config.beta)

    def evaluate(self) -> CheckResult:
        reports = check_pointwise_lemmas(self.params, self.config.beta, data=self.data)
        return CheckResult.build(self.name.value, bounds=type(self).selected(reports))


@register
class DissipationRatioCheck(_PointwiseCheck):
    name = CheckName.LEMMA21
    description = "R <= beta F on random spectral states"
    selected = staticmethod(lambda reports: (reports.dissipation_ratio,))


@register
class CoefficientBoundCheck(_PointwiseCheck):
    name = CheckName.LEMMA22
    description = "Lyapunov coefficient bounded by M1 at low and high frequency"
    selected = staticmethod(lambda reports: (reports.coefficient_low, reports.coefficient_high))


@register
class LyapunovDissipationCheck(_PointwiseCheck):
    name = CheckName.LEMMA23
    description = "rho E <= M2 F and the energy sandwich (1 - beta) E0 <= E <= C_beta E0"
    selected = staticmethod(
        lambda reports: (reports.lyapunov_dissipation, reports.lower_sandwich, reports.upper_sandwich)
    )


@register
class EnergyDecayCheck(_PointwiseCheck):
    name = CheckName.LEMMA24
    description = "E0(t) <= C exp(-alpha rho t) E0(0) along exact evolutions"
    selected = staticmethod(lambda reports: (reports.energy_decay,))


@register
class LowFrequencyErrorCheck(HarnessCheck):
    name = CheckName.LEMMA31
    description = "profile error and K1..K3 restricted to |xi| <= delta0"

    def validate(self) -> None:
        self.params.require_profile_exponent()
        validate_delta0(self.config.delta0)

    def evaluate(self) -> CheckResult:
        delta0, settings = self.config.delta0, self.settings
        decay = {"error": low_frequency_error(self.params, self.data, self.t_grid, delta0=delta0, settings=settings)}
        decay.update(
            low_frequency_components(self.params, self.data, self.t_grid, delta0=delta0, settings=settings)
        )
        return CheckResult.build(self.name.value, decay)


@register
class ContinuityCheck(HarnessCheck):
    name = CheckName.LEMMA32
    description = "|u_hat(r) - P| <= L r ||u||_{1,1} with L the supremum of (1 - cos s) / s"
    header = INEQUALITY_HEADER

    def evaluate(self) -> CheckResult:
        constants = continuity_constants()
        s = np.linspace(1e-3, 2 * np.pi, 200001)
        grid_max = float(np.max((1 - np.cos(s)) / s))
        bounds = [
            inequality_report(
                "constant",
                f"s in [1e-3, 2 pi] ({s.size})",
                [abs(constants.l - grid_max) / grid_max],
                [0.0],
                [constants.maximizer],
                CONSTANT_SLACK,
            )
        ]
        r = CONTINUITY_R_GRID
        grid = f"r in [{r[0]:.3g}, {r[-1]:.3g}] ({r.size})"
        for label, datum in zip(("datum0", "datum1"), self.data):
            gap = np.abs(datum.deviation(r))
            violation = relative_violation(gap, constants.l * r * datum.norm_l11)
            bounds.append(inequality_report(label, grid, violation, np.zeros_like(r), r))
        return CheckResult.build(self.name.value, bounds=bounds, notes=[f"L = {constants.l:.10f}, M = {constants.m:g}"])


class _UnitBallCheck(HarnessCheck):
    inverse: ClassVar[bool]

    @abc.abstractmethod
    def weights(self) -> dict[str, float]:
        pass

    def validate(self) -> None:
        energy_constants(self.config.beta)

    def evaluate(self) -> CheckResult:
        alpha = energy_constants(self.config.beta).alpha
        decay = {
            variant: check_unit_ball_decay(
                self.params.theta, alpha, k, self.params.n, self.t_grid, inverse=self.inverse
            )
            for variant, k in self.weights().items()
        }
        return CheckResult.build(self.name.value, decay)


@register
class UnitBallMomentCheck(_UnitBallCheck):
    name = CheckName.FORMULA217
    description = "integral of exp(-alpha t r^(2 theta)) r^k over the unit ball, k in {0, 2}"
    inverse = False

    def weights(self) -> dict[str, float]:
        return {"k0": 0.0, "k2": 2.0}


@register
class InverseMomentCheck(_UnitBallCheck):
    name = CheckName.FORMULA222
    description = "the same integral with the singular weight r^(-k), k = min(2, n - 1)"
    inverse = True

    def weights(self) -> dict[str, float]:
        k = min(2, self.params.n - 1)
        return {f"k{k}": float(k)}


@register
class HighFrequencySupCheck(HarnessCheck):
    name = CheckName.HIGH_FREQ_SUP
    description = "supremum of the high-frequency factor: closed form, grid maximum and decay rate"

    def validate(self) -> None:
        if self.config.ell <= 0:
            raise HypothesisError(self.name.value, "ell > 0")
        energy_constants(self.config.beta)

    def evaluate(self) -> CheckResult:
        theta, ell = self.params.theta, self.config.ell
        alpha = energy_constants(self.config.beta).alpha
        times = self.t_grid
        sups = [high_freq_sup(theta, ell, alpha, t) for t in times]
        grid = f"t in [{times[0]:.3g}, {times[-1]:.3g}] ({len(times)})"
        zeros = np.zeros(len(times))
        agreement = [abs(s.closed_form - s.numeric_max) / s.closed_form for s in sups]
        bounds = [
            inequality_report("grid_agreement", grid, agreement, times, zeros, CONSTANT_SLACK),
            inequality_report(
                "bound",
                grid,
                relative_violation([s.closed_form for s in sups], [s.bound for s in sups]),
                times,
                zeros,
            ),
        ]
        decay = {"": high_freq_sup_rate(theta, ell, alpha, times)}
        return CheckResult.build(self.name.value, decay, bounds)


class _TheoremCheck(HarnessCheck):
    theorem: ClassVar[Theorem]

    def validate(self) -> None:
        check_hypotheses(self.theorem, self.params, self.config.ell)
        if self.theorem is Theorem.PROFILE_ERROR:
            validate_delta0(self.config.delta0)

    def evaluate(self) -> CheckResult:
        report = run_theorem_decay(
            self.theorem,
            self.params,
            self.data,
            self.config.ell,
            self.t_grid,
            settings=self.settings,
            delta0=self.config.delta0,
        )
        return CheckResult.build(self.name.value, {"": report})


@register
class EnergyRateCheck(_TheoremCheck):
    name = CheckName.THM11
    description = "total energy decays like t^(-n / (2 theta)) below its norm-weighted bound"
    theorem = Theorem.ENERGY_DECAY


@register
class L2RateCheck(_TheoremCheck):
    name = CheckName.THM12
    description = "||u(t)||^2 decays like t^(-(n - 2) / (2 theta)) below its norm-weighted bound"
    theorem = Theorem.L2_DECAY


@register
class ProfileErrorCheck(_TheoremCheck):
    name = CheckName.THM13
    description = "distance to the diffusion-wave profile stays below its bound"
    theorem = Theorem.PROFILE_ERROR


class _OptimalityCheck(HarnessCheck):
    dimensions: ClassVar[tuple[int, ...]]
    condition: ClassVar[str]

    def validate(self) -> None:
        self._require(self.params.n in self.dimensions, self.condition)

    def evaluate(self) -> CheckResult:
        quadrature = self.config.quadrature
        suite = optimality_suite(
            self.params.n,
            self.t_grid,
            points_per_panel=quadrature.points_per_panel,
            tolerance=quadrature.tolerance,
        )
        return CheckResult.build(self.name.value, suite.reports, list(suite.inequalities.values()))


@register
class OptimalDecayCheck(_OptimalityCheck):
    name = CheckName.LEMMA41
    description = "sin^2 and cos^2 weighted heat integrals decay at the optimal rates, n >= 3"
    dimensions = (3, 4, 5)
    condition = "3 <= n <= 5"


@register
class OptimalGrowthCheck(_OptimalityCheck):
    name = CheckName.LEMMA42
    description = "the sin^2 weighted integral grows like t (n = 1) or log t (n = 2)"
    dimensions = (1, 2)
    condition = "n in (1, 2)"


class _TwoSidedCheck(HarnessCheck):
    condition: ClassVar[str]

    @abc.abstractmethod
    def accepts(self, n: int) -> bool:
        pass

    def validate(self) -> None:
        self._require(self.accepts(self.params.n), self.condition)
        check_hypotheses(Theorem.PROFILE_ERROR, self.params, self.config.ell)
        if self.data[1].mass == 0:
            raise HypothesisError(self.name.value, "a velocity datum with nonzero mass")

    def evaluate(self) -> CheckResult:
        report = two_sided_l2(self.params, self.data, self.config.ell, self.t_grid, settings=self.settings)
        band = ", ".join(f"{key} = {value:.6g}" for key, value in report.extras.items())
        return CheckResult.build(self.name.value, {"": report}, notes=[band])


@register
class DecayingL2Check(_TwoSidedCheck):
    name = CheckName.THM43
    description = "||u(t)|| t^((n - 2) / 8) bounded above and below, n >= 3"
    condition = "n >= 3"

    def accepts(self, n: int) -> bool:
        return n >= 3


@register
class LogGrowthL2Check(_TwoSidedCheck):
    name = CheckName.THM44
    description = "||u(t)|| / sqrt(log t) bounded above and below, n = 2"
    condition = "n = 2"

    def accepts(self, n: int) -> bool:
        return n == 2

    def validate(self) -> None:
        super().validate()
        if self.config.t_grid.t_min <= 1:
            raise ParameterError("the logarithmic normalisation needs t_min > 1")


@register
class SqrtGrowthL2Check(_TwoSidedCheck):
    name = CheckName.THM45
    description = "||u(t)|| / sqrt(t) bounded above and below, n = 1"
    condition = "n = 1"

    def accepts(self, n: int) -> bool:
        return n == 1


@register
class EnergyBalanceCheck(HarnessCheck):
    name = CheckName.ENERGY_BALANCE
    description = "energy identities by finite differences and the exponential Lyapunov bound"
    header = INEQUALITY_HEADER

    def validate(self) -> None:
        energy_constants(self.config.beta)

    def evaluate(self) -> CheckResult:
        reports = check_energy_balance(self.params, self.config.beta, data=self.data)
        return CheckResult.build(self.name.value, bounds=reports.all())


@register
class DecompositionCheck(HarnessCheck):
    name = CheckName.DECOMPOSITION
    description = "|u_hat - profile - K1 - K2 - K3| below the envelope sum on (0, delta0]"
    header = INEQUALITY_HEADER

    def validate(self) -> None:
        self.params.require_profile_exponent()
        validate_delta0(self.config.delta0)

    def evaluate(self) -> CheckResult:
        delta0 = self.config.delta0
        radii = np.linspace(delta0 / DECOMPOSITION_POINTS, delta0, DECOMPOSITION_POINTS)
        report = check_decomposition(self.t_grid, radii, self.data, delta0=delta0)
        return CheckResult.build(self.name.value, bounds=[report])


@register
class OptimalityIdentityCheck(HarnessCheck):
    name = CheckName.OPTIMALITY_IDENTITIES
    description = "direct quadrature against the rescaled Gamma-constant form of each integral"
    header = INEQUALITY_HEADER

    def validate(self) -> None:
        self._require(1 <= self.params.n <= 5, "1 <= n <= 5")

    def evaluate(self) -> CheckResult:
        reports = optimality_identities(
            self.params.n, self.t_grid, points_per_panel=self.config.quadrature.points_per_panel
        )
        return CheckResult.build(self.name.value, bounds=list(reports.values()))


@register
class GrowthSplitCheck(HarnessCheck):
    name = CheckName.LEMMA42_SPLIT
    description = "inner and outer parts of the rescaled growth integral inside their envelopes"
    header = INEQUALITY_HEADER

    def validate(self) -> None:
        self._require(self.params.n in (1, 2), "n in (1, 2)")
        if self.config.t_grid.t_min <= 1:
            raise ParameterError("the growth split needs t_min > 1")

    def evaluate(self) -> CheckResult:
        reports = check_growth_split(
            self.params.n, self.t_grid, points_per_panel=self.config.quadrature.points_per_panel
        )
        return CheckResult.build(self.name.value, bounds=list(reports.values()))
