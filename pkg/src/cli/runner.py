import logging

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.cli.checks import CHECKS, INEQUALITY_HEADER, SUMMARY_HEADER, CheckResult, HarnessCheck
from src.cli.config import ExperimentConfig
from src.cli.csv_io import Cell, prepare_output_dir, write_csv_atomic
from src.spectral_core.errors import ConfigError
from src.spectral_core.evolution import evolve_spectrum
from src.spectral_core.models import ProfileParams
from src.spectral_core.profile import profile_hat, remainder_arrays, validate_delta0


logger = logging.getLogger(__name__)

PROFILE_HEADER = ("r", "re_u_hat", "profile", "abs_error", "decomposition_residual", "envelope_sum")
LOW_BAND_POINTS = 200
HIGH_BAND_POINTS = 100
HIGH_BAND_LIMIT = 10.0


@dataclass(frozen=True)
class RunOutcome:
    results: tuple[CheckResult, ...]
    summary_path: Path

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1


def build_checks(config: ExperimentConfig) -> list[HarnessCheck]:
    """Instantiate and validate the configured checks, in registry order."""
    if not config.checks:
        raise ConfigError("no checks configured")
    checks = [CHECKS[name](config) for name in CHECKS if name in config.checks]
    for check in checks:
        check.validate()
    return checks


def _write_result(output_dir: Path, result: CheckResult) -> None:
    write_csv_atomic(output_dir / f"{result.name}.csv", result.header, result.rows)
    if result.bound_rows:
        write_csv_atomic(output_dir / f"{result.name}_bounds.csv", INEQUALITY_HEADER, result.bound_rows)


def run(config: ExperimentConfig) -> RunOutcome:
    checks = build_checks(config)
    output_dir = prepare_output_dir(config.output_dir)

    if config.parallel and len(checks) > 1:
        with ThreadPoolExecutor(max_workers=len(checks)) as executor:
            results = list(executor.map(lambda check: check.run(), checks))
    else:
        results = [check.run() for check in checks]

    for result in results:
        _write_result(output_dir, result)
    summary_rows = [row.cells() for result in results for row in result.summary]
    summary_path = write_csv_atomic(output_dir / "summary.csv", SUMMARY_HEADER, summary_rows)
    return RunOutcome(results=tuple(results), summary_path=summary_path)


def emit_profile_curve(config: ExperimentConfig, t: float) -> Path:
    """Spectral solution against the diffusion-wave profile on (0, delta0] and a high-frequency band."""
    params = config.params
    params.require_profile_exponent()
    delta0 = config.delta0
    validate_delta0(delta0)
    if t < 0:
        raise ConfigError(f"profile time must be nonnegative, got {t}")
    prepare_output_dir(config.output_dir)

    data = config.data
    p = ProfileParams(p0=data[0].mass, p1=data[1].mass)
    low = np.linspace(delta0 / LOW_BAND_POINTS, delta0, LOW_BAND_POINTS)
    high = np.geomspace(delta0, HIGH_BAND_LIMIT, HIGH_BAND_POINTS + 1)[1:]
    radii = np.concatenate([low, high])

    u_hat, _ = evolve_spectrum(params, radii, data[0].transform(radii), data[1].transform(radii), t)
    profile = profile_hat(t, radii, p, params)
    error = np.abs(u_hat - profile)

    terms = remainder_arrays(t, low, data, p, delta0)
    residual = np.abs(u_hat[: low.size] - profile[: low.size] - terms.k1 - terms.k2 - terms.k3)
    residual = np.concatenate([residual, np.full(high.size, np.nan)])
    envelope = np.concatenate([terms.envelope_total + terms.rounding_bound, np.full(high.size, np.nan)])

    rows: list[tuple[Cell, ...]] = [
        (float(r), float(u.real), float(w), float(e), float(d), float(s))
        for r, u, w, e, d, s in zip(radii, u_hat, profile, error, residual, envelope)
    ]
    path = config.output_dir / f"profile_t{t:.6g}.csv"
    logger.info("writing %d profile rows to %s", len(rows), path)
    return write_csv_atomic(path, PROFILE_HEADER, rows)
