import math

from enum import Enum
from pathlib import Path
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.data_library.datum import InitialDatum, datum_from_config
from src.spectral_core.errors import ConfigError
from src.spectral_core.models import ModelParams


class CheckName(Enum):
    LEMMA21 = "lemma21"
    LEMMA22 = "lemma22"
    LEMMA23 = "lemma23"
    LEMMA24 = "lemma24"
    LEMMA31 = "lemma31"
    LEMMA32 = "lemma32"
    FORMULA217 = "formula217"
    FORMULA222 = "formula222"
    HIGH_FREQ_SUP = "highfreqsup"
    THM11 = "thm11"
    THM12 = "thm12"
    THM13 = "thm13"
    LEMMA41 = "lemma41"
    LEMMA42 = "lemma42"
    THM43 = "thm43"
    THM44 = "thm44"
    THM45 = "thm45"
    ENERGY_BALANCE = "energy_balance"
    DECOMPOSITION = "decomposition"
    OPTIMALITY_IDENTITIES = "optimality_identities"
    LEMMA42_SPLIT = "lemma42_split"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ModelSection(_Section):
    theta: float = 2.0
    n: int = 3

    @model_validator(mode="after")
    def _check_params(self) -> "ModelSection":
        self.params()
        return self

    def params(self) -> ModelParams:
        return ModelParams(theta=self.theta, n=self.n)


class ZeroDatumSpec(_Section):
    family: Literal["zero"] = "zero"


class GaussianDatumSpec(_Section):
    family: Literal["gaussian"] = "gaussian"
    a: float = Field(default=0.5, gt=0)
    amplitude: float = 1.0


DatumSpec = Annotated[Union[ZeroDatumSpec, GaussianDatumSpec], Field(discriminator="family")]


class TimeGrid(_Section):
    t_min: float = Field(default=1e2, gt=0)
    t_max: float = 1e6
    points_per_decade: int = Field(default=20, ge=1)

    @model_validator(mode="after")
    def _check_range(self) -> "TimeGrid":
        if not self.t_max > self.t_min:
            raise ValueError(f"t_max must exceed t_min, got [{self.t_min}, {self.t_max}]")
        return self


class QuadratureSection(_Section):
    tolerance: float = Field(default=1e-8, gt=0, lt=1)
    points_per_panel: int = Field(default=16, ge=2)


class ExperimentConfig(_Section):
    model: ModelSection = ModelSection()
    datum0: DatumSpec = ZeroDatumSpec()
    datum1: DatumSpec = GaussianDatumSpec()
    beta: float = Field(default=0.1, gt=0, lt=1)
    ell: float = 2.0
    delta0: float = Field(default=0.5, gt=0)
    t_grid: TimeGrid = TimeGrid()
    checks: tuple[CheckName, ...] = ()
    output_dir: Path = Path("results")
    quadrature: QuadratureSection = QuadratureSection()
    parallel: bool = False

    @field_validator("checks")
    @classmethod
    def _unique_checks(cls, checks: tuple[CheckName, ...]) -> tuple[CheckName, ...]:
        duplicates = sorted({c.value for c in checks if checks.count(c) > 1})
        if duplicates:
            raise ValueError(f"duplicate checks: {duplicates}")
        return checks

    @model_validator(mode="after")
    def _check_delta0(self) -> "ExperimentConfig":
        limit = 4 ** (1 / (4 * self.model.theta - 2))
        if not self.delta0 < limit:
            raise ValueError(f"delta0 must lie in (0, {limit:.6g}), got {self.delta0}")
        return self

    @property
    def params(self) -> ModelParams:
        return self.model.params()

    @property
    def data(self) -> tuple[InitialDatum, InitialDatum]:
        n = self.model.n
        return datum_from_config(self.datum0.model_dump(), n), datum_from_config(self.datum1.model_dump(), n)

    @property
    def t_bounds(self) -> tuple[float, float]:
        return self.t_grid.t_min, self.t_grid.t_max


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return parse_config(text)


def parse_config(text: str) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate_json(text)
    except ValidationError as e:
        raise ConfigError(f"invalid config: {e}") from e


def dump_config(config: ExperimentConfig) -> str:
    return config.model_dump_json(indent=2)


def with_overrides(
    config: ExperimentConfig,
    *,
    output_dir: str | Path | None = None,
    parallel: bool | None = None,
    quad_tolerance: float | None = None,
) -> ExperimentConfig:
    """Apply command-line overrides, re-validating the result."""
    update: dict[str, object] = {}
    if output_dir is not None:
        update["output_dir"] = Path(output_dir)
    if parallel is not None:
        update["parallel"] = parallel
    if quad_tolerance is not None:
        if not 0 < quad_tolerance < 1 or math.isnan(quad_tolerance):
            raise ConfigError(f"quadrature tolerance must lie in (0, 1), got {quad_tolerance}")
        update["quadrature"] = config.quadrature.model_copy(update={"tolerance": quad_tolerance})
    # model_copy skips validation, so round-trip through the validator
    return parse_config(config.model_copy(update=update).model_dump_json())
