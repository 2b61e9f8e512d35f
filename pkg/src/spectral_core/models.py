import math

from dataclasses import dataclass
from enum import Enum

from src.spectral_core.errors import ParameterError


CONFLUENCE_THRESHOLD = 1e-6


class Regime(Enum):
    OSCILLATORY = "oscillatory"
    CRITICAL = "critical"
    OVERDAMPED = "overdamped"


@dataclass(frozen=True)
class ModelParams:
    theta: float
    n: int

    def __post_init__(self) -> None:
        if not math.isfinite(self.theta) or self.theta <= 1:
            raise ParameterError(f"theta must be a finite real > 1, got {self.theta}")
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"n must be a positive integer, got {self.n}")

    @property
    def confluence_radius(self) -> float:
        """Frequency modulus where the two characteristic roots merge."""
        return float(4.0 ** (1.0 / (4.0 * self.theta - 2.0)))

    def require_profile_exponent(self) -> None:
        if self.theta != 2:
            raise ParameterError(f"the diffusion-wave profile is defined for theta = 2 only, got {self.theta}")


@dataclass(frozen=True)
class RootPair:
    sigma1: complex
    sigma2: complex
    regime: Regime
    r: float

    @property
    def mean(self) -> complex:
        return (self.sigma1 + self.sigma2) / 2

    @property
    def half_gap(self) -> complex:
        return (self.sigma1 - self.sigma2) / 2


@dataclass(frozen=True)
class SpectralState:
    u_hat: complex
    v_hat: complex
    r: float
    t: float

    def __post_init__(self) -> None:
        for name in ("u_hat", "v_hat"):
            value = complex(getattr(self, name))
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise ParameterError(f"{name} is not finite at r={self.r}, t={self.t}")


@dataclass(frozen=True)
class ProfileParams:
    p0: float
    p1: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p0) and math.isfinite(self.p1)):
            raise ParameterError(f"profile masses must be finite, got P0={self.p0}, P1={self.p1}")


@dataclass(frozen=True)
class EnergySnapshot:
    e0: float
    e: float
    f: float
    rr: float
    beta: float


@dataclass(frozen=True)
class EnergyConstants:
    beta: float
    m1: float
    m2: float
    c_beta: float
    alpha: float
    decay_constant: float


@dataclass(frozen=True)
class RemainderTerms:
    k1: complex
    k2: complex
    k3: complex
    env4: float
    env5: float
    env6: float
    envelope_total: float
    rounding_bound: float

    @property
    def explicit_sum(self) -> complex:
        return self.k1 + self.k2 + self.k3

    @property
    def residual_bound(self) -> float:
        return self.envelope_total + self.rounding_bound
