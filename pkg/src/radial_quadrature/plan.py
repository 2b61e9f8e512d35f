import math

from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np
import numpy.typing as npt

from src.spectral_core.errors import ParameterError


# e^(-80) is far below every relative tolerance the lab uses
TAIL_EXPONENT = 80.0
DEFAULT_BASE_PANELS = 32
DEFAULT_POINTS_PER_PANEL = 16
DEFAULT_TOLERANCE = 1e-8


@dataclass(frozen=True)
class PanelSegment:
    """`count` equal panels covering [start, stop]."""

    start: float
    stop: float
    count: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.start) and math.isfinite(self.stop)) or self.stop <= self.start:
            raise ParameterError(f"invalid panel segment [{self.start}, {self.stop}]")
        if self.count < 1:
            raise ParameterError(f"a panel segment needs at least one panel, got {self.count}")

    @property
    def width(self) -> float:
        return (self.stop - self.start) / self.count

    def halved(self) -> "PanelSegment":
        return replace(self, count=2 * self.count)


@dataclass(frozen=True)
class QuadraturePlan:
    truncation_radius: float
    segments: tuple[PanelSegment, ...]
    points_per_panel: int = DEFAULT_POINTS_PER_PANEL
    oscillation_period: float | None = None
    oscillation_limit: float | None = None
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self) -> None:
        if not self.segments:
            raise ParameterError("a quadrature plan needs at least one segment")
        if self.points_per_panel < 1:
            raise ParameterError(f"points_per_panel must be positive, got {self.points_per_panel}")
        if self.tolerance <= 0:
            raise ParameterError(f"tolerance must be positive, got {self.tolerance}")
        for left, right in zip(self.segments, self.segments[1:]):
            if left.stop != right.start:
                raise ParameterError("panel segments must be contiguous and ordered")
        if self.segments[-1].stop != self.truncation_radius:
            raise ParameterError("the last panel must end at the truncation radius")
        if self.oscillation_period is not None:
            cap = self.oscillation_period / 4
            limit = self.truncation_radius if self.oscillation_limit is None else self.oscillation_limit
            for segment in self.segments:
                if segment.start < limit and segment.width > cap * (1 + 1e-12):
                    raise ParameterError(
                        f"panel width {segment.width:.3e} exceeds a quarter oscillation period {cap:.3e}"
                    )

    @property
    def lower(self) -> float:
        return self.segments[0].start

    @property
    def panel_count(self) -> int:
        return sum(segment.count for segment in self.segments)

    def breakpoints(self) -> npt.NDArray[np.float64]:
        pieces = [np.linspace(s.start, s.stop, s.count + 1)[:-1] for s in self.segments]
        return np.concatenate([*pieces, [self.truncation_radius]])

    def halved(self) -> "QuadraturePlan":
        return replace(self, segments=tuple(segment.halved() for segment in self.segments))

    @classmethod
    def build(
        cls,
        upper: float,
        *,
        lower: float = 0.0,
        breakpoints: Iterable[float] = (),
        base_panels: int = DEFAULT_BASE_PANELS,
        oscillation_frequency: float | None = None,
        oscillation_limit: float | None = None,
        points_per_panel: int = DEFAULT_POINTS_PER_PANEL,
        tolerance: float = DEFAULT_TOLERANCE,
    ) -> "QuadraturePlan":
        if not (math.isfinite(upper) and math.isfinite(lower)) or not 0 <= lower < upper:
            raise ParameterError(f"invalid integration range [{lower}, {upper}]")

        period = None
        limit = upper
        if oscillation_frequency is not None and oscillation_frequency > 0:
            period = 2 * math.pi / oscillation_frequency
            if oscillation_limit is not None:
                limit = min(max(oscillation_limit, lower), upper)

        edges = sorted({lower, upper, *(b for b in breakpoints if lower < b < upper)})
        if period is not None and lower < limit < upper:
            edges = sorted({*edges, limit})

        segments = []
        for start, stop in zip(edges, edges[1:]):
            count = max(1, math.ceil(base_panels * (stop - start) / (upper - lower)))
            if period is not None and start < limit:
                count = max(count, math.ceil((stop - start) / (period / 4)))
            segments.append(PanelSegment(start, stop, count))

        return cls(
            truncation_radius=upper,
            segments=tuple(segments),
            points_per_panel=points_per_panel,
            oscillation_period=period,
            oscillation_limit=limit if period is not None else None,
            tolerance=tolerance,
        )

    @classmethod
    def for_decay(
        cls,
        scale: float,
        power: float,
        *,
        outer_radius: float = math.inf,
        lower: float = 0.0,
        breakpoints: Iterable[float] = (),
        base_panels: int = DEFAULT_BASE_PANELS,
        oscillation_frequency: float | None = None,
        oscillation_limit: float | None = None,
        points_per_panel: int = DEFAULT_POINTS_PER_PANEL,
        tolerance: float = DEFAULT_TOLERANCE,
    ) -> "QuadraturePlan":
        """Plan whose truncation radius R satisfies scale * R**power >= TAIL_EXPONENT."""
        if scale < 0 or power <= 0:
            raise ParameterError(f"decay scale must be >= 0 and power > 0, got {scale}, {power}")
        radius = outer_radius if scale == 0 else min((TAIL_EXPONENT / scale) ** (1 / power), outer_radius)
        if not math.isfinite(radius):
            raise ParameterError("an undamped integrand needs a finite outer radius")
        return cls.build(
            radius,
            lower=lower,
            breakpoints=breakpoints,
            base_panels=base_panels,
            oscillation_frequency=oscillation_frequency,
            oscillation_limit=oscillation_limit,
            points_per_panel=points_per_panel,
            tolerance=tolerance,
        )
