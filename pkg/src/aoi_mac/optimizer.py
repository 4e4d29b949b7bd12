"""Exhaustive block-length search per (scheme, received power)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .analytics import SystemConfig, scheme_aoi
from .channel import effective_snr
from .errors import DivergentAoIError, InvalidArgumentError
from .per_model import PerCache, PerModel
from .scheme import Scheme

METRICS = ("average", "bounded")


@dataclass(frozen=True)
class SweepSpec:
    l_min: int = 100
    l_max: int = 400
    l_step: int = 10
    metric: str = "average"
    per_model: PerModel = field(default_factory=PerModel)
    powers_db: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        if self.metric not in METRICS:
            raise InvalidArgumentError(f"metric must be one of {METRICS}, got {self.metric!r}")
        if self.l_step < 1:
            raise InvalidArgumentError("l_step must be >= 1")
        if self.l_min < 1 or self.l_min > self.l_max:
            raise InvalidArgumentError(f"need 1 <= l_min <= l_max, got {self.l_min}..{self.l_max}")
        object.__setattr__(self, "powers_db", tuple(float(p) for p in self.powers_db))

    def grid(self) -> range:
        return range(self.l_min, self.l_max + 1, self.l_step)


@dataclass(frozen=True)
class OptimumPoint:
    power_db: float
    scheme: Scheme
    best_l: int
    best_value: float
    per_at_best: float


@dataclass(frozen=True)
class GridPoint:
    block_len: int
    per: float
    value: float


def db_to_linear(power_db: float) -> float:
    return 10.0 ** (power_db / 10.0)


def evaluate_grid(
    cfg: SystemConfig, spec: SweepSpec, scheme, power_db: float, cache: PerCache | None = None
) -> list[GridPoint]:
    """Objective at every block length; ``inf`` where the PER is 1."""
    scheme = Scheme.parse(scheme)
    if spec.l_min < cfg.source_bits:
        raise InvalidArgumentError(
            f"l_min ({spec.l_min}) must be >= source_bits ({cfg.source_bits})"
        )
    cache = cache if cache is not None else PerCache()
    snr = effective_snr(scheme, cfg.users, cfg.bandwidth, db_to_linear(power_db)).snr
    points = []
    for block_len in spec.grid():
        per = cache.get(spec.per_model, cfg.source_bits, block_len, snr)
        if per >= 1.0:
            points.append(GridPoint(block_len, per, math.inf))
            continue
        stats = scheme_aoi(scheme, cfg, block_len, per)
        value = stats.mean if spec.metric == "average" else stats.bounded_upper
        points.append(GridPoint(block_len, per, value))
    return points


def optimize_blocklength(
    cfg: SystemConfig, spec: SweepSpec, scheme, cache: PerCache | None = None
) -> list[OptimumPoint]:
    """Argmin over the L grid for each power in ``spec``; ties go to the smaller L."""
    scheme = Scheme.parse(scheme)
    if len(spec.grid()) == 0:
        raise InvalidArgumentError("block-length grid is empty")
    cache = cache if cache is not None else PerCache()
    out = []
    for power_db in spec.powers_db:
        points = evaluate_grid(cfg, spec, scheme, power_db, cache)
        best = min(points, key=lambda g: g.value)  # min() keeps the first of equal values
        if math.isinf(best.value):
            raise DivergentAoIError(
                f"{scheme} at {power_db} dB: PER is 1 at every block length in the grid"
            )
        out.append(OptimumPoint(power_db, scheme, best.block_len, best.value, best.per))
    return out
