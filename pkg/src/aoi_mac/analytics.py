"""Closed-form average AoI, second moment and Chebyshev bounded AoI.

Times are in seconds when the bandwidth is in Hz.  With the bandwidth
normalised to 1, a time of 1 is the duration of one coded bit on the full
band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DivergentAoIError, InvalidArgumentError
from .scheme import Scheme


@dataclass(frozen=True)
class SystemConfig:
    """Physical parameters shared by every user of the network.

    ``power`` is the received power per user.  A sequence of ``users``
    values selects the asymmetric mode, which only the simulator supports.
    """

    users: int
    bandwidth: float = 1.0
    power: float | tuple[float, ...] = 1.0
    source_bits: int = 100
    gamma: float = 0.99

    def __post_init__(self):
        if self.users < 1:
            raise InvalidArgumentError(f"users must be >= 1, got {self.users}")
        if not self.bandwidth > 0:
            raise InvalidArgumentError(f"bandwidth must be > 0, got {self.bandwidth}")
        if not 0.0 < self.gamma < 1.0:
            raise InvalidArgumentError(f"gamma must lie in (0, 1), got {self.gamma}")
        if self.source_bits < 1:
            raise InvalidArgumentError("source_bits must be >= 1")
        if isinstance(self.power, (list, tuple)):
            object.__setattr__(self, "power", tuple(float(p) for p in self.power))
            if len(self.power) != self.users:
                raise InvalidArgumentError(
                    f"expected {self.users} per-user powers, got {len(self.power)}"
                )
            if any(p < 0 for p in self.power):
                raise InvalidArgumentError("powers must be >= 0")
        elif self.power < 0:
            raise InvalidArgumentError(f"power must be >= 0, got {self.power}")

    @property
    def symmetric(self) -> bool:
        return not isinstance(self.power, tuple)

    def user_powers(self) -> tuple[float, ...]:
        if self.symmetric:
            return (float(self.power),) * self.users
        return self.power


@dataclass(frozen=True)
class GeomMoments:
    m1: float
    m2: float
    m3: float
    per: float


@dataclass(frozen=True)
class AoiStats:
    mean: float
    second_moment: float
    variance: float
    bounded_upper: float
    scheme: Scheme
    block_len: int


def geom_moments(per: float) -> GeomMoments:
    """First three raw moments of X ~ Geometric(1 - per) on {1, 2, ...}."""
    if not 0.0 <= per < 1.0:
        raise InvalidArgumentError(f"per must lie in [0, 1), got {per}")
    q = 1.0 - per
    return GeomMoments(
        m1=1.0 / q,
        m2=(1.0 + per) / q**2,
        m3=(1.0 + 4.0 * per + per * per) / q**3,
        per=per,
    )


def chebyshev_bound(mean: float, variance: float, gamma: float) -> float:
    """Smallest threshold that Chebyshev's inequality certifies at confidence ``gamma``."""
    if not 0.0 < gamma < 1.0:
        raise InvalidArgumentError(f"gamma must lie in (0, 1), got {gamma}")
    return math.sqrt(max(variance, 0.0) / (1.0 - gamma)) + mean


def _check(block_len: int, per: float) -> None:
    if block_len < 1:
        raise InvalidArgumentError(f"block_len must be >= 1, got {block_len}")
    if per >= 1.0:
        raise DivergentAoIError("PER = 1: no update is ever delivered")
    if per < 0.0:
        raise InvalidArgumentError(f"per must be >= 0, got {per}")


def _stats(scheme, mean, second, gamma, block_len) -> AoiStats:
    variance = max(second - mean * mean, 0.0)
    return AoiStats(
        mean=mean,
        second_moment=second,
        variance=variance,
        bounded_upper=chebyshev_bound(mean, variance, gamma),
        scheme=scheme,
        block_len=block_len,
    )


def tdma_aoi(cfg: SystemConfig, block_len: int, per: float) -> AoiStats:
    """TDMA: slot ``T = L/B``, one decode opportunity per user every ``N*T``."""
    _check(block_len, per)
    n = cfg.users
    m = geom_moments(per)
    slot = block_len / cfg.bandwidth
    mean = (1.0 + n / (1.0 - per) - n / 2.0) * slot
    second = (n * n * m.m3 / (3.0 * m.m1) + n * m.m2 / m.m1 + 1.0) * slot**2
    return _stats(Scheme.TDMA, mean, second, cfg.gamma, block_len)


def fdma_aoi(cfg: SystemConfig, block_len: int, per: float) -> AoiStats:
    """FDMA: each user sends back-to-back packets of duration ``N*L/B``."""
    _check(block_len, per)
    m = geom_moments(per)
    duration = cfg.users * block_len / cfg.bandwidth
    mean = (0.5 + 1.0 / (1.0 - per)) * duration
    second = (m.m3 / (3.0 * m.m1) + m.m2 / m.m1 + 1.0) * duration**2
    return _stats(Scheme.FDMA, mean, second, cfg.gamma, block_len)


def scheme_aoi(scheme, cfg: SystemConfig, block_len: int, per: float) -> AoiStats:
    if Scheme.parse(scheme) is Scheme.TDMA:
        return tdma_aoi(cfg, block_len, per)
    return fdma_aoi(cfg, block_len, per)


def network_bounded_upper(per_user: Sequence[AoiStats | float]) -> float:
    """Network bound: every user must meet the threshold, so take the max."""
    if len(per_user) == 0:
        raise InvalidArgumentError("per_user must be non-empty")
    return max(s.bounded_upper if isinstance(s, AoiStats) else float(s) for s in per_user)
