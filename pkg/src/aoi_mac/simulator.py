"""Monte-Carlo AoI: renewal sampling and an explicit slot-level timeline.

Within a renewal cycle of length ``D`` the age ramps linearly from the
packet duration ``T`` (the age of a packet at the moment it is decoded) up
to ``T + D``.  Means, second moments and time fractions are therefore
integrated exactly per cycle instead of sampling the sawtooth on a grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytics import SystemConfig
from .channel import effective_snr
from .errors import DivergentAoIError, InvalidArgumentError
from .per_model import PerModel
from .scheme import Scheme

BISECT_RTOL = 1e-9


@dataclass(frozen=True)
class SchemeTiming:
    scheme: Scheme
    packet_duration: float
    renewal_scale: float

    @classmethod
    def for_scheme(cls, scheme, users: int, block_len: int, bandwidth: float = 1.0):
        scheme = Scheme.parse(scheme)
        if users < 1 or block_len < 1 or not bandwidth > 0:
            raise InvalidArgumentError("users, block_len and bandwidth must be positive")
        if scheme is Scheme.TDMA:
            slot = block_len / bandwidth
            return cls(scheme, slot, users * slot)
        duration = users * block_len / bandwidth
        return cls(scheme, duration, duration)


@dataclass(frozen=True, eq=False)
class RenewalBatch:
    samples: np.ndarray
    timing: SchemeTiming
    per: float

    @property
    def durations(self) -> np.ndarray:
        return self.samples * self.timing.renewal_scale


@dataclass(frozen=True)
class UserTrace:
    user: int
    power: float
    per: float
    emp_mean: float
    emp_second_moment: float
    emp_bounded: float
    total_time: float
    cycles: int


@dataclass(frozen=True)
class AoiTraceSummary:
    emp_mean: float
    emp_second_moment: float
    emp_bounded: float
    total_time: float
    users: tuple[UserTrace, ...]


def _cycle_moments(durations: np.ndarray, reset: float) -> tuple[float, float]:
    d = np.asarray(durations, dtype=float)
    span = d.sum()
    area = np.sum(d * reset + 0.5 * d * d)
    area2 = np.sum(reset * reset * d + reset * d * d + d**3 / 3.0)
    return float(area / span), float(area2 / span)


def _time_fraction(durations: np.ndarray, reset: float, threshold: float) -> float:
    d = np.asarray(durations, dtype=float)
    covered = np.minimum(max(threshold - reset, 0.0), d)
    return float(covered.sum() / d.sum())


def _bounded(durations: np.ndarray, reset: float, gamma: float) -> float:
    if not 0.0 < gamma < 1.0:
        raise InvalidArgumentError(f"gamma must lie in (0, 1), got {gamma}")
    d = np.asarray(durations, dtype=float)
    lo, hi = reset, reset + float(d.max())
    while hi - lo > BISECT_RTOL * hi:
        mid = 0.5 * (lo + hi)
        if _time_fraction(d, reset, mid) >= gamma:
            hi = mid
        else:
            lo = mid
    return hi


def draw_renewals(per: float, count: int, seed, timing: SchemeTiming) -> RenewalBatch:
    """I.i.d. geometric packet counts between consecutive successful updates."""
    if not 0.0 <= per < 1.0:
        raise InvalidArgumentError(f"per must lie in [0, 1), got {per}")
    if count < 1:
        raise InvalidArgumentError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    samples = rng.geometric(1.0 - per, size=count).astype(np.int64)
    return RenewalBatch(samples=samples, timing=timing, per=per)


def empirical_average_aoi(batch: RenewalBatch) -> tuple[float, float]:
    """Time-average age and squared age over the sampled cycles."""
    return _cycle_moments(batch.durations, batch.timing.packet_duration)


def aoi_time_fraction(batch: RenewalBatch, threshold: float) -> float:
    if threshold < 0:
        raise InvalidArgumentError("threshold must be >= 0")
    return _time_fraction(batch.durations, batch.timing.packet_duration, threshold)


def empirical_bounded_aoi(batch: RenewalBatch, gamma: float) -> float:
    """Smallest threshold the age stays under for a fraction ``gamma`` of time."""
    return _bounded(batch.durations, batch.timing.packet_duration, gamma)


def decode_instants(timing: SchemeTiming, users: int, user: int, rounds: int) -> np.ndarray:
    """End-of-packet times for ``user`` (0-based) over ``rounds`` rounds."""
    r = np.arange(rounds, dtype=float)
    if timing.scheme is Scheme.TDMA:
        return r * timing.renewal_scale + (user + 1) * timing.packet_duration
    return (r + 1.0) * timing.packet_duration


def simulate_slot_level(
    cfg: SystemConfig,
    block_len: int,
    per_model: PerModel,
    horizon_rounds: int,
    seed: int,
    scheme,
) -> AoiTraceSummary:
    """Simulate every user's decode opportunities and integrate each age trace.

    Statistics cover completed cycles only: time before a user's first
    success and after its last one is discarded.  Unequal per-user powers
    change only the decoding probabilities; slots and bands stay equal.
    """
    if horizon_rounds < 1:
        raise InvalidArgumentError("horizon_rounds must be >= 1")
    timing = SchemeTiming.for_scheme(scheme, cfg.users, block_len, cfg.bandwidth)
    traces = []
    for j, power in enumerate(cfg.user_powers()):
        snr = effective_snr(timing.scheme, cfg.users, cfg.bandwidth, power).snr
        stream = int(np.random.SeedSequence(seed, spawn_key=(j,)).generate_state(1)[0])
        ok = per_model.successes(cfg.source_bits, block_len, snr, horizon_rounds, stream)
        t = decode_instants(timing, cfg.users, j, horizon_rounds)[ok]
        if t.size < 2:
            raise DivergentAoIError(f"user {j} completed no renewal cycle within the horizon")
        cycles = np.diff(t)
        mean, second = _cycle_moments(cycles, timing.packet_duration)
        traces.append(
            UserTrace(
                user=j,
                power=power,
                per=1.0 - ok.mean(),
                emp_mean=mean,
                emp_second_moment=second,
                emp_bounded=_bounded(cycles, timing.packet_duration, cfg.gamma),
                total_time=float(cycles.sum()),
                cycles=int(cycles.size),
            )
        )
    return AoiTraceSummary(
        emp_mean=float(np.mean([u.emp_mean for u in traces])),
        emp_second_moment=float(np.mean([u.emp_second_moment for u in traces])),
        emp_bounded=max(u.emp_bounded for u in traces),
        total_time=horizon_rounds * timing.renewal_scale,
        users=tuple(traces),
    )
