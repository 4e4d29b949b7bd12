"""Random-coding error exponent and RCB packet-error estimates.

The channel is real-valued AWGN with unit noise power and equiprobable
BPSK inputs of amplitude ``+-sqrt(snr)``.  One channel use carries one
coded bit, so the code rate is ``R = K / L <= 1`` bits per channel use.

``E0(rho)`` is evaluated as an expectation over the channel output
conditioned on the ``+sqrt(snr)`` input (the channel is output-symmetric)::

    E0(rho) = -log2 E_n[ ((1 + exp(-2 a (a + n) / (1 + rho))) / 2) ** rho ]

with ``a = sqrt(snr)`` and ``n ~ N(0, 1)``, using Gauss-Hermite quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp, roots_hermite

from .errors import InvalidArgumentError, NumericFailureError
from .scheme import Scheme

GH_START_NODES = 64
GH_MAX_NODES = 4096
GH_TOLERANCE = 1e-10

RHO_GRID_POINTS = 256
RHO_TOLERANCE = 1e-8

_LN2 = math.log(2.0)
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ChannelSnr:
    """Linear per-channel-use SNR (signal power over unit noise power)."""

    snr: float

    def __post_init__(self):
        if not math.isfinite(self.snr) or self.snr < 0:
            raise InvalidArgumentError(f"snr must be finite and >= 0, got {self.snr}")

    @classmethod
    def from_db(cls, snr_db: float) -> "ChannelSnr":
        return cls(10.0 ** (snr_db / 10.0))

    @property
    def db(self) -> float:
        return 10.0 * math.log10(self.snr) if self.snr > 0 else -math.inf


@dataclass(frozen=True)
class ExponentResult:
    e_g: float
    rho_star: float
    rate: float


@dataclass(frozen=True)
class PerEstimate:
    per: float
    block_len: int
    source_bits: int


def _as_snr(ch) -> float:
    if isinstance(ch, ChannelSnr):
        return ch.snr
    return ChannelSnr(float(ch)).snr


def effective_snr(scheme, users: int, bandwidth: float, power: float) -> ChannelSnr:
    """SNR seen by one user's coded bits: P/B under TDMA, N*P/B under FDMA.

    An FDMA user concentrates its power in a band of width B/N, so its
    noise power shrinks by N relative to a TDMA user that spans all of B.
    """
    scheme = Scheme.parse(scheme)
    if users < 1:
        raise InvalidArgumentError(f"users must be >= 1, got {users}")
    if not bandwidth > 0:
        raise InvalidArgumentError(f"bandwidth must be > 0, got {bandwidth}")
    if power < 0:
        raise InvalidArgumentError(f"power must be >= 0, got {power}")
    if scheme is Scheme.TDMA:
        return ChannelSnr(power / bandwidth)
    return ChannelSnr(users * power / bandwidth)


@lru_cache(maxsize=None)
def _gh_nodes(n: int):
    x, w = roots_hermite(n)
    with np.errstate(divide="ignore"):
        log_w = np.log(w / math.sqrt(math.pi))
    return math.sqrt(2.0) * x, log_w


def _e0_quadrature(rhos: np.ndarray, snr: float, n_nodes: int) -> np.ndarray:
    noise, log_w = _gh_nodes(n_nodes)
    a = math.sqrt(snr)
    rhos = rhos[:, None]
    z = -2.0 * a * (a + noise[None, :]) / (1.0 + rhos)
    # summed in the log domain: at high SNR the far negative-noise nodes
    # carry huge integrand values against vanishing weights
    log_terms = log_w[None, :] + rhos * (np.logaddexp(0.0, z) - _LN2)
    return -logsumexp(log_terms, axis=1) / _LN2


def _e0_many(rhos, snr: float) -> np.ndarray:
    rhos = np.atleast_1d(np.asarray(rhos, dtype=float))
    if np.any((rhos < 0) | (rhos > 1)):
        raise InvalidArgumentError("rho must lie in [0, 1]")
    if snr == 0.0:
        return np.zeros_like(rhos)
    n = GH_START_NODES
    previous = _e0_quadrature(rhos, snr, n)
    while n < GH_MAX_NODES:
        n *= 2
        current = _e0_quadrature(rhos, snr, n)
        if np.max(np.abs(current - previous)) < GH_TOLERANCE:
            out = np.clip(current, 0.0, 1.0)
            out[rhos == 0] = 0.0
            return out
        previous = current
    raise NumericFailureError(
        f"E0 quadrature did not converge at snr={snr} with {GH_MAX_NODES} nodes"
    )


def e0(rho: float, ch) -> float:
    """Gallager's E0 function in bits for BPSK over real AWGN."""
    if not 0.0 <= rho <= 1.0:
        raise InvalidArgumentError(f"rho must lie in [0, 1], got {rho}")
    return float(_e0_many([rho], _as_snr(ch))[0])


@lru_cache(maxsize=4096)
def _e0_grid(snr: float) -> np.ndarray:
    grid = _e0_many(np.linspace(0.0, 1.0, RHO_GRID_POINTS), snr)
    grid.setflags(write=False)
    return grid


def error_exponent(rate: float, ch) -> ExponentResult:
    """Maximise ``E0(rho) - rho * rate`` over ``rho`` in [0, 1].

    A coarse grid locates the maximum; golden-section search then refines
    it inside the neighbouring grid cells.  ``E0`` is concave in ``rho``, so
    the objective is unimodal and the bracket always holds the optimum.
    Ties go to the smaller ``rho``.
    """
    if not 0.0 < rate <= 1.0:
        raise InvalidArgumentError(f"rate must lie in (0, 1], got {rate}")
    snr = _as_snr(ch)
    rhos = np.linspace(0.0, 1.0, RHO_GRID_POINTS)
    values = _e0_grid(snr) - rhos * rate
    i = int(np.argmax(values))
    best_rho, best_val = float(rhos[i]), float(values[i])

    def objective(r):
        return float(_e0_many([r], snr)[0]) - r * rate

    lo = float(rhos[max(i - 1, 0)])
    hi = float(rhos[min(i + 1, RHO_GRID_POINTS - 1)])
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = objective(c), objective(d)
    while hi - lo > RHO_TOLERANCE:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = objective(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = objective(d)
    r = 0.5 * (lo + hi)
    fr = objective(r)
    if fr > best_val:
        best_rho, best_val = r, fr
    return ExponentResult(e_g=max(best_val, 0.0), rho_star=best_rho, rate=rate)


def per_estimate(source_bits: int, block_len: int, ch) -> PerEstimate:
    """RCB point estimate ``min(1, 2 ** (-L * E_G(K / L)))``."""
    if source_bits < 1 or block_len < 1:
        raise InvalidArgumentError("source_bits and block_len must be positive")
    if source_bits > block_len:
        raise InvalidArgumentError(
            f"source_bits ({source_bits}) cannot exceed block_len ({block_len})"
        )
    exp = error_exponent(source_bits / block_len, ch)
    per = min(1.0, 2.0 ** (-block_len * exp.e_g))
    return PerEstimate(per=per, block_len=block_len, source_bits=source_bits)
