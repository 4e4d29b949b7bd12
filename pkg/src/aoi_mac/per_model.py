"""Sources of packet error probability: RCB, Monte-Carlo LDPC, or a constant."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import channel, ldpc
from .errors import InvalidArgumentError

KINDS = ("rcb", "ldpc", "fixed")


@dataclass(frozen=True)
class PerModel:
    kind: str = "rcb"
    fixed_per: float = 0.0
    min_errors: int = 100
    max_trials: int = 10**6
    max_iter: int = ldpc.DEFAULT_MAX_ITER
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"per model must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "fixed" and not 0.0 <= self.fixed_per <= 1.0:
            raise InvalidArgumentError(f"fixed_per must lie in [0, 1], got {self.fixed_per}")
        if self.min_errors < 1 or self.max_trials < 1 or self.max_iter < 1:
            raise InvalidArgumentError("min_errors, max_trials and max_iter must be >= 1")

    @classmethod
    def fixed(cls, per: float) -> "PerModel":
        return cls(kind="fixed", fixed_per=per)

    def ldpc_seed(self, block_len: int) -> int:
        # depends on L only, so an SNR sweep at fixed L reuses the same packets
        return int(np.random.SeedSequence(self.seed, spawn_key=(block_len,)).generate_state(1)[0])

    def per(self, source_bits: int, block_len: int, snr: float) -> float:
        if self.kind == "fixed":
            return self.fixed_per
        if self.kind == "rcb":
            return channel.per_estimate(source_bits, block_len, snr).per
        m = ldpc.estimate_per(
            source_bits,
            block_len,
            snr,
            min_errors=self.min_errors,
            max_trials=self.max_trials,
            seed=self.ldpc_seed(block_len),
            max_iter=self.max_iter,
        )
        return m.per_hat

    def successes(self, source_bits, block_len, snr, count, seed) -> np.ndarray:
        """Per-packet decode outcomes for ``count`` consecutive packets of one user."""
        if self.kind == "ldpc":
            return ldpc.simulate_packets(
                source_bits, block_len, snr, 0, count, seed, max_iter=self.max_iter
            )
        p = self.per(source_bits, block_len, snr)
        return np.random.default_rng(seed).random(count) >= p


class PerCache:
    """Memoises ``PerModel.per`` on (K, L, SNR rounded to 1e-6, model)."""

    def __init__(self):
        self._store: dict = {}

    def __len__(self):
        return len(self._store)

    def get(self, model: PerModel, source_bits: int, block_len: int, snr: float) -> float:
        snr = round(float(snr), 6)
        key = (source_bits, block_len, snr, model)
        if key not in self._store:
            self._store[key] = model.per(source_bits, block_len, snr)
        return self._store[key]
