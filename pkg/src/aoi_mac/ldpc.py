"""Degree-4 random codes, BPSK over AWGN, and belief-propagation decoding.

Each parity bit is the XOR of four distinct source bits drawn uniformly
at random.  In the default *systematic* layout a block of length ``L``
carries the ``K`` source bits followed by ``L - K`` such parity bits.  The
*non-systematic* layout (every one of the ``L`` coded bits a degree-4 XOR)
is kept for completeness, but it cannot be decoded: an even degree maps a
source word and its complement to the same codeword, and with no channel
evidence on the source bits the all-zero messages are a BP fixed point.

Decoding is flooding sum-product in the LLR domain on the bipartite graph
of source bits and parity bits.  Success is checked against the
transmitted source word, since the construction has no parity checks the
receiver could verify on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSnr, _as_snr
from .errors import InvalidArgumentError

DEGREE = 4
LLR_CLAMP = 30.0
DEFAULT_MAX_ITER = 50
CHUNK = 256

_TANH_CLAMP = math.tanh(LLR_CLAMP / 2.0)  # bounds 2*atanh(.) by LLR_CLAMP
_CONVERGED = 1e-12


@dataclass(frozen=True, eq=False)
class GeneratorGraph:
    """``edges[i]`` lists the four source bits XORed into parity bit ``i``."""

    source_bits: int
    block_len: int
    edges: np.ndarray
    systematic: bool = True

    @property
    def parity_offset(self) -> int:
        return self.source_bits if self.systematic else 0

    def coded_degrees(self) -> np.ndarray:
        deg = np.full(self.block_len, DEGREE, dtype=int)
        deg[: self.parity_offset] = 1
        return deg

    def neighbours(self, source_index: int) -> np.ndarray:
        """Coded-bit positions whose value depends on ``source_index``."""
        rows = np.flatnonzero((self.edges == source_index).any(axis=1))
        hits = rows + self.parity_offset
        if self.systematic:
            hits = np.concatenate(([source_index], hits))
        return hits

    def __eq__(self, other):
        if not isinstance(other, GeneratorGraph):
            return NotImplemented
        return (
            self.source_bits == other.source_bits
            and self.block_len == other.block_len
            and self.systematic == other.systematic
            and np.array_equal(self.edges, other.edges)
        )


@dataclass(frozen=True, eq=False)
class ReceivedBlock:
    llrs: np.ndarray
    truth: np.ndarray


@dataclass(frozen=True)
class PerMeasurement:
    per_hat: float
    trials: int
    errors: int
    ci95_halfwidth: float


def _validate_dims(source_bits: int, block_len: int, systematic: bool) -> int:
    if source_bits < DEGREE:
        raise InvalidArgumentError(f"source_bits must be >= {DEGREE}, got {source_bits}")
    if block_len < 1:
        raise InvalidArgumentError(f"block_len must be >= 1, got {block_len}")
    if systematic and block_len < source_bits:
        raise InvalidArgumentError("systematic codes need block_len >= source_bits")
    return block_len - source_bits if systematic else block_len


def _draw_edges(rng: np.random.Generator, source_bits: int, rows: int) -> np.ndarray:
    """Uniform draws of 4 distinct indices per row, by rejecting rows with repeats."""
    edges = rng.integers(0, source_bits, size=(rows, DEGREE))
    while True:
        s = np.sort(edges, axis=1)
        bad = np.flatnonzero((s[:, 1:] == s[:, :-1]).any(axis=1))
        if bad.size == 0:
            return edges
        edges[bad] = rng.integers(0, source_bits, size=(bad.size, DEGREE))


def build_code(source_bits: int, block_len: int, seed, systematic: bool = True) -> GeneratorGraph:
    rows = _validate_dims(source_bits, block_len, systematic)
    rng = np.random.default_rng(seed)
    return GeneratorGraph(source_bits, block_len, _draw_edges(rng, source_bits, rows), systematic)


def encode(graph: GeneratorGraph, source) -> np.ndarray:
    source = np.asarray(source, dtype=np.int8)
    if source.shape != (graph.source_bits,):
        raise InvalidArgumentError(
            f"source must have length {graph.source_bits}, got shape {source.shape}"
        )
    parity = (source[graph.edges].sum(axis=1) & 1).astype(np.int8)
    if graph.systematic:
        return np.concatenate((source, parity))
    return parity


def _modulate(codeword: np.ndarray, snr: float, noise: np.ndarray) -> np.ndarray:
    amp = math.sqrt(snr)
    y = (1.0 - 2.0 * codeword) * amp + noise
    return 2.0 * amp * y


def transmit(codeword, ch, rng: np.random.Generator, truth=None) -> ReceivedBlock:
    """BPSK (0 -> +a, 1 -> -a) plus unit-variance Gaussian noise, returned as LLRs.

    ``truth`` is the source word behind ``codeword``; it rides along so the
    decoder's output can be checked.
    """
    codeword = np.asarray(codeword, dtype=np.int8)
    noise = rng.standard_normal(codeword.shape[0])
    if truth is not None:
        truth = np.asarray(truth, dtype=np.int8)
    return ReceivedBlock(llrs=_modulate(codeword, _as_snr(ch), noise), truth=truth)


def _bp_batch(source_bits, edges, parity_llr, prior_llr, max_iter):
    """Flooding sum-product over a batch of independent graphs.

    edges: (B, M, 4) source indices; parity_llr: (B, M); prior_llr: (B, K).
    Returns hard decisions of shape (B, K).
    """
    batch = edges.shape[0]
    flat = (edges + source_bits * np.arange(batch)[:, None, None]).ravel()
    size = batch * source_bits
    prior_flat = prior_llr.ravel()
    if edges.shape[1] == 0:
        return (prior_llr < 0).astype(np.int8)

    tc = np.tanh(np.clip(parity_llr, -LLR_CLAMP, LLR_CLAMP) / 2.0)[..., None]
    v2c = prior_flat[flat].reshape(edges.shape)
    total = prior_flat
    for _ in range(max_iter):
        t = np.tanh(v2c / 2.0)
        p01 = t[..., 0] * t[..., 1]
        p23 = t[..., 2] * t[..., 3]
        others = np.stack(
            (t[..., 1] * p23, t[..., 0] * p23, p01 * t[..., 3], p01 * t[..., 2]), axis=-1
        )
        c2v = 2.0 * np.arctanh(np.clip(tc * others, -_TANH_CLAMP, _TANH_CLAMP))
        total = prior_flat + np.bincount(flat, weights=c2v.ravel(), minlength=size)
        new = np.clip(total[flat].reshape(edges.shape) - c2v, -LLR_CLAMP, LLR_CLAMP)
        delta = np.max(np.abs(new - v2c))
        v2c = new
        if delta < _CONVERGED:
            break
    return (total.reshape(batch, source_bits) < 0).astype(np.int8)


def _split_llrs(graph_systematic: bool, source_bits: int, llrs: np.ndarray):
    """Split (B, L) LLRs into clamped source priors and parity LLRs."""
    llrs = np.clip(llrs, -LLR_CLAMP, LLR_CLAMP)
    if graph_systematic:
        return llrs[:, :source_bits], llrs[:, source_bits:]
    return np.zeros((llrs.shape[0], source_bits)), llrs


def bp_decode(graph: GeneratorGraph, block: ReceivedBlock, max_iter: int = DEFAULT_MAX_ITER):
    """Decode one block; returns ``(decoded_bits, success)``."""
    if max_iter < 1:
        raise InvalidArgumentError(f"max_iter must be >= 1, got {max_iter}")
    llrs = np.asarray(block.llrs, dtype=float)
    if llrs.shape != (graph.block_len,):
        raise InvalidArgumentError(f"expected {graph.block_len} LLRs, got {llrs.shape}")
    prior, parity = _split_llrs(graph.systematic, graph.source_bits, llrs[None, :])
    decoded = _bp_batch(graph.source_bits, graph.edges[None], parity, prior, max_iter)[0]
    success = block.truth is not None and bool(np.array_equal(decoded, block.truth))
    return decoded, success


def packet_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for packet ``index``; stable under any work split."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def simulate_packets(
    source_bits: int,
    block_len: int,
    ch,
    start: int,
    count: int,
    seed: int,
    max_iter: int = DEFAULT_MAX_ITER,
    systematic: bool = True,
) -> np.ndarray:
    """Run packets ``start .. start+count-1`` end to end; returns success flags.

    Every packet draws a fresh code, a uniform source word and unit-variance
    noise from its own stream.  The noise does not depend on the SNR, so the
    same seed gives common random numbers across an SNR sweep.
    """
    rows = _validate_dims(source_bits, block_len, systematic)
    snr = _as_snr(ch)
    edges = np.empty((count, rows, DEGREE), dtype=np.int64)
    truth = np.empty((count, source_bits), dtype=np.int8)
    llrs = np.empty((count, block_len))
    offset = source_bits if systematic else 0
    for j in range(count):
        rng = packet_rng(seed, start + j)
        edges[j] = _draw_edges(rng, source_bits, rows)
        source = rng.integers(0, 2, size=source_bits, dtype=np.int8)
        truth[j] = source
        parity = source[edges[j]].sum(axis=1) & 1
        codeword = np.concatenate((source, parity)) if offset else parity
        llrs[j] = _modulate(codeword, snr, rng.standard_normal(block_len))
    prior, parity_llr = _split_llrs(systematic, source_bits, llrs)
    decoded = _bp_batch(source_bits, edges, parity_llr, prior, max_iter)
    return np.all(decoded == truth, axis=1)


def estimate_per(
    source_bits: int,
    block_len: int,
    ch,
    min_errors: int = 100,
    max_trials: int = 10**6,
    seed: int = 0,
    max_iter: int = DEFAULT_MAX_ITER,
    systematic: bool = True,
) -> PerMeasurement:
    """Monte-Carlo PER, stopping at ``min_errors`` failures or ``max_trials`` packets.

    The stop is exact to the packet, so the result does not depend on the
    batch size used internally.
    """
    if min_errors < 1 or max_trials < 1:
        raise InvalidArgumentError("min_errors and max_trials must be >= 1")
    ch = ch if isinstance(ch, ChannelSnr) else ChannelSnr(float(ch))
    trials = errors = 0
    while trials < max_trials and errors < min_errors:
        count = min(CHUNK, max_trials - trials)
        ok = simulate_packets(
            source_bits, block_len, ch, trials, count, seed, max_iter, systematic
        )
        failures = np.flatnonzero(~ok)
        need = min_errors - errors
        if failures.size >= need:
            trials += int(failures[need - 1]) + 1
            errors = min_errors
        else:
            trials += count
            errors += int(failures.size)
    per = errors / trials
    half = 1.96 * math.sqrt(per * (1.0 - per) / trials)
    return PerMeasurement(per_hat=per, trials=trials, errors=errors, ci95_halfwidth=half)
