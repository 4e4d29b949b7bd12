"""Exit criteria for the package, one test per criterion.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from aoi_mac.analytics import SystemConfig, fdma_aoi, geom_moments, scheme_aoi, tdma_aoi
from aoi_mac.channel import ChannelSnr, e0, error_exponent, per_estimate
from aoi_mac.cli import run_experiment
from aoi_mac.experiment import ExperimentConfig, run_sweep
from aoi_mac.ldpc import estimate_per, simulate_packets
from aoi_mac.optimizer import SweepSpec, optimize_blocklength
from aoi_mac.per_model import PerModel
from aoi_mac.simulator import (
    SchemeTiming,
    draw_renewals,
    empirical_average_aoi,
    empirical_bounded_aoi,
)

from oracles import e0_trapezoid, geometric_moment_sum


def test_ac1_error_free_closed_forms():
    for n in (1, 2, 10):
        cfg = SystemConfig(users=n)
        for length in (100, 400):
            t, f = tdma_aoi(cfg, length, 0.0), fdma_aoi(cfg, length, 0.0)
            var = n * n * length * length / 12.0
            assert t.mean == pytest.approx((1 + n / 2) * length, rel=1e-12, abs=0)
            assert f.mean == pytest.approx(1.5 * n * length, rel=1e-12, abs=0)
            assert t.variance == pytest.approx(var, rel=1e-12, abs=0)
            assert f.variance == pytest.approx(var, rel=1e-12, abs=0)


def test_ac2_geometric_moments_vs_brute_force():
    for p in (0.1, 0.3, 0.5, 0.7, 0.9):
        m = geom_moments(p)
        for k, got in ((1, m.m1), (2, m.m2), (3, m.m3)):
            assert got == pytest.approx(geometric_moment_sum(p, k, 10**6), rel=1e-9, abs=0)
    assert geometric_moment_sum(0.5, 3) == pytest.approx(26.0, rel=1e-9)
    assert geom_moments(0.5).m3 == pytest.approx(26.0, rel=1e-12)


@pytest.mark.parametrize("scheme", ["TDMA", "FDMA"])
def test_ac3_renewal_simulation_matches_closed_form(scheme):
    for n in (2, 10):
        for p in (0.1, 0.3, 0.5):
            start = time.perf_counter()
            timing = SchemeTiming.for_scheme(scheme, n, 100)
            batch = draw_renewals(p, 10**6, 1000 * n + int(100 * p), timing)
            mean, _ = empirical_average_aoi(batch)
            elapsed = time.perf_counter() - start
            ref = scheme_aoi(scheme, SystemConfig(users=n), 100, p).mean
            assert abs(mean - ref) / ref < 0.01, (n, p, mean, ref)
            assert elapsed < 60.0


def test_ac4_chebyshev_dominates_simulation():
    seed = 0
    for scheme in ("TDMA", "FDMA"):
        for n in (1, 2, 10):
            cfg = SystemConfig(users=n, gamma=0.99)
            for p in (0.0, 0.01, 0.05, 0.1, 0.3, 0.5, 0.7, 0.9):
                for length in (100, 250, 400):
                    timing = SchemeTiming.for_scheme(scheme, n, length)
                    seed += 1
                    batch = draw_renewals(p, 200_000, seed, timing)
                    sim = empirical_bounded_aoi(batch, 0.99)
                    bound = scheme_aoi(scheme, cfg, length, p).bounded_upper
                    assert sim <= bound, (scheme, n, p, length, sim, bound)
    sweep = ExperimentConfig(users=10, powers_db=tuple(range(0, 13)), metric="bounded",
                             renewals=100_000, seed=4)
    for row in run_sweep(sweep):
        assert row.bounded_aoi_sim <= row.bounded_aoi_chebyshev


def test_ac5_tdma_halves_fdma_average_aoi():
    cfg = SystemConfig(users=10, source_bits=100)
    spec = SweepSpec(100, 400, 10, "average", PerModel(kind="rcb"), (4.0,))
    tdma = optimize_blocklength(cfg, spec, "TDMA")[0]
    fdma = optimize_blocklength(cfg, spec, "FDMA")[0]
    ratio = tdma.best_value / fdma.best_value
    print(f"TDMA/FDMA average AoI at 4 dB: {ratio:.3f} (L_TD={tdma.best_l}, L_FD={fdma.best_l})")
    assert abs(ratio - 0.5) <= 0.10
    rows = run_sweep(ExperimentConfig(users=10, powers_db=(4.0,), renewals=10**6, seed=1))
    by = {r.scheme.value: r for r in rows}
    assert abs(by["TDMA"].avg_aoi_sim / by["FDMA"].avg_aoi_sim - 0.5) <= 0.10


def test_ac6_bounded_aoi_crossover():
    cfg = ExperimentConfig(users=10, powers_db=tuple(range(0, 13)), metric="bounded",
                           renewals=200_000, seed=6)
    rows = run_sweep(cfg)
    for column in ("bounded_aoi_chebyshev", "bounded_aoi_sim"):
        td = [getattr(r, column) for r in rows if r.scheme.value == "TDMA"]
        fd = [getattr(r, column) for r in rows if r.scheme.value == "FDMA"]
        diff = np.sign(np.array(td) - np.array(fd))
        assert diff[0] > 0, column  # FDMA lower at the lowest power
        assert diff[-1] < 0, column  # TDMA lower at the highest power
        assert np.any(diff[:-1] != diff[1:]), column


def test_ac7_rcb_properties():
    for snr in (0.5, 2.0, 8.0, 30.0):
        rates = np.linspace(0.05, 1.0, 20)
        eg = [error_exponent(r, snr).e_g for r in rates]
        assert all(b <= a + 1e-12 for a, b in zip(eg, eg[1:]))
        assert all(0.0 <= v <= e0(1.0, snr) for v in eg)
    lengths = range(100, 401, 10)
    snrs = [10 ** (db / 10) for db in range(-4, 15)]
    table = np.array([[per_estimate(100, L, s).per for L in lengths] for s in snrs])
    assert np.all(np.diff(table, axis=1) <= 1e-15)
    assert np.all(np.diff(table, axis=0) <= 1e-15)
    samples = [(0.1, 0.05), (0.2, 0.5), (0.3, 1.0), (0.45, 2.0), (0.5, 4.0),
               (0.6, 7.5), (0.75, 10.0), (0.9, 20.0), (1.0, 0.3), (1.0, 50.0)]
    for rho, snr in samples:
        assert e0(rho, snr) == pytest.approx(e0_trapezoid(rho, snr), abs=1e-8)


def test_ac8_ldpc_pipeline():
    start = time.perf_counter()
    ok = simulate_packets(100, 200, ChannelSnr(1e6), 0, 1000, seed=8)
    assert ok.all()
    pers = []
    for db in (0, 2, 4, 6, 8):
        m = estimate_per(100, 200, ChannelSnr.from_db(db), min_errors=100, max_trials=10**6, seed=8)
        assert m.errors >= 100
        pers.append(m.per_hat)
    print("LDPC PER at 0..8 dB:", ", ".join(f"{p:.4g}" for p in pers))
    assert all(b <= a for a, b in zip(pers, pers[1:]))
    assert time.perf_counter() - start < 600.0


def test_ac9_replay_is_byte_identical(tmp_path):
    configs = {
        "rcb.ini": "users = 3\npower_db = 0:6:2\nmetric = bounded\nrenewals = 30000\nseed = 11\n",
        "ldpc.ini": (
            "users = 2\npower_db = 4, 8\nper_model = ldpc\nl_min = 150\nl_max = 250\n"
            "l_step = 50\nldpc_min_errors = 10\nldpc_max_trials = 300\nrenewals = 5000\nseed = 12\n"
        ),
    }
    for name, text in configs.items():
        cfg = tmp_path / name
        cfg.write_text(text)
        outputs = []
        for workers in (1, 2, 4):
            out = tmp_path / f"{name}.{workers}.csv"
            assert run_experiment(cfg, csv=out, workers=workers) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]
