import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aoi_mac.analytics import (
    AoiStats,
    SystemConfig,
    chebyshev_bound,
    fdma_aoi,
    geom_moments,
    network_bounded_upper,
    tdma_aoi,
)
from aoi_mac.errors import DivergentAoIError, InvalidArgumentError
from aoi_mac.scheme import Scheme

from oracles import geometric_moment_sum

pers = st.floats(min_value=0.0, max_value=0.99)
users = st.integers(min_value=1, max_value=50)
lengths = st.integers(min_value=1, max_value=1000)


class TestGeomMoments:
    def test_no_errors(self):
        m = geom_moments(0.0)
        assert (m.m1, m.m2, m.m3) == (1.0, 1.0, 1.0)

    def test_half(self):
        m = geom_moments(0.5)
        assert (m.m1, m.m2, m.m3) == pytest.approx((2.0, 6.0, 26.0), rel=1e-15)

    def test_footnote_form_is_not_the_third_moment(self):
        # 1 + 7p/(1-p) - 12p^2/(1-p)^2 + 6p^3/(1-p)^3 evaluates to 2 at p = 0.5
        p = 0.5
        printed = 1 + 7 * p / (1 - p) - 12 * p**2 / (1 - p) ** 2 + 6 * p**3 / (1 - p) ** 3
        assert printed == pytest.approx(2.0)
        assert geometric_moment_sum(p, 3) == pytest.approx(26.0, rel=1e-9)

    @pytest.mark.parametrize("p", [0.1, 0.3, 0.5, 0.7, 0.9])
    def test_brute_force(self, p):
        m = geom_moments(p)
        for k, got in ((1, m.m1), (2, m.m2), (3, m.m3)):
            assert got == pytest.approx(geometric_moment_sum(p, k), rel=1e-9)

    def test_p_090_first_two(self):
        m = geom_moments(0.9)
        assert m.m1 == pytest.approx(10.0)
        assert m.m2 == pytest.approx(190.0)

    @pytest.mark.parametrize("p", [1.0, 1.2, -0.1])
    def test_domain(self, p):
        with pytest.raises(InvalidArgumentError):
            geom_moments(p)

    @given(pers)
    def test_power_mean_orderings(self, p):
        m = geom_moments(p)
        assert m.m1 >= 1
        assert m.m2 >= m.m1**2 * (1 - 1e-12)
        assert m.m3 >= m.m2 * m.m1 * (1 - 1e-12)


class TestClosedForms:
    def test_tdma_two_users_error_free(self):
        s = tdma_aoi(SystemConfig(users=2), 100, 0.0)
        assert s.mean == pytest.approx(200.0)
        assert s.second_moment == pytest.approx((4 / 3 + 2 + 1) * 1e4)
        assert s.variance == pytest.approx(1e4 * 4 / 12)
        assert s.bounded_upper == pytest.approx(math.sqrt(1e4 / 3 / 0.01) + 200, abs=1e-9)
        assert s.bounded_upper == pytest.approx(777.35, abs=0.01)

    def test_tdma_ten_users(self):
        s = tdma_aoi(SystemConfig(users=10), 100, 0.3)
        assert s.mean == pytest.approx((1 + 10 / 0.7 - 5) * 100)
        assert s.mean == pytest.approx(1028.57, abs=0.01)

    def test_fdma_two_users_error_free(self):
        s = fdma_aoi(SystemConfig(users=2), 100, 0.0)
        assert s.mean == pytest.approx(300.0)
        assert s.variance == pytest.approx((7 / 3 - 9 / 4) * 4e4)
        assert s.variance == pytest.approx(tdma_aoi(SystemConfig(users=2), 100, 0.0).variance)

    def test_fdma_ten_users(self):
        assert fdma_aoi(SystemConfig(users=10), 100, 0.3).mean == pytest.approx(1928.57, abs=0.01)

    def test_single_user_schemes_agree(self):
        cfg = SystemConfig(users=1)
        t, f = tdma_aoi(cfg, 100, 0.2), fdma_aoi(cfg, 100, 0.2)
        assert t.mean == pytest.approx(f.mean, rel=1e-14)
        assert t.second_moment == pytest.approx(f.second_moment, rel=1e-14)
        assert t.mean == pytest.approx((0.5 + 1 / 0.8) * 100)

    def test_bandwidth_scales_time(self):
        a = tdma_aoi(SystemConfig(users=3, bandwidth=1.0), 100, 0.1)
        b = tdma_aoi(SystemConfig(users=3, bandwidth=4.0), 100, 0.1)
        assert b.mean == pytest.approx(a.mean / 4)
        assert b.variance == pytest.approx(a.variance / 16)

    @pytest.mark.parametrize("fn", [tdma_aoi, fdma_aoi])
    def test_per_one_diverges(self, fn):
        with pytest.raises(DivergentAoIError):
            fn(SystemConfig(users=2), 100, 1.0)

    def test_scheme_tag(self):
        assert tdma_aoi(SystemConfig(users=2), 10, 0.1).scheme is Scheme.TDMA
        assert fdma_aoi(SystemConfig(users=2), 10, 0.1).scheme is Scheme.FDMA

    def test_tdma_beats_fdma_on_grid(self):
        for n in range(2, 21):
            cfg = SystemConfig(users=n)
            for p in np.linspace(0, 0.99, 34):
                assert tdma_aoi(cfg, 200, p).mean < fdma_aoi(cfg, 200, p).mean

    @settings(max_examples=200)
    @given(users, lengths, pers)
    def test_stats_consistency(self, n, length, p):
        cfg = SystemConfig(users=n)
        for s in (tdma_aoi(cfg, length, p), fdma_aoi(cfg, length, p)):
            assert s.variance == pytest.approx(s.second_moment - s.mean**2, rel=1e-12, abs=1e-9 * s.mean**2)
            assert s.variance >= 0
            assert s.bounded_upper >= s.mean


class TestConfigAndNetwork:
    def test_gamma_range(self):
        with pytest.raises(InvalidArgumentError):
            SystemConfig(users=2, gamma=1.0)

    def test_power_list_length(self):
        with pytest.raises(InvalidArgumentError):
            SystemConfig(users=2, power=[1.0])
        cfg = SystemConfig(users=2, power=[1.0, 2.0])
        assert not cfg.symmetric and cfg.user_powers() == (1.0, 2.0)

    def test_symmetric_list(self):
        s = tdma_aoi(SystemConfig(users=2), 100, 0.0)
        assert network_bounded_upper([s, s, s]) == s.bounded_upper

    def test_max(self):
        assert network_bounded_upper([777.35, 900.0]) == 900.0

    def test_empty(self):
        with pytest.raises(InvalidArgumentError):
            network_bounded_upper([])

    def test_chebyshev_arithmetic(self):
        assert chebyshev_bound(10.0, 4.0, 0.75) == pytest.approx(14.0)
