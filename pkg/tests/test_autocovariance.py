import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from subordlab.autocovariance import (
    AutocovarianceModel,
    DivergentSeriesError,
    classify_dependence,
    full_sum,
    rho,
    rho_lags,
    tail_sum,
    truncated_norm,
    weighted_partial_sum,
)
from subordlab.covariance import fgn_rho_decay_bound

MODELS = [
    AutocovarianceModel.iid(),
    AutocovarianceModel.ar1(0.5),
    AutocovarianceModel.ar1(-0.7),
    AutocovarianceModel.fgn(0.3),
    AutocovarianceModel.fgn(0.7),
    AutocovarianceModel.power_law(1.0, 0.8),
    AutocovarianceModel.table([1.0, 0.4, 0.1]),
]


class TestRho:
    @pytest.mark.parametrize("model", MODELS, ids=lambda m: m.describe())
    def test_standing_assumptions(self, model):
        k = np.arange(-50, 51)
        r = rho_lags(model, k)
        assert rho(model, 0) == 1.0
        assert_allclose(r, r[::-1])
        assert np.all(np.abs(r) <= 1.0)

    def test_white_noise_fgn(self):
        assert rho(AutocovarianceModel.fgn(0.5), 1) == pytest.approx(0.0, abs=1e-15)
        assert np.all(rho_lags(AutocovarianceModel.fgn(0.5), np.arange(1, 40)) == 0)

    def test_fgn_lag_one(self):
        # 0.5 * (2^{2H} - 2) at H = 0.3
        assert rho(AutocovarianceModel.fgn(0.3), 1) == pytest.approx(0.5 * (2**0.6 - 2), rel=1e-14)
        assert rho(AutocovarianceModel.fgn(0.3), 1) == pytest.approx(-0.242142, abs=1e-6)

    def test_ar1_closed_form(self):
        assert rho(AutocovarianceModel.ar1(0.5), 3) == pytest.approx(0.125, rel=1e-15)

    def test_fgn_large_lags_match_direct_formula(self):
        h = 0.3
        k = np.array([10, 1000, 10**6])
        with mpmath.workdps(40):
            direct = [
                float(0.5 * ((mpmath.mpf(int(j)) + 1) ** (2 * h) - 2 * mpmath.mpf(int(j)) ** (2 * h) + (mpmath.mpf(int(j)) - 1) ** (2 * h)))
                for j in k
            ]
        assert_allclose(rho_lags(AutocovarianceModel.fgn(h), k), direct, rtol=1e-9)

    def test_table_zero_outside_range(self):
        model = AutocovarianceModel.table([1.0, 0.4, 0.1])
        assert rho(model, 3) == 0.0
        assert rho(model, -2) == pytest.approx(0.1)

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            AutocovarianceModel.ar1(1.0)
        with pytest.raises(ValueError):
            AutocovarianceModel.fgn(1.2)
        with pytest.raises(ValueError):
            AutocovarianceModel.power_law(1.5, 0.8)
        with pytest.raises(ValueError):
            AutocovarianceModel.table([0.9, 0.1])

    def test_config_round_trip(self):
        for model in MODELS:
            assert AutocovarianceModel.from_config(model.to_config()) == model


class TestNorms:
    def test_truncated_norm_examples(self):
        assert truncated_norm(AutocovarianceModel.iid(), 100, 1) == pytest.approx(1.0)
        assert truncated_norm(AutocovarianceModel.ar1(0.5), 3, 1) == pytest.approx(2.5)
        assert truncated_norm(AutocovarianceModel.fgn(0.5), 50, 2) == pytest.approx(1.0)

    @pytest.mark.parametrize("model", MODELS, ids=lambda m: m.describe())
    def test_truncated_norm_nondecreasing(self, model):
        values = [truncated_norm(model, n, 1) for n in range(1, 40)]
        assert np.all(np.diff(values) >= -1e-15)

    def test_truncated_norm_brute_force(self):
        model = AutocovarianceModel.fgn(0.3)
        k = np.arange(-63, 64)
        brute = np.sum(np.abs(rho_lags(model, k)) ** 1.5) ** (1 / 1.5)
        assert truncated_norm(model, 64, 1.5) == pytest.approx(brute, rel=1e-12)

    def test_tail_sum_examples(self):
        assert tail_sum(AutocovarianceModel.iid(), 1, 2) == 0.0
        assert tail_sum(AutocovarianceModel.ar1(0.5), 2, 2) == pytest.approx(2 * 0.25**2 / 0.75, rel=1e-10)
        assert tail_sum(AutocovarianceModel.ar1(0.5), 2, 2) == pytest.approx(0.166667, abs=1e-6)

    def test_tail_sum_fgn_brute_force(self):
        model = AutocovarianceModel.fgn(0.3)
        k = np.arange(10, 10**6 + 1)
        r2 = rho_lags(model, k) ** 2
        # remainder beyond 1e6 is below 1e-8, bracket it by the integral of the decay bound squared
        brute = 2 * np.sum(r2)
        assert tail_sum(model, 10, 2, tol=1e-10) == pytest.approx(brute, abs=1e-7)

    def test_tail_sum_power_law_brute_force(self):
        model = AutocovarianceModel.power_law(1.0, 1.5)
        k = np.arange(5, 2 * 10**6 + 1)
        head = 2 * np.sum(rho_lags(model, k) ** 2)
        # sum_{k > K} (1+k)^{-3} is within [ (K+2)^{-2}/2, (K+1)^{-2}/2 ]
        rest = 2 * 0.5 * (2 * 10**6 + 1.5) ** -2
        assert tail_sum(model, 5, 2, tol=1e-12) == pytest.approx(head + rest, rel=1e-9)

    def test_tail_sum_divergent(self):
        with pytest.raises(DivergentSeriesError):
            tail_sum(AutocovarianceModel.power_law(1.0, 0.4), 10, 2)

    @pytest.mark.parametrize(
        "model", [AutocovarianceModel.ar1(0.5), AutocovarianceModel.ar1(-0.3), AutocovarianceModel.fgn(0.3)],
        ids=lambda m: m.describe(),
    )
    def test_tail_plus_head_equals_full_sum(self, model):
        n, m = 7, 2
        head = np.sum(rho_lags(model, np.arange(-(n - 1), n)) ** m)
        assert head + tail_sum(model, n, m) == pytest.approx(full_sum(model, m), abs=2e-10)

    def test_weighted_partial_sum_examples(self):
        assert weighted_partial_sum(AutocovarianceModel.ar1(0.5), 1, 2) == 0.0
        assert weighted_partial_sum(AutocovarianceModel.ar1(0.5), 3, 2) == pytest.approx(
            2 * ((1 / 3) * 0.5**2 + (2 / 3) * 0.25**2)
        )
        assert weighted_partial_sum(AutocovarianceModel.ar1(0.5), 3, 2) == pytest.approx(0.25)
        assert weighted_partial_sum(AutocovarianceModel.iid(), 17, 3) == 0.0


class TestFgnStructure:
    @pytest.mark.parametrize("h", [0.1, 0.25, 0.3, 0.45])
    def test_decay_bound(self, h):
        v = np.arange(2, 10**4 + 1)
        r = np.abs(rho_lags(AutocovarianceModel.fgn(h), v))
        assert np.all(r <= fgn_rho_decay_bound(h, v) * (1 + 1e-12))

    @pytest.mark.parametrize("h", [0.2, 0.3, 0.4])
    def test_partial_sums_telescope(self, h):
        model = AutocovarianceModel.fgn(h)
        for n in [10, 1000, 10**5]:
            partial = np.sum(rho_lags(model, np.arange(-n, n + 1)))
            assert partial == pytest.approx((n + 1) ** (2 * h) - n ** (2 * h), abs=1e-8)
        assert abs(partial) < 2 * h * n ** (2 * h - 1)


class TestClassify:
    def test_examples(self):
        assert classify_dependence(AutocovarianceModel.ar1(0.9)).regime == "SRD"
        lrd = classify_dependence(AutocovarianceModel.power_law(1.0, 0.8))
        assert lrd.regime == "LRD" and lrd.mu == pytest.approx(0.8)
        srd = classify_dependence(AutocovarianceModel.power_law(1.0, 1.5))
        assert srd.regime == "SRD" and srd.mu == pytest.approx(1.5)

    def test_fgn_routes(self):
        assert classify_dependence(AutocovarianceModel.fgn(0.5)).regime == "SRD"
        assert classify_dependence(AutocovarianceModel.fgn(0.3)).regime == "SRD"
        assert classify_dependence(AutocovarianceModel.fgn(0.6)).regime == "LRD"
        assert classify_dependence(AutocovarianceModel.fgn(0.85)).regime == "Unknown"


class TestProperties:
    @settings(max_examples=40, deadline=None)
    @given(phi=st.floats(-0.95, 0.95), n=st.integers(1, 200))
    def test_ar1_norm_closed_form(self, phi, n):
        a = abs(phi)
        expected = 1 + 2 * sum(a**k for k in range(1, n))
        assert truncated_norm(AutocovarianceModel.ar1(phi), n, 1) == pytest.approx(expected, rel=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(phi=st.floats(-0.9, 0.9), n=st.integers(1, 50), m=st.integers(2, 5))
    def test_ar1_tail_closed_form(self, phi, n, m):
        a = abs(phi) ** m
        expected = 2 * a**n / (1 - a) if a > 0 else 0.0
        assert tail_sum(AutocovarianceModel.ar1(phi), n, m) == pytest.approx(expected, rel=1e-9, abs=1e-300)

    @settings(max_examples=30, deadline=None)
    @given(h=st.floats(0.05, 0.95), k=st.integers(1, 10**5))
    def test_fgn_bounded(self, h, k):
        assert abs(rho(AutocovarianceModel.fgn(h), k)) <= 1.0
        assert math.isfinite(rho(AutocovarianceModel.fgn(h), k))
