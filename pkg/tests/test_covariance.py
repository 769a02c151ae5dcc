import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose
from scipy import linalg

from subordlab.autocovariance import AutocovarianceModel, DivergentSeriesError, rho_lags
from subordlab.covariance import (
    TruncationError,
    correlation,
    cov_discrepancy,
    covariance_report,
    exact_cov,
    fgn_analytic_bound,
    fgn_l2_bound,
    gershgorin_lower,
    jacobi_eigenvalues,
    l2_criterion,
    limiting_cov,
    prop27_fgn_check,
    zeta_tau,
)
from subordlab.hermite import ThetaParams
from subordlab.statistics import build, evaluate_batch


def _weighted_lag_sum(model, n, kernel):
    """``sum_{|v|<n} (1 - |v|/n) kernel(rho(v))``."""
    v = np.arange(-(n - 1), n)
    w = 1.0 - np.abs(v) / n
    return float(np.sum(w * kernel(rho_lags(model, v))))


def _closed_form_cov(stat, model, n):
    """Entrywise covariance from the bivariate Gaussian moment generating function."""
    lam = stat.lambdas
    d = len(lam)
    out = np.empty((d, d))
    for i in range(d):
        for j in range(d):
            a, b = lam[i], lam[j]
            if stat.kind == "ECF_cos":
                kern = lambda r: math.exp(-(a * a + b * b) / 2) * (np.cosh(a * b * r) - 1)
            elif stat.kind == "ECF_sin":
                kern = lambda r: math.exp(-(a * a + b * b) / 2) * (np.sinh(a * b * r) - a * b * r)
            else:
                kern = lambda r: math.exp((a * a + b * b) / 2) * (np.expm1(a * b * r) - a * b * r)
            out[i, j] = _weighted_lag_sum(model, n, kern)
    return out


class TestJacobi:
    @pytest.mark.parametrize("r", [0.0, 0.3, -0.3, 0.9, -0.9])
    def test_two_by_two(self, r):
        ev = np.sort(jacobi_eigenvalues(np.array([[1.0, r], [r, 1.0]])))
        assert_allclose(ev, [1 - abs(r), 1 + abs(r)], atol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, (6, 6), elements=st.floats(-3, 3)))
    def test_matches_lapack(self, a):
        sym = (a + a.T) / 2
        assert_allclose(np.sort(jacobi_eigenvalues(sym)), linalg.eigvalsh(sym), atol=1e-10)

    def test_diagonal_input(self):
        assert_allclose(np.sort(jacobi_eigenvalues(np.diag([3.0, -1.0, 2.0]))), [-1.0, 2.0, 3.0])


class TestReport:
    def test_gershgorin_and_correlation(self):
        sigma = np.array([[4.0, 1.0, 0.2], [1.0, 2.0, 0.0], [0.2, 0.0, 1.0]])
        rep = covariance_report(sigma, n=10)
        assert_allclose(np.diag(rep.lam), 1.0)
        assert rep.sigma_star_sq >= rep.gershgorin_lower
        assert rep.sigma_star_sq <= 1.0
        assert rep.gershgorin_lower == pytest.approx(1 - gershgorin_norm(rep.lam))
        assert rep.cov_sigma_dagger_sq == pytest.approx(linalg.eigvalsh(sigma).max())

    def test_json_schema(self):
        rep = covariance_report(np.eye(2), n=5, q_used=3, tail=0.0)
        keys = set(rep.to_dict())
        assert {"d", "n", "sigma", "lambda", "sigma_star_sq", "sigma_dagger_sq", "gershgorin_lower", "truncation"} <= keys
        assert set(rep.to_dict()["truncation"]) == {"Q_used", "tail"}

    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, (4, 3), elements=st.floats(-2, 2)))
    def test_gershgorin_lower_bound_property(self, a):
        sigma = a @ a.T + 0.1 * np.eye(4)
        rep = covariance_report(sigma)
        assert rep.sigma_star_sq >= rep.gershgorin_lower - 1e-12


def gershgorin_norm(lam):
    off = np.abs(lam - np.eye(lam.shape[0]))
    return off.sum(axis=1).max()


class TestExactCov:
    @pytest.mark.parametrize("n", [1, 7, 100])
    def test_mom_iid_identity(self, n):
        rep = exact_cov(build("MoM", d=3), AutocovarianceModel.iid(), n)
        assert_allclose(rep.sigma, np.eye(3), atol=1e-14)

    @pytest.mark.parametrize("lam", [1.0, 2.0])
    @pytest.mark.parametrize("n", [16, 256])
    def test_cosh_representation(self, lam, n):
        model = AutocovarianceModel.ar1(0.5)
        stat = build("ECF_cos", lambdas=[lam])
        expected = math.exp(-lam * lam) * _weighted_lag_sum(model, n, lambda r: np.cosh(lam * lam * r) - 1)
        assert exact_cov(stat, model, n).sigma[0, 0] == pytest.approx(expected, rel=1e-10)

    @pytest.mark.parametrize(
        "stat",
        [build("ECF_cos", d=3, tau=1.0), build("ECF_sin", lambdas=[0.5, 1.5]), build("EMGF", lambdas=[0.5, 1.0])],
        ids=lambda s: s.kind,
    )
    @pytest.mark.parametrize("model", [AutocovarianceModel.ar1(0.5), AutocovarianceModel.fgn(0.3)],
                             ids=lambda m: m.describe())
    def test_matches_generating_function(self, stat, model):
        rep = exact_cov(stat, model, 64)
        assert_allclose(rep.sigma, _closed_form_cov(stat, model, 64), rtol=1e-10, atol=1e-14)

    def test_breuer_major_block_direct(self):
        model = AutocovarianceModel.ar1(0.5)
        stat = build("BreuerMajor", phi={2: 1 / math.sqrt(2), 3: 0.1}, partition=[0, 0.3, 1])
        n = 20
        lo = [0, 6]
        hi = [6, 20]
        r = rho_lags(model, np.arange(n))
        g = 0.5 * 2 * r**2 + 0.01 * 6 * r**3
        expected = np.empty((2, 2))
        for i in range(2):
            for j in range(2):
                total = 0.0
                for k in range(lo[i], hi[i]):
                    for l in range(lo[j], hi[j]):
                        total += g[abs(k - l)]
                expected[i, j] = total / n
        assert_allclose(exact_cov(stat, model, n).sigma, expected, rtol=1e-12)

    def test_breuer_major_decorrelates(self):
        stat = build("BreuerMajor", phi={2: 1.0}, partition=[0, 0.5, 1])
        rep = exact_cov(stat, AutocovarianceModel.ar1(0.5), 2**14)
        assert abs(rep.lam[0, 1]) < 0.02

    def test_mc_agreement(self):
        model = AutocovarianceModel.ar1(0.5)
        stat = build("ECF_cos", d=2, tau=1.0)
        n, reps = 64, 40000
        batch = evaluate_batch(stat, model, n, reps, 17)
        c = batch - batch.mean(axis=0)
        exact = exact_cov(stat, model, n).sigma
        for i in range(2):
            for j in range(2):
                prod = c[:, i] * c[:, j]
                se = prod.std(ddof=1) / math.sqrt(reps)
                assert abs(prod.mean() - exact[i, j]) < 5 * se

    def test_truncation_reported(self):
        rep = exact_cov(build("ECF_cos", lambdas=[1.0]), AutocovarianceModel.fgn(0.3), 32, tol=1e-12)
        assert rep.tail <= 1e-12
        assert rep.q_used >= 8

    def test_divergent_majorant(self):
        with pytest.raises(TruncationError):
            exact_cov(build("ECF_cos", lambdas=[1.0]), AutocovarianceModel.iid(), 4, theta=ThetaParams.of(0.5, 0.0, 1.0))

    def test_psd_invariant(self):
        for model in [AutocovarianceModel.fgn(0.3), AutocovarianceModel.power_law(1.0, 0.8)]:
            rep = exact_cov(build("ECF_cos", d=4, tau=1.0), model, 128)
            ev = linalg.eigvalsh(rep.sigma)
            assert ev.min() >= -1e-10 * np.trace(rep.sigma)
            assert rep.sigma_star_sq >= rep.gershgorin_lower


class TestLimitingCov:
    def test_iid_is_coefficient_sum(self):
        stat = build("ECF_cos", lambdas=[1.0, 2.0])
        expected = _closed_form_cov(stat, AutocovarianceModel.iid(), 1)
        assert_allclose(limiting_cov(stat, AutocovarianceModel.iid()), expected, rtol=1e-12)

    def test_mom_iid_identity(self):
        assert_allclose(limiting_cov(build("MoM", d=5), AutocovarianceModel.iid()), np.eye(5), atol=1e-14)

    def test_breuer_major_ar1(self):
        stat = build("BreuerMajor", phi={2: 1.0}, partition=[0, 1])
        assert limiting_cov(stat, AutocovarianceModel.ar1(0.5), m=2)[0, 0] == pytest.approx(10 / 3, rel=1e-12)
        stat2 = build("BreuerMajor", phi={2: 1.0}, partition=[0, 0.5, 1])
        assert_allclose(limiting_cov(stat2, AutocovarianceModel.ar1(0.5)), np.diag([5 / 3, 5 / 3]), rtol=1e-12)

    def test_exact_converges_to_limit(self):
        stat = build("ECF_cos", d=2, tau=1.0)
        model = AutocovarianceModel.ar1(0.5)
        limit = limiting_cov(stat, model)
        gaps = [np.abs(exact_cov(stat, model, n).sigma - limit).max() for n in (64, 256, 1024)]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 5e-3

    def test_divergent(self):
        with pytest.raises(DivergentSeriesError):
            limiting_cov(build("MoM", d=1), AutocovarianceModel.power_law(1.0, 0.4))


class TestDiscrepancy:
    def test_examples(self):
        a = np.eye(2)
        b = np.array([[1.0, 0.1], [0.1, 1.0]])
        assert cov_discrepancy(a, a) == 0.0
        assert cov_discrepancy(a, b) == pytest.approx(0.1)
        assert cov_discrepancy(a, b, "hilbert_schmidt") == pytest.approx(math.sqrt(0.02))
        assert cov_discrepancy(a, b, "hilbert_schmidt") == pytest.approx(0.141421, abs=1e-6)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            cov_discrepancy(np.eye(2), np.eye(3))


class TestZeta:
    def test_value_at_one(self):
        expected = 2 * math.exp(0.5) * (1 - math.exp(-1)) * (1 - math.exp(-4)) / (3 + 1.5 * math.exp(-1.5))
        assert zeta_tau(1.0) == pytest.approx(expected, rel=1e-14)
        assert zeta_tau(1.0) == pytest.approx(0.6136, abs=1e-4)

    def test_increasing(self):
        assert zeta_tau(2.0) > zeta_tau(1.0)
        taus = np.linspace(1, 3, 21)
        assert np.all(np.diff([zeta_tau(t) for t in taus]) > 0)

    def test_invalid(self):
        with pytest.raises(ValueError):
            zeta_tau(0.9)

    def test_ar1_criterion_fails(self):
        crit = l2_criterion(AutocovarianceModel.ar1(0.5), 1.0)
        assert crit.rho_l2_sq == pytest.approx(5 / 3)
        assert not crit.holds
        assert "increase tau" in crit.message

    def test_iid_criterion_holds(self):
        crit = l2_criterion(AutocovarianceModel.ar1(0.1), 3.0)
        assert crit.holds and crit.lower_bound > 0

    def test_fgn_threshold(self):
        assert fgn_analytic_bound(1.302) < 1.0
        assert fgn_analytic_bound(1.25) > 1.0
        for h in [0.05, 0.2, 0.3, 0.45]:
            exact = 1 + 2 * np.sum(rho_lags(AutocovarianceModel.fgn(h), np.arange(1, 10**6)) ** 2)
            assert exact <= fgn_l2_bound(h) <= 1.5


class TestFgnCheck:
    def test_grid_positive(self):
        check = prop27_fgn_check(0.3, 1.302, [64, 256, 1024], [2, 4, 8])
        assert check.min_margin > 0
        assert check.exact_within_analytic
        assert check.to_dict()["min_sigma_star_lower"] == check.min_margin

    def test_larger_tau_smaller_norm(self):
        a = prop27_fgn_check(0.3, 1.302, [64, 256], [2, 4]).rows
        b = prop27_fgn_check(0.3, 3.0, [64, 256], [2, 4]).rows
        for x, y in zip(a, b):
            assert y["lambda_offdiag_inf"] < x["lambda_offdiag_inf"]

    def test_one_dimension(self):
        rows = prop27_fgn_check(0.3, 1.302, [64], [1]).rows
        assert rows[0]["lambda_offdiag_inf"] == 0.0

    def test_invalid_hurst(self):
        with pytest.raises(ValueError):
            prop27_fgn_check(0.6, 1.302, [8], [2])
