import json
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from subordlab.autocovariance import AutocovarianceModel
from subordlab.bounds import (
    HALF_LOG3,
    MOM_PRIOR_EXPONENT,
    admissibility,
    bound_finite_expansion,
    bound_fixed_cov,
    bound_main,
    bound_mom,
    bound_srd_lrd,
    finite_expansion_delta,
    finite_expansion_psi,
    log_psi,
    log_psi_from_log_d,
    psi,
    sigma_factor,
)
from subordlab.constants import log_plus, r_constant, upsilon
from subordlab.hermite import ThetaParams

THETA_ONE = ThetaParams.of(1.0, 0.0, 1.0)


class TestPsi:
    def test_dimension_one(self):
        assert psi(1.0, 0.0, 1) == pytest.approx(math.exp(r_constant(1.0, 0.0)), rel=1e-13)

    @pytest.mark.parametrize("d", [3, 5, 10, 1000])
    @pytest.mark.parametrize("kappa", [-3.0, -1.0, 0.0])
    def test_half_beta_closed_form(self, d, kappa):
        r = r_constant(0.5, kappa)
        assert log_psi(0.5, kappa, d) == pytest.approx(math.log(math.log(d)) + r * math.log(d), rel=1e-13)

    def test_dimension_two_uses_log_plus(self):
        # log_plus(2) = 1, so the closed form log(d) d^r needs log d >= 1
        r = r_constant(0.5, -3.0)
        assert psi(0.5, -3.0, 2) == pytest.approx(math.exp(r), rel=1e-13)

    def test_sandwich_crossover(self):
        eps = 0.5
        assert log_psi(1.0, 0.0, 10) > eps * math.log(10)
        assert log_psi_from_log_d(1.0, 0.0, 90 * math.log(10)) > eps * 90 * math.log(10)
        for log_d in [2800.0, 5000.0, 1e5]:
            assert log_psi_from_log_d(1.0, 0.0, log_d) <= eps * log_d

    def test_overflow_is_infinite(self):
        assert psi(1.0, 3.0, 10**300) == math.inf
        assert math.isfinite(log_psi(1.0, 3.0, 10**300))


class TestMain:
    def test_dc_example(self):
        rep = bound_main("dC", 10**4, 4, 1.0, 1.0)
        assert rep.value == pytest.approx(4 ** (65 / 24) / 100, rel=1e-13)
        assert rep.value == pytest.approx(0.427149, abs=1e-6)

    def test_dr_example(self):
        rep = bound_main("dR", 10**4, 1, 1.0, 1.0, theta=ThetaParams.of(1.0, 0.0, 1.0))
        expected = math.exp(r_constant(1.0, 0.0)) * 0.01 * math.log(100)
        assert rep.value == pytest.approx(expected, rel=1e-12)
        assert rep.value == pytest.approx(1.32e10, rel=5e-3)

    def test_dw_collapses(self):
        rep = bound_main("dW", 10**4, 1, 1.0, 1.0, sigma_dagger=1.0)
        assert rep.value == pytest.approx(0.01, rel=1e-13)

    def test_errors(self):
        with pytest.raises(ValueError):
            bound_main("dW", 100, 1, 1.0, 1.0)
        with pytest.raises(ValueError):
            bound_main("dC", 100, 1, 1.0, 0.0)
        with pytest.raises(ValueError):
            bound_main("dR", 100, 1, 1.0, 1.0)

    def test_flags_inadmissible(self):
        rep = bound_main("dR", 100, 2, 1.0, 1.0, theta=ThetaParams.of(0.5, -1.0, 1.0))
        assert not rep.admissible
        assert not rep.certified
        assert any("exploration" in n for n in rep.notes)

    def test_scale_and_multiplier(self):
        base = bound_main("dC", 100, 3, 2.0, 0.5)
        assert bound_main("dC", 100, 3, 2.0, 0.5, scale=7.0).value == pytest.approx(7 * base.value)
        theta = ThetaParams.of(1.0, 0.0, 3.0)
        rep = bound_main("dR", 100, 3, 2.0, 0.5, theta=theta, c_multiplier=True)
        plain = bound_main("dR", 100, 3, 2.0, 0.5, theta=theta)
        assert rep.value == pytest.approx(plain.value * 9 * log_plus(3.0), rel=1e-12)

    def test_json(self):
        doc = json.loads(bound_main("dC", 100, 3, 2.0, 0.5).to_json())
        assert {"distance", "formula_id", "value", "log_value", "admissible", "inputs", "scale_C"} <= set(doc)

    def test_huge_value_in_log_space(self):
        rep = bound_main("dR", 10, 10**6, 1.0, 1e-3, theta=ThetaParams.of(1.0, 5.0, 1.0))
        assert rep.value == math.inf
        assert math.isfinite(rep.log_value)
        assert rep.to_dict()["value"] is None

    @settings(max_examples=60, deadline=None)
    @given(
        distance=st.sampled_from(["dR", "dC", "dW"]),
        n=st.integers(1, 10**6),
        d=st.integers(1, 50),
        r1=st.floats(1.0, 50.0),
        r2=st.floats(1.0, 50.0),
        s1=st.floats(1e-3, 1.0),
        s2=st.floats(1e-3, 1.0),
    )
    def test_monotone(self, distance, n, d, r1, r2, s1, s2):
        kw = {"theta": THETA_ONE, "sigma_dagger": 1.5}
        lo_r, hi_r = sorted((r1, r2))
        lo_s, hi_s = sorted((s1, s2))
        a = bound_main(distance, n, d, lo_r, hi_s, **kw)
        b = bound_main(distance, n, d, hi_r, hi_s, **kw)
        c = bound_main(distance, n, d, hi_r, lo_s, **kw)
        assert a.value >= 0
        assert a.log_value <= b.log_value + 1e-12
        assert b.log_value <= c.log_value + 1e-12


class TestFixedCov:
    def test_ar1_terms_and_dc(self):
        model = AutocovarianceModel.ar1(0.5)
        rep = bound_fixed_cov("dC", 2, 1, model, 2, THETA_ONE, np.eye(1))
        assert rep.inputs["tail"] == pytest.approx(1 / 6, rel=1e-9)
        assert rep.inputs["weighted"] == pytest.approx(0.25)
        x = 2 ** -0.5 * 2.0**1.5
        assert rep.value == pytest.approx((x + 1 / 6 + 0.25) * 2, rel=1e-9)

    def test_iid_has_no_tails(self):
        rep = bound_fixed_cov("dC", 50, 3, AutocovarianceModel.iid(), 2, THETA_ONE, np.eye(3))
        assert rep.inputs["tail"] == 0.0 and rep.inputs["weighted"] == 0.0
        assert rep.value == pytest.approx(3 ** (65 / 24) * 50**-0.5 * 2, rel=1e-12)

    def test_dr_formula(self):
        model = AutocovarianceModel.ar1(0.5)
        sigma = np.array([[2.0, 0.5, 0.0], [0.5, 1.0, 0.1], [0.0, 0.1, 1.5]])
        rep = bound_fixed_cov("dR", 100, 3, model, 2, THETA_ONE, sigma)
        s = float(np.linalg.eigvalsh(sigma)[0])
        x = 100**-0.5 * rep.inputs["rho_norm_1"] ** 1.5
        lp = log_plus(3)
        delta = x * math.exp(r_constant(1.0, 0.0) * math.sqrt(lp)) / lp + rep.inputs["tail"] + rep.inputs["weighted"]
        expected = lp * delta * log_plus(delta) * log_plus(math.sqrt(2.0) * s / 1.0) / s
        assert rep.value == pytest.approx(expected, rel=1e-10)

    def test_dw_formula(self):
        sigma = np.diag([1.0, 4.0])
        rep = bound_fixed_cov("dW", 16, 2, AutocovarianceModel.iid(), 2, THETA_ONE, sigma)
        assert rep.value == pytest.approx(2**1.5 * 0.25 * 2.0 / 1.0, rel=1e-12)

    def test_shape_check(self):
        with pytest.raises(ValueError):
            bound_fixed_cov("dC", 2, 2, AutocovarianceModel.iid(), 2, THETA_ONE, np.eye(3))


class TestSrdLrd:
    def test_srd_rate(self):
        rep = bound_srd_lrd("SRD", "dR", 55, 1, 1.0, THETA_ONE, 1.0)
        assert rep.inputs["rate_factor"] == pytest.approx(log_plus(55) / math.sqrt(55))
        assert rep.inputs["rate_factor"] == pytest.approx(0.5404, abs=1e-4)

    def test_lrd_exponent(self):
        rep = bound_srd_lrd("LRD", "dC", 1000, 2, 0.8, THETA_ONE, 1.0)
        assert rep.inputs["rate_exponent"] == pytest.approx(-0.2)
        assert rep.inputs["rate_factor"] == pytest.approx(1000**-0.2)
        near = bound_srd_lrd("LRD", "dC", 1000, 2, 2 / 3 + 1e-9, THETA_ONE, 1.0)
        assert near.inputs["rate_exponent"] == pytest.approx(0.0, abs=1e-8)

    def test_ranges(self):
        with pytest.raises(ValueError):
            bound_srd_lrd("SRD", "dC", 10, 1, 0.9, THETA_ONE, 1.0)
        with pytest.raises(ValueError):
            bound_srd_lrd("LRD", "dC", 10, 1, 1.0, THETA_ONE, 1.0)

    def test_sigma_factor_conventions(self):
        assert sigma_factor(1, 1.0) == 1.0
        assert sigma_factor(2, 2.0, 4.0, 4.0) == pytest.approx(log_plus(2.0))
        assert sigma_factor(3, 0.25, 1.0, 4.0) == pytest.approx(log_plus(0.5) / 0.25)


class TestMom:
    def test_example(self):
        rep = bound_mom(10**4, 2)
        assert rep.value == pytest.approx(2 ** (125 / 24) * 9 * 0.01, rel=1e-13)
        assert rep.value == pytest.approx(3.32742, abs=1e-5)
        assert rep.inputs["prior_exponent_in_d"] == pytest.approx(1.03972, abs=1e-5)
        assert MOM_PRIOR_EXPONENT == pytest.approx(1.5 * math.log(2))

    def test_monotone_in_d(self):
        values = [bound_mom(1000, d).value for d in range(1, 20)]
        assert np.all(np.diff(values) > 0)

    def test_iid_shape(self):
        for n in [10, 1000]:
            for d in [1, 3]:
                assert bound_mom(n, d).value == pytest.approx(d ** (125 / 24) * 3.0**d / math.sqrt(n), rel=1e-12)


class TestFiniteExpansion:
    def test_power_factor_two(self):
        parts = finite_expansion_delta(1, 10**4, 2, THETA_ONE)
        assert parts["power_factor"] == pytest.approx(2 * math.e * math.log(2), rel=1e-14)
        assert parts["power_factor"] == pytest.approx(3.768, abs=1e-3)

    def test_boundary_psi(self):
        theta = ThetaParams.of(0.5, -HALF_LOG3, 1.0)
        expected = (math.sqrt(2) + math.sqrt(3)) * (1 / math.sqrt(2) + 1 / math.sqrt(3))
        assert finite_expansion_psi(3, theta) == pytest.approx(expected, rel=1e-14)
        assert finite_expansion_psi(3, theta) == pytest.approx(4.041, abs=1e-3)

    def test_psi_branches(self):
        assert finite_expansion_psi(5, ThetaParams.of(1.0, 2.0, 1.0)) == 1.0
        assert finite_expansion_psi(5, ThetaParams.of(0.5, -1.0, 1.0)) == 1.0
        k = -0.2
        assert finite_expansion_psi(4, ThetaParams.of(0.5, k, 1.0)) == pytest.approx(
            4**2.5 * math.exp((2 * k + math.log(3)) * 4)
        )

    def test_growth_factor(self):
        k = -0.2
        parts = finite_expansion_delta(3, 100, 4, ThetaParams.of(0.5, k, 1.0))
        assert parts["log_growth_factor"] == pytest.approx(3.5 * math.log(4) + 4 * (2 * k + math.log(3)))

    def test_errors(self):
        with pytest.raises(ValueError):
            finite_expansion_delta(1, 10, 1, THETA_ONE)
        with pytest.raises(ValueError):
            finite_expansion_psi(3, ThetaParams.of(0.5, 0.1, 1.0))
        with pytest.raises(ValueError):
            bound_finite_expansion("dW", 10, 1, 2, THETA_ONE, 1.0, 1.0)


class TestAdmissibility:
    def test_examples(self):
        assert admissibility(ThetaParams.of(0.5, -3.0, 1.0), "dR").admissible
        res = admissibility(THETA_ONE, "dC_poly", lam=0.2)
        assert not res.admissible
        assert res.lambda_threshold == pytest.approx(12 / 65)
        assert res.lambda_threshold == pytest.approx(0.1846, abs=1e-4)
        for regime in ["dR", "dC", "dW"]:
            assert admissibility(ThetaParams.of(1.0, 4.0, 1.0), regime).admissible

    def test_thresholds(self):
        assert admissibility(ThetaParams.of(0.5, -2.0, 1.0), "dR").kappa_threshold == pytest.approx(upsilon())
        assert admissibility(ThetaParams.of(0.5, -0.6, 1.0), "dC").admissible
        assert not admissibility(ThetaParams.of(0.5, -0.5, 1.0), "dC").admissible

    def test_polynomial_dr(self):
        lam = 0.1
        limit = -math.log(4 * math.exp(1 / (2 * math.e)) * lam) / 2 - math.log(24) / 2 - 5 / (4 * math.e)
        res = admissibility(ThetaParams.of(0.5, -4.0, 1.0), "dR_poly", lam=lam)
        assert res.kappa_threshold == pytest.approx(min(limit, upsilon()))
        assert res.zeta_interval == (0.0, 0.5)

    def test_lrd(self):
        res = admissibility(THETA_ONE, "dC_poly", lam=0.05, dependence="LRD", mu=0.8)
        assert res.lambda_threshold == pytest.approx(0.4 * 12 / 65)
        assert res.zeta_interval == pytest.approx((0.0, 0.2))
        assert res.admissible
        with pytest.raises(ValueError):
            admissibility(THETA_ONE, "dC_poly", lam=0.05, dependence="LRD", mu=0.5)
