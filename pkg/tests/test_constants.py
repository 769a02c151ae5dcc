import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import lambertw

from subordlab.constants import HALF_LOG3, lambert_w, log_plus, log_r_constant, r_constant, upsilon

W_ARG = math.exp(-1 + 1 / (2 * math.e))


def _mp_r(beta, kappa):
    with mpmath.workdps(40):
        b, k = mpmath.mpf(beta), mpmath.mpf(kappa)
        e = mpmath.e
        return (
            2 * mpmath.exp(1 / (2 * e)) * b
            * mpmath.exp((k + mpmath.log(24) / 2 + 5 / (4 * e)) / b)
            * mpmath.power(2, 1 / (2 * b))
        )


class TestLambertW:
    def test_examples(self):
        assert lambert_w(0.0) == 0.0
        assert lambert_w(math.e) == pytest.approx(1.0, rel=1e-15)
        assert lambert_w(W_ARG) == pytest.approx(0.3208, abs=1e-4)

    def test_against_scipy(self):
        for x in [-1 / math.e + 1e-6, -0.2, 0.01, 1.0, 50.0, 1e6]:
            assert lambert_w(x) == pytest.approx(lambertw(x).real, rel=1e-12)

    def test_branch_point(self):
        assert lambert_w(-1 / math.e) == -1.0
        with pytest.raises(ValueError):
            lambert_w(-0.5)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-1 / math.e + 1e-6, 1e6))
    def test_residual(self, x):
        w = lambert_w(x)
        assert abs(w * math.exp(w) - x) <= 1e-14 * (1 + abs(x))


class TestUpsilon:
    def test_value(self):
        assert -2.7095 < upsilon() < -2.7090
        assert upsilon() < -HALF_LOG3

    def test_closed_chain(self):
        with mpmath.workdps(40):
            e = mpmath.e
            w = mpmath.lambertw(mpmath.exp(-1 + 1 / (2 * e)))
            expected = mpmath.log(w / mpmath.exp(1 / (2 * e))) / 2 - mpmath.log(24) / 2 - 5 / (4 * e)
        assert upsilon() == pytest.approx(float(expected), abs=1e-12)


class TestLogPlus:
    def test_examples(self):
        assert log_plus(1.0) == 1.0
        assert log_plus(math.e**2) == pytest.approx(2.0)
        assert log_plus(0.01) == pytest.approx(4.60517, abs=1e-5)
        assert log_plus(2.0) == 1.0

    def test_invalid(self):
        with pytest.raises(ValueError):
            log_plus(0.0)


class TestR:
    def test_beta_one(self):
        assert r_constant(1.0, 0.0) == pytest.approx(float(_mp_r(1, 0)), rel=1e-13)
        assert r_constant(1.0, 0.0) == pytest.approx(26.38, abs=5e-3)

    def test_identity_at_upsilon(self):
        assert r_constant(0.5, upsilon()) == pytest.approx(2 * lambert_w(W_ARG), abs=1e-10)
        assert r_constant(0.5, upsilon()) == pytest.approx(0.6417, abs=1e-4)

    def test_below_three_halves(self):
        assert r_constant(0.5, upsilon() - 0.01) < 1.5

    def test_beta_range(self):
        with pytest.raises(ValueError):
            r_constant(0.4, 0.0)

    @settings(max_examples=100, deadline=None)
    @given(beta=st.floats(0.5, 1.0), k1=st.floats(-10, 5), k2=st.floats(-10, 5))
    def test_increasing_in_kappa(self, beta, k1, k2):
        lo, hi = sorted((k1, k2))
        assert log_r_constant(beta, lo) <= log_r_constant(beta, hi)

    @settings(max_examples=50, deadline=None)
    @given(beta=st.floats(0.5, 1.0), kappa=st.floats(-10, 3))
    def test_matches_high_precision(self, beta, kappa):
        assert r_constant(beta, kappa) == pytest.approx(float(_mp_r(beta, kappa)), rel=1e-12)
