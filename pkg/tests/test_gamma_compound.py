import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import kstest

from qstoch import (GammaParams, RateMoments, compound_autocorr_quadrature,
                    delta_limit_error, gamma_pdf, marginal_autocorr, moments_from_params,
                    params_from_moments, q_exp, q_from_shape, sample_rate)
from qstoch.errors import DomainError


class TestGammaParams:
    def test_moments(self):
        g = GammaParams(0.25, 4.0)
        assert g.mean == 1.0
        assert g.variance == 0.25

    def test_validation(self):
        with pytest.raises(DomainError):
            GammaParams(-1.0, 2.0)
        with pytest.raises(DomainError):
            GammaParams(1.0, 0.0)


class TestMomentMaps:
    @pytest.mark.parametrize("lam0,s2,a,c", [
        (1.0, 0.25, 0.25, 4.0),
        (2.0, 2.0, 1.0, 2.0),
        (1.0, 1.0, 1.0, 1.0),
    ])
    def test_direct_substitution(self, lam0, s2, a, c):
        g = params_from_moments(RateMoments(lam0, s2))
        assert g.a == pytest.approx(a, rel=1e-15)
        assert g.c == pytest.approx(c, rel=1e-15)

    def test_round_trip(self):
        for lam0, s2 in [(0.3, 0.05), (1.0, 0.25), (5.0, 9.0)]:
            m = moments_from_params(params_from_moments(RateMoments(lam0, s2)))
            assert m.lambda0 == pytest.approx(lam0, abs=1e-12)
            assert m.sigma_lambda2 == pytest.approx(s2, abs=1e-12)


class TestQFromShape:
    def test_values(self):
        assert q_from_shape(4.0).q == pytest.approx(1.25, abs=1e-15)
        assert q_from_shape(1.0).q == pytest.approx(2.0, abs=1e-15)

    def test_zero_dispersion_limit(self):
        assert q_from_shape(1e12).q == pytest.approx(1.0, abs=1e-11)

    def test_always_above_one(self):
        for c in (0.1, 1.0, 7.0, 1e6):
            assert q_from_shape(c).q > 1.0


class TestGammaPdf:
    def test_exponential_special_case(self):
        g = GammaParams(1.0, 1.0)
        assert gamma_pdf(1.0, g) == pytest.approx(np.exp(-1.0), abs=1e-14)

    def test_normalization(self):
        for a, c in [(0.1, 0.5), (1.0, 4.0), (10.0, 100.0)]:
            g = GammaParams(a, c)
            hi = a * (c + 40.0 * np.sqrt(c) + 60.0)
            val, _ = quad(lambda lam: gamma_pdf(lam, g), 0.0, hi, limit=300,
                          epsabs=1e-12, epsrel=1e-12)
            assert val == pytest.approx(1.0, abs=1e-10)

    def test_mean(self):
        g = GammaParams(0.25, 4.0)
        hi = 30.0
        val, _ = quad(lambda lam: lam * gamma_pdf(lam, g), 0.0, hi, epsabs=1e-12)
        assert val == pytest.approx(1.0, abs=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            gamma_pdf(-0.5, GammaParams(1.0, 1.0))


class TestSampleRate:
    def test_mean_within_standard_error(self):
        g = GammaParams(0.25, 4.0)
        rng = np.random.default_rng(123)
        n = 10**6
        draws = sample_rate(rng, g, size=n)
        se = g.a * np.sqrt(g.c / n)
        assert abs(draws.mean() - g.mean) <= 3.0 * se

    def test_exponential_cdf(self):
        g = GammaParams(0.7, 1.0)
        rng = np.random.default_rng(321)
        draws = sample_rate(rng, g, size=10**6)
        stat = kstest(draws, "expon", args=(0.0, g.a)).statistic
        assert stat < 0.002

    def test_support(self):
        rng = np.random.default_rng(11)
        draws = sample_rate(rng, GammaParams(0.5, 0.4), size=10000)
        assert np.all(draws >= 0.0)


class TestMarginalAutocorr:
    def test_zero_lag(self):
        assert marginal_autocorr(0.0, 1.7, GammaParams(0.5, 2.0)) == 1.7

    def test_direct_substitution(self):
        assert marginal_autocorr(2.0, 1.0, GammaParams(0.5, 2.0)) == pytest.approx(0.25, abs=1e-15)

    def test_quadrature_oracle(self):
        g = GammaParams(0.25, 4.0)
        closed = marginal_autocorr(1.0, 1.0, g)
        numeric = compound_autocorr_quadrature(1.0, 1.0, g)
        assert closed == pytest.approx(numeric, abs=1e-8)

    def test_qexp_identity(self):
        # the compounded closed form is a q-exponential with q = 1 + 1/c
        tau = np.linspace(0.0, 50.0, 201)
        for a, c in [(0.25, 4.0), (1.0, 1.0), (0.05, 30.0)]:
            g = GammaParams(a, c)
            qi = q_from_shape(c)
            lhs = marginal_autocorr(tau, 2.3, g)
            rhs = 2.3 * q_exp(-g.mean * tau, qi)
            np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_dispersion_sets_q(self):
        for lam0, s2 in [(1.0, 0.25), (2.0, 2.0)]:
            g = params_from_moments(RateMoments(lam0, s2))
            qi = q_from_shape(g.c)
            assert qi.q - 1.0 == pytest.approx(s2 / lam0**2, abs=1e-12)


class TestDeltaLimit:
    def test_constant_probe(self):
        for c in (3.0, 50.0, 1e4):
            err = delta_limit_error(c, lambda lam: np.ones_like(np.asarray(lam, float)))
            assert err <= 1e-10

    def test_second_moment_probe_exact(self):
        # E[lam^2] - lam0^2 = a^2 c = lam0^2/c exactly
        for c in (1e2, 1e3, 1e4):
            err = delta_limit_error(c, lambda lam: lam * lam)
            assert err == pytest.approx(1.0 / c, rel=1e-12)

    def test_smooth_probe_rate(self):
        e2 = delta_limit_error(1e2, lambda lam: np.exp(-lam))
        e4 = delta_limit_error(1e4, lambda lam: np.exp(-lam))
        assert e4 / e2 == pytest.approx(1e-2, rel=0.05)

    def test_monotone_in_c(self):
        for probe in (lambda lam: np.exp(-lam), lambda lam: np.cos(lam)):
            errs = [delta_limit_error(c, probe) for c in (10.0, 1e2, 1e3, 1e4)]
            assert all(errs[i] > errs[i + 1] for i in range(3))
