import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qstoch import (DiscreteDistribution, QIndex, escort_probabilities,
                    maxent_distribution, q_exp, q_log, tsallis_entropy)
from qstoch.errors import DegenerateDistributionError, DomainError


class TestQIndex:
    def test_ell_is_complement(self):
        qi = QIndex(1.25)
        assert qi.ell == 1.0 - 1.25

    def test_classical_detection(self):
        assert QIndex(1.0).is_classical
        assert QIndex(1.0 + 1e-9).is_classical
        assert not QIndex(1.1).is_classical

    def test_rejects_nonfinite(self):
        with pytest.raises(DomainError):
            QIndex(np.inf)


class TestQExp:
    def test_identity_at_zero(self):
        assert q_exp(0.0, 3.7) == 1.0

    def test_direct_substitution(self):
        # [1 + (1-2)(-1)]^{1/(1-2)} = 2^{-1}
        assert q_exp(-1.0, 2.0) == pytest.approx(0.5, abs=1e-15)

    def test_cutoff(self):
        # 1 + 0.5*(-3) < 0
        assert q_exp(-3.0, 0.5) == 0.0

    def test_classical_limit(self):
        assert q_exp(-1.0, 1.0) == pytest.approx(np.exp(-1.0), abs=1e-12)
        assert q_exp(-1.0, 1.0 + 1e-12) == pytest.approx(np.exp(-1.0), abs=1e-9)

    def test_array_input(self):
        x = np.array([-3.0, 0.0, 1.0])
        out = q_exp(x, 0.5)
        assert out.shape == x.shape
        assert out[0] == 0.0 and out[1] == 1.0

    @given(st.floats(-5.0, 5.0), st.floats(0.2, 3.0))
    @settings(max_examples=200, deadline=None)
    def test_inverse_pair(self, x, q):
        y = q_exp(x, q)
        if y > 0.0:
            assert abs(q_log(y, q) - x) < 1e-10


class TestQLog:
    def test_identity_at_one(self):
        for q in (0.3, 1.0, 2.5):
            assert q_log(1.0, q) == 0.0

    def test_direct_substitution(self):
        assert q_log(2.0, 2.0) == pytest.approx(0.5, abs=1e-15)

    def test_natural_log(self):
        assert q_log(2.0, 1.0) == pytest.approx(np.log(2.0), abs=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            q_log(0.0, 1.5)
        with pytest.raises(DomainError):
            q_log(-1.0, 1.5)

    @given(st.floats(0.05, 10.0), st.floats(0.05, 10.0), st.floats(0.2, 3.0))
    @settings(max_examples=200, deadline=None)
    def test_pseudo_additivity(self, a, b, q):
        la, lb = q_log(a, q), q_log(b, q)
        assert q_log(a * b, q) == pytest.approx(la + lb + (1.0 - q) * la * lb, abs=1e-10)


class TestTsallisEntropy:
    def test_certainty_is_zero(self):
        for q in (0.5, 1.0, 2.0):
            assert tsallis_entropy([1.0, 0.0, 0.0], q) == 0.0

    def test_two_state_q2(self):
        assert tsallis_entropy([0.5, 0.5], 2.0) == pytest.approx(0.5, abs=1e-15)

    def test_uniform_classical_limit(self):
        for w in (2, 8, 64):
            p = np.full(w, 1.0 / w)
            assert tsallis_entropy(p, 1.0) == pytest.approx(np.log(w), abs=1e-12)
            assert tsallis_entropy(p, 1.0 + 1e-9) == pytest.approx(np.log(w), abs=1e-7)

    def test_continuity_at_q1(self):
        rng = np.random.default_rng(5)
        for w in (2, 7, 16):
            p = rng.random(w)
            p /= p.sum()
            bg = tsallis_entropy(p, 1.0)
            assert abs(tsallis_entropy(p, 1.0 + 1e-6) - bg) <= 1e-5
            assert abs(tsallis_entropy(p, 1.0 - 1e-6) - bg) <= 1e-5

    def test_nonnegative(self):
        rng = np.random.default_rng(6)
        for q in (0.5, 1.0, 2.0, 3.0):
            for _ in range(50):
                p = rng.random(6)
                p /= p.sum()
                assert tsallis_entropy(p, q) >= 0.0

    def test_uniform_maximizes(self):
        rng = np.random.default_rng(7)
        for q in (0.5, 1.0, 2.0):
            for w in (4, 16):
                s_max = tsallis_entropy(np.full(w, 1.0 / w), q)
                for _ in range(1000):
                    p = rng.random(w)
                    p /= p.sum()
                    assert tsallis_entropy(p, q) <= s_max + 1e-12

    def test_composition_rule(self):
        rng = np.random.default_rng(8)
        pa = rng.random(4)
        pa /= pa.sum()
        pb = rng.random(5)
        pb /= pb.sum()
        for q in (0.5, 1.3, 2.0):
            sa, sb = tsallis_entropy(pa, q), tsallis_entropy(pb, q)
            sab = tsallis_entropy(np.outer(pa, pb).ravel(), q)
            assert sab == pytest.approx(sa + sb + (1.0 - q) * sa * sb, abs=1e-10)


class TestEscort:
    def test_symmetric_fixed_point(self):
        out = escort_probabilities([0.5, 0.5], 7.0)
        np.testing.assert_allclose(out.p, [0.5, 0.5], atol=1e-15)

    def test_direct_substitution(self):
        out = escort_probabilities([0.8, 0.2], 2.0)
        np.testing.assert_allclose(out.p, [16.0 / 17.0, 1.0 / 17.0], atol=1e-12)

    def test_identity_at_q1(self):
        p = np.array([0.1, 0.2, 0.3, 0.4])
        np.testing.assert_allclose(escort_probabilities(p, 1.0).p, p, atol=1e-12)

    def test_normalization_and_order(self):
        rng = np.random.default_rng(9)
        for q in (1.5, 2.0, 6.0):
            p = rng.random(11)
            p /= p.sum()
            esc = escort_probabilities(p, q)
            assert abs(esc.p.sum() - 1.0) <= 1e-12
            assert np.all(np.argsort(esc.p) == np.argsort(p))

    def test_degenerate(self):
        with pytest.raises((DegenerateDistributionError, DomainError)):
            escort_probabilities(np.zeros(3), 2.0)


class TestMaxent:
    def test_zero_multiplier_is_uniform(self):
        for q in (0.5, 1.0, 2.0):
            out = maxent_distribution([0.0, 1.0, 5.0], 0.0, q)
            np.testing.assert_allclose(out.p, np.full(3, 1.0 / 3.0), atol=1e-14)

    def test_classical_gibbs(self):
        E = np.array([0.0, 1.0, 2.5])
        beta = 0.7
        w = np.exp(-beta * E)
        out = maxent_distribution(E, beta, 1.0)
        np.testing.assert_allclose(out.p, w / w.sum(), atol=1e-12)
        out_near = maxent_distribution(E, beta, 1.0 + 1e-9)
        np.testing.assert_allclose(out_near.p, w / w.sum(), atol=1e-7)

    def test_cutoff_state(self):
        out = maxent_distribution([0.0, 10.0], 1.0, 0.5)
        np.testing.assert_allclose(out.p, [1.0, 0.0], atol=1e-15)

    def test_all_cut_off(self):
        with pytest.raises(DegenerateDistributionError):
            maxent_distribution([10.0, 20.0], 1.0, 0.5)


class TestDiscreteDistribution:
    def test_validation(self):
        with pytest.raises(DomainError):
            DiscreteDistribution(np.array([0.5, 0.6]))
        with pytest.raises(DomainError):
            DiscreteDistribution(np.array([-0.1, 1.1]))
        with pytest.raises(DomainError):
            DiscreteDistribution(np.array([]))
