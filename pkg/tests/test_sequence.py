import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import gammaln

from weightseq import catalog
from weightseq.sequence import (WeightSequence, check_equivalence, combine, factorial_lift, factorial_unlift,
                                gamma_scale, gamma_sequence, gamma_unscale, log_identity_check, make_sequence,
                                root_bound_violation)
from weightseq.verdict import Verdict


def constant():
    return make_sequence(lambda p: np.zeros(np.shape(p)), label="constant")


class TestMakeSequence:
    def test_constant_is_not_a_weight_sequence(self):
        M = constant()
        assert M.log_M(5) == 0.0
        assert not M.looks_like_weight_sequence()

    def test_gevrey_closed_form(self):
        M = make_sequence(lambda p: gammaln(np.asarray(p, float) + 1.0))
        assert M.log_M(3) == pytest.approx(math.log(6), abs=1e-14)

    def test_from_quotient_list(self):
        M = make_sequence(quotients=[2, 4, 8, 16])
        assert M.log_M(3) == pytest.approx(math.log(64), abs=1e-14)
        assert M.lc_guaranteed

    def test_rejects_nonzero_head(self):
        with pytest.raises(ValueError, match="exactly 0"):
            make_sequence(lambda p: np.asarray(p, float) + 1.0)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            make_sequence(log_m=[0.0, math.inf, 1.0])
        M = make_sequence(lambda p: np.where(np.asarray(p) == 3, np.nan, 0.0))
        with pytest.raises(ValueError):
            M.log_M(4)

    def test_needs_some_closed_form(self):
        with pytest.raises(ValueError):
            WeightSequence()


class TestQuotients:
    def test_gevrey_one(self):
        q = catalog.build("gevrey", alpha=1).quotients()
        assert q(2) == pytest.approx(math.log(3), abs=1e-14)

    def test_q_gevrey(self):
        q = catalog.build("q_gevrey", q=2).quotients()
        p = np.arange(50)
        assert np.allclose(q.array(49), (2 * p + 1) * math.log(2), rtol=1e-14, atol=0)

    def test_constant(self):
        assert np.all(constant().quotients().array(20) == 0.0)

    @pytest.mark.parametrize("cid,params", catalog.SAMPLE_INSTANCES)
    def test_reconstruction_is_exact(self, cid, params):
        M = catalog.build(cid, **params)
        n = 500
        rebuilt = M.quotients().reconstruct(n)
        if M.quotient_defined:
            assert np.array_equal(rebuilt, M.log_M_array(n))
        else:
            # closed-form quotients are evaluated independently of log M
            ref = M.log_M_array(n)
            assert np.all(np.abs(rebuilt - ref) <= 1e-13 * np.maximum(1.0, np.abs(ref)) * np.arange(1, n + 2))


class TestCombine:
    def test_lift_of_gevrey(self):
        lifted = combine(catalog.build("gevrey", alpha=1), None, "factorial_lift")
        assert lifted.log_M(2) == pytest.approx(math.log(4), abs=1e-14)

    def test_gamma_round_trip(self):
        M = catalog.build("gevrey", alpha=1.3)
        back = gamma_unscale(gamma_scale(M, 0.7), 0.7)
        assert np.max(np.abs(back.log_M_array(2000) - M.log_M_array(2000))) <= 1e-12 * 2000

    def test_gamma_scale_of_constant(self):
        L1 = combine(constant(), None, "gamma_scale", s=1)
        assert L1.log_M(3) == pytest.approx(math.log(6), abs=1e-14)

    def test_lift_unlift_identity(self):
        M = catalog.build("log_gevrey", alpha=0.8, beta=0.5)
        back = factorial_unlift(factorial_lift(M))
        diff = np.abs(back.log_M_array(10**4) - M.log_M_array(10**4))
        assert diff.max() <= 1e-12 * max(1.0, np.abs(M.log_M_array(10**4)).max())

    def test_unknown_op(self):
        with pytest.raises(ValueError):
            combine(constant(), None, "convolve")


class TestEquivalence:
    def test_gamma_seq_approx_gevrey(self):
        v = check_equivalence(gamma_sequence(2.0), catalog.build("gevrey", alpha=2), "approx", 1000)
        assert v.verdict is Verdict.HOLDS

    @pytest.mark.parametrize("mode", ["approx", "strong"])
    def test_self(self, mode):
        M = catalog.build("gevrey", alpha=1)
        assert check_equivalence(M, M, mode, 1000).verdict is Verdict.HOLDS

    def test_different_orders_fail(self):
        v = check_equivalence(catalog.build("gevrey", alpha=1), catalog.build("gevrey", alpha=2), "approx", 1000)
        assert v.verdict is Verdict.FAILS

    def test_small_n(self):
        with pytest.raises(ValueError):
            check_equivalence(constant(), constant(), "approx", 1)


class TestLogIdentity:
    @pytest.mark.parametrize("cid,params", [("gevrey", {"alpha": 1}), ("q_gevrey", {"q": 2})])
    def test_examples(self, cid, params):
        assert log_identity_check(catalog.build(cid, **params), 200) < 1e-9

    def test_n_one(self):
        assert log_identity_check(catalog.build("gevrey", alpha=1), 1) == 0.0

    def test_requires_lc(self):
        with pytest.raises(ValueError, match="lc"):
            log_identity_check(factorial_unlift(catalog.build("gevrey", alpha=1)), 10)

    @pytest.mark.parametrize("cid,params", catalog.SAMPLE_INSTANCES)
    def test_catalog_wide(self, cid, params):
        assert log_identity_check(catalog.build(cid, **params), 1000) <= 1e-9


@pytest.mark.parametrize("cid,params", catalog.SAMPLE_INSTANCES)
def test_root_bound_on_lc_sequences(cid, params):
    assert root_bound_violation(catalog.build(cid, **params), 2000) <= 1e-12


log_quotients = st.lists(st.floats(0, 5, allow_nan=False), min_size=2, max_size=60)


@given(log_quotients)
def test_cumulative_quotients_reconstruct(values):
    lm = np.cumsum(values)  # nondecreasing, hence lc
    M = make_sequence(log_m=lm)
    n = len(lm)
    assert np.array_equal(M.quotients().reconstruct(n), M.log_M_array(n))
    assert M.lc_guaranteed
    assert np.all(np.diff(M.log_m_array(n - 1)) >= 0)
    assert root_bound_violation(M, n) <= 1e-12


@given(log_quotients)
def test_lc_inequality_for_guaranteed_sequences(values):
    M = make_sequence(log_m=np.cumsum(values))
    lM = M.log_M_array(len(values))
    slack = 1e-12 * (1 + np.abs(lM[1:-1]))
    assert np.all(lM[2:] + lM[:-2] - 2 * lM[1:-1] >= -slack)


@given(st.floats(0.1, 3.0), st.integers(1, 3000))
def test_lift_unlift_round_trip(alpha, p):
    M = catalog.build("gevrey", alpha=alpha)
    assert abs(factorial_unlift(factorial_lift(M)).log_M(p) - M.log_M(p)) <= 1e-12 * max(1.0, abs(M.log_M(p)))
