import math

import pytest
from hypothesis import given, settings, strategies as st

from weightseq import catalog
from weightseq.conditions import check_gamma_beta, check_mg, check_snq
from weightseq.indices import (BISECTION_WIDTH, IndexEstimate, estimate_gamma, estimate_matuszewska,
                               estimate_omega, index_chain, verify_shift_identities)
from weightseq.sequence import gamma_scale
from weightseq.verdict import Verdict


def seq(cid, **p):
    return catalog.build(cid, **p)


class TestGamma:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_gevrey(self, alpha):
        g = estimate_gamma(seq("gevrey", alpha=alpha), 10**5)
        assert not g.infinite and abs(g.value - alpha) <= 0.05
        assert g.method == "gamma_beta-bisection"
        assert "slope_k_trend" in g.metadata

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_brute_force_gamma_beta_brackets(self, alpha):
        # independent check of the bisection: (gamma_beta) holds just below alpha and fails just above
        M = seq("gevrey", alpha=alpha)
        assert check_gamma_beta(M, alpha - 0.1, 10**4).verdict is Verdict.HOLDS
        assert check_gamma_beta(M, alpha + 0.1, 10**4).verdict is Verdict.FAILS

    def test_q_gevrey_infinite(self):
        g = estimate_gamma(seq("q_gevrey", q=2), 10**4)
        assert g.infinite and g.value == math.inf

    def test_gamma_scale_shift(self):
        M = seq("gevrey", alpha=1)
        a, b = estimate_gamma(M, 10**4), estimate_gamma(gamma_scale(M, 1.0), 10**4)
        assert abs(b.value - a.value - 1.0) <= 0.05

    def test_small_n(self):
        with pytest.raises(ValueError):
            estimate_gamma(seq("gevrey", alpha=1), 8)


class TestOmega:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_gevrey(self, alpha):
        w = estimate_omega(seq("gevrey", alpha=alpha), 10**5)
        assert abs(w.value - alpha) <= 0.05

    def test_q_gevrey(self):
        assert estimate_omega(seq("q_gevrey", q=2), 10**4).infinite

    def test_counterexample_b_certified(self):
        w = estimate_omega(seq("counterexample_B", q1=2), 10**4)
        assert w.infinite and w.method == "construction-certificate"


class TestMatuszewska:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_gevrey(self, alpha):
        lo, hi = estimate_matuszewska(seq("gevrey", alpha=alpha), 10**5)
        assert abs(lo.value - alpha) <= 0.1 and abs(hi.value - alpha) <= 0.1

    def test_q_gevrey(self):
        lo, hi = estimate_matuszewska(seq("q_gevrey", q=2), 10**4)
        assert lo.infinite and hi.infinite

    @pytest.mark.parametrize("cid,params", catalog.SAMPLE_INSTANCES)
    def test_upper_infinite_iff_mg_fails(self, cid, params):
        M = seq(cid, **params)
        upper = estimate_matuszewska(M, 10**4)[1]
        mg = check_mg(M, 10**4).verdict
        if cid == "counterexample_B":
            # its next burst lies beyond the window; the certificate decides
            assert upper.infinite and mg is not Verdict.HOLDS
        else:
            assert upper.infinite == (mg is Verdict.FAILS)


class TestShiftIdentities:
    def test_gevrey1_times(self):
        rep = verify_shift_identities(seq("gevrey", alpha=1), [0.5], 10**4)
        assert rep["ok"] and rep["rows"][0]["gamma_times"] == pytest.approx(1.5, abs=0.1)

    def test_gevrey2_divided(self):
        rep = verify_shift_identities(seq("gevrey", alpha=2), [1.0], 10**4)
        assert rep["ok"] and rep["rows"][0]["gamma_divided"] == pytest.approx(1.0, abs=0.1)

    def test_degenerate_small_shift(self):
        M = seq("gevrey", alpha=1)
        rep = verify_shift_identities(M, [1e-3], 10**4)
        g = estimate_gamma(M, 10**4)
        assert rep["ok"]
        assert abs(rep["rows"][0]["gamma_times"] - g.value) <= max(g.spread, BISECTION_WIDTH) + 2e-3


def test_estimate_invariants():
    with pytest.raises(ValueError):
        IndexEstimate("gamma", -0.5, False, (10,), "x", 0.0)
    with pytest.raises(ValueError):
        IndexEstimate("gamma", 3.0, True, (10,), "x", 0.0)


@pytest.mark.parametrize("cid,params", catalog.SAMPLE_INSTANCES)
def test_spread_is_difference_of_two_truncations(cid, params):
    M = seq(cid, **params)
    g = estimate_gamma(M, 10**4)
    if not g.infinite:
        half = estimate_gamma(M, 5000)
        assert g.spread == pytest.approx(abs(g.value - half.value), abs=1e-12)
        assert g.window == (5000, 10**4)


@pytest.mark.parametrize("cid,params", catalog.SAMPLE_INSTANCES)
def test_snq_iff_gamma_positive(cid, params):
    M = seq(cid, **params)
    g = estimate_gamma(M, 10**4)
    snq = check_snq(M, 10**4).verdict
    assert (snq is Verdict.HOLDS) == (g.key() >= 0.05)


@pytest.mark.parametrize("cid,params", catalog.SAMPLE_INSTANCES)
def test_estimator_consistency_under_doubling(cid, params):
    M = seq(cid, **params)
    a, b = estimate_gamma(M, 10**4), estimate_gamma(M, 2 * 10**4)
    assert a.infinite == b.infinite
    if not a.infinite:
        assert abs(a.value - b.value) < 2 * max(a.spread, BISECTION_WIDTH)


def chain_ok(c) -> bool:
    g, lo, w, hi = (c[k].key() for k in ("gamma", "matuszewska_lower", "omega", "matuszewska_upper"))
    if math.isinf(g) or math.isinf(lo):
        agree = math.isinf(g) and math.isinf(lo)
    else:
        agree = abs(g - lo) <= 0.1
    return agree and g <= w + 0.1 <= hi + 0.2


@pytest.mark.parametrize("cid,params", catalog.SAMPLE_INSTANCES)
def test_index_chain(cid, params):
    assert chain_ok(index_chain(seq(cid, **params), 10**5))


@settings(max_examples=12)
@given(st.floats(0.3, 3.0))
def test_gevrey_gamma_and_omega_track_alpha(alpha):
    M = seq("gevrey", alpha=alpha)
    g, w = estimate_gamma(M, 2 * 10**4), estimate_omega(M, 2 * 10**4)
    assert abs(g.value - alpha) <= 0.05 and abs(w.value - alpha) <= 0.05
    assert chain_ok(index_chain(M, 2 * 10**4))
