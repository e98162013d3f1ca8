import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from weightseq import catalog
from weightseq.catalog import burst_certificate, burst_schedule
from weightseq.conditions import check_lc, check_sv_monotone
from weightseq.verdict import Verdict


def test_q_gevrey_value():
    assert catalog.build("q_gevrey", q=2).log_M(3) == pytest.approx(9 * math.log(2), rel=1e-15)


def test_gamma_seq_is_factorial():
    assert catalog.build("gamma_seq", alpha=1).log_M(4) == pytest.approx(math.log(24), rel=1e-14)


def test_counterexample_a_quotients():
    M = catalog.build("counterexample_A", q=2)
    ln2 = math.log(2)
    # n = 4 is not of the form 2^k + 1, so m_3 = q^(2n+1)
    assert M.log_m(3) == pytest.approx(9 * ln2, rel=1e-15)
    # n = 3 = 2^1 + 1 is lowered to q^(2n-1)
    assert M.log_m(2) == pytest.approx(5 * ln2, rel=1e-15)
    assert M.log_m(8) == pytest.approx(17 * ln2, rel=1e-15)


@pytest.mark.parametrize("cid,bad", [
    ("gevrey", {"alpha": 0}), ("gevrey", {"alpha": -1}), ("q_gevrey", {"q": 1}), ("gamma_seq", {"alpha": 0}),
    ("pure_log", {"beta": 0}), ("log_gevrey", {"alpha": 0, "beta": 1}), ("counterexample_B", {"q1": 2.5}),
])
def test_parameter_constraints(cid, bad):
    with pytest.raises(ValueError):
        catalog.build(cid, **bad)


def test_unknown_id_and_params():
    with pytest.raises(KeyError):
        catalog.build("bogus")
    with pytest.raises(ValueError, match="unknown parameter"):
        catalog.build("gevrey", alpha=1, beta=2)
    with pytest.raises(ValueError, match="missing"):
        catalog.build("gevrey")


class TestExpectedProfile:
    def test_q_gevrey_not_mg(self):
        e = catalog.expected_profile("q_gevrey", q=2)
        assert e["mg"].value is False and e["mg"].provenance == "asserted"
        assert all(e[k].value is True for k in ("lc", "dc", "snq"))
        assert e["gamma"].value == math.inf and e["omega"].value == math.inf

    def test_pure_log_not_snq(self):
        e = catalog.expected_profile("pure_log", beta=1)
        assert e["snq"].value is False and e["snq"].provenance == "asserted"
        assert e["lc"].value and e["mg"].value

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_gevrey_strongly_regular(self, alpha):
        e = catalog.expected_profile("gevrey", alpha=alpha)
        assert all(e[k].value for k in ("lc", "dc", "mg", "snq"))
        assert e["gamma"].value == alpha == e["omega"].value


@pytest.mark.parametrize("cid,params", catalog.SAMPLE_INSTANCES)
def test_every_sample_is_lc(cid, params):
    assert check_lc(catalog.build(cid, **params), 10**4).verdict is Verdict.HOLDS


@pytest.mark.parametrize("beta", [-0.5, -2.0, -5.0])
def test_log_gevrey_head_repair(beta):
    M = catalog.build("log_gevrey", alpha=1.0, beta=beta)
    lm = M.log_m_array(10**4)
    assert np.all(np.diff(lm) >= 0)
    p0 = M.params["head_repair_index"]
    if beta <= -5:
        assert p0 > 0
    # the tail is the unrepaired closed form
    p = np.arange(p0, 10**4)
    raw = np.log(p + 1.0) + beta * np.log(np.log(math.e + p + 1.0))
    assert np.allclose(lm[p0:10**4], raw, rtol=1e-14, atol=1e-14)


class TestBurstConstruction:
    def test_schedule_prefix(self):
        qs, ps = burst_schedule(2)
        assert qs[:5] == (2, 5, 31, 981, 962416)
        assert ps[:4] == (3, 24, 960, 962360)

    @given(st.integers(2, 40))
    def test_schedule_well_defined(self, q1):
        qs, ps = burst_schedule(q1, limit=10**9)
        for k in range(len(qs) - 1):
            assert qs[k] < ps[k] < qs[k + 1]
            # least integer solving q_{k+1} >= k log q_{k+1} + p_k (k counted from 1)
            x, kk = qs[k + 1], k + 1
            assert x >= kk * math.log(x) + ps[k]
            assert x - 1 < kk * math.log(x - 1) + ps[k]

    def test_certificate(self):
        cert = burst_certificate(catalog.build("counterexample_B", q1=2), 10**5)
        assert cert["omega_lower_bounds_ok"] and cert["schedule_ok"] and cert["root_ratio_bounded"]
        assert cert["p_k"] == [3, 24, 960]

    @pytest.mark.parametrize("q1", [2, 3, 7])
    def test_root_ratio_matches_delta_sum(self, q1):
        # independent oracle: (1/p) sum_{j<=p} j delta_{j+1} from the 0/1 schedule
        M = catalog.build("counterexample_B", q1=q1)
        qs, ps = burst_schedule(q1)
        for p in [x for x in ps if x <= 10**5]:
            delta = np.zeros(p + 2)
            for k in range(len(ps) - 1):
                lo, hi = ps[k] + 1, min(qs[k + 1], p + 1)
                if lo <= hi:
                    delta[lo:hi + 1] = 1.0
            j = np.arange(1, p + 1)
            oracle = float(np.sum(j * delta[j + 1]) / p)
            assert M.log_m(p) - M.log_M(p) / p == pytest.approx(oracle, rel=1e-12, abs=1e-12)


class TestCounterexampleA:
    def test_not_eventually_increasing(self):
        v = check_sv_monotone(catalog.build("counterexample_A", q=2), r_max=1, N=10**4)
        assert v.verdict is Verdict.FAILS

    @pytest.mark.parametrize("r", [1, 2, 3, 4, 5])
    def test_almost_increasing(self, r):
        M = catalog.build("counterexample_A", q=2)
        n = np.arange(1, 10**4)
        f = M.log_m(n) - r * np.log(n)
        drop = np.maximum.accumulate(f) - f
        # a bounded drop means f(p) <= a f(q) for p <= q with a = e^drop
        assert drop.max() <= 2 * math.log(2) + r * math.log(2)
