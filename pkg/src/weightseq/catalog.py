"""Named weight sequences with exact log-domain closed forms.

Each builder validates its parameters and returns a :class:`WeightSequence`
whose ``log_m`` is evaluated directly from a closed form where one exists, so
quotients stay accurate far beyond the point where cumulative sums would lose
digits.  ``expected_profile`` returns the known truth set for an entry, used as
a test oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable

import numpy as np
from scipy.special import gammaln

from .sequence import KnownIndex, WeightSequence, gamma_sequence

INF = math.inf


# -- builders -------------------------------------------------------------


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def gevrey(alpha: float) -> WeightSequence:
    """``M_p = p!^alpha``."""
    _need(alpha > 0, "gevrey requires alpha > 0")
    a = float(alpha)
    return WeightSequence(
        lambda p: a * gammaln(p + 1.0),
        lambda p: a * np.log(p + 1.0),
        label=f"gevrey({a:g})",
        lc_guaranteed=True,
        params={"alpha": a},
        smooth_log_m=lambda x: a * np.log(x + 1.0),
    )


def _loglog(x):
    return np.log(np.log(math.e + x))


def _log_gevrey_head(alpha: float, beta: float) -> int:
    """First index from which ``alpha log(p+1) + beta loglog(e+p+1)`` is nondecreasing."""
    if beta >= 0:
        return 0
    # beyond this point the continuous derivative is positive
    safe = math.e ** (abs(beta) / alpha) + 2.0
    if safe > 1e7:
        raise ValueError("log_gevrey: |beta|/alpha too large for the head repair")
    p = np.arange(int(safe) + 2, dtype=float)
    lm = alpha * np.log(p + 1.0) + beta * _loglog(p + 1.0)
    bad = np.flatnonzero(np.diff(lm) < 0)
    return 0 if len(bad) == 0 else int(bad[-1]) + 1


def log_gevrey(alpha: float, beta: float) -> WeightSequence:
    """``M_p = p!^alpha prod_{m<=p} log(e+m)^beta``.

    For ``beta < 0`` the first quotients may decrease; they are replaced by
    the flat value ``m_{p0}`` up to the first index ``p0`` after which the
    quotients are nondecreasing, which restores (lc) without touching the tail.
    """
    _need(alpha > 0, "log_gevrey requires alpha > 0")
    a, b = float(alpha), float(beta)
    p0 = _log_gevrey_head(a, b)

    def raw(p):
        return a * np.log(p + 1.0) + b * _loglog(p + 1.0)

    def log_m(p):
        p = np.asarray(p, dtype=float)
        return raw(np.maximum(p, p0))

    seq = WeightSequence(
        None,
        log_m,
        label=f"log_gevrey({a:g},{b:g})",
        lc_guaranteed=True,
        params={"alpha": a, "beta": b, "head_repair_index": p0},
        smooth_log_m=lambda x: raw(np.maximum(x, p0)),
    )
    return seq


def pure_log(beta: float) -> WeightSequence:
    """``M_p = prod_{m<=p} log(e+m)^beta``: quotients grow like ``(log p)^beta``."""
    _need(beta > 0, "pure_log requires beta > 0")
    b = float(beta)
    return WeightSequence(
        None,
        lambda p: b * _loglog(np.asarray(p, dtype=float) + 1.0),
        label=f"pure_log({b:g})",
        lc_guaranteed=True,
        params={"beta": b},
        smooth_log_m=lambda x: b * _loglog(x + 1.0),
    )


def q_gevrey(q: float) -> WeightSequence:
    """``M_p = q^{p^2}``."""
    _need(q > 1, "q_gevrey requires q > 1")
    lq = math.log(q)
    return WeightSequence(
        lambda p: np.asarray(p, dtype=float) ** 2 * lq,
        lambda p: (2.0 * np.asarray(p, dtype=float) + 1.0) * lq,
        label=f"q_gevrey({q:g})",
        lc_guaranteed=True,
        params={"q": float(q)},
        smooth_log_m=lambda x: (2.0 * x + 1.0) * lq,
    )


def gamma_seq(alpha: float) -> WeightSequence:
    """``L_alpha = (Gamma(1 + alpha p))_p``."""
    _need(alpha > 0, "gamma_seq requires alpha > 0")
    return gamma_sequence(alpha)


def _is_two_power_plus_one(n: np.ndarray) -> np.ndarray:
    k = n - 1
    return (k >= 1) & ((k & (k - 1)) == 0)


def counterexample_A(q: float = 2.0) -> WeightSequence:
    """Quotients ``m_{n-1} = q^{2n+1}``, lowered to ``q^{2n-1}`` at ``n = 2^k + 1``.

    Exponents are integers times ``log q``, so equal quotients compare exactly.
    """
    _need(q > 1, "counterexample_A requires q > 1")
    lq = math.log(q)

    def log_m(p):
        n = np.asarray(p, dtype=np.int64) + 1
        expo = np.where(_is_two_power_plus_one(n), 2 * n - 1, 2 * n + 1)
        return expo.astype(float) * lq

    return WeightSequence(
        None,
        log_m,
        label=f"counterexample_A({q:g})",
        lc_guaranteed=True,
        params={"q": float(q)},
    )


@lru_cache(maxsize=8)
def burst_schedule(q1: int = 2, limit: int = 2**62) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The integers ``q_k`` and ``p_k = q_k^2 - 1`` of the burst construction.

    ``q_{k+1}`` is the least integer with ``q_{k+1} >= k log q_{k+1} + p_k``;
    generation stops once ``p_k`` exceeds ``limit``.
    """
    qs, ps = [int(q1)], [int(q1) ** 2 - 1]
    k = 1
    while ps[-1] <= limit:
        x = ps[-1] + 1
        # fixed-point iteration from below reaches the least solution
        while x < k * math.log(x) + ps[-1]:
            x = max(x + 1, math.ceil(k * math.log(x) + ps[-1]))
        qs.append(x)
        ps.append(x * x - 1)
        k += 1
    return tuple(qs), tuple(ps)


def counterexample_B(q1: int = 2) -> WeightSequence:
    """Quotients ``log m_{p-1} = sum_{j<=p} delta_j`` with unit increments on bursts.

    ``delta_j = 1`` exactly for ``p_k < j <= q_{k+1}``; long flat stretches
    ``q_k < j <= p_k`` keep ``m_p / M_p^{1/p}`` bounded along ``p_k`` while the
    bursts push ``log m_p / log p`` to infinity.
    """
    _need(int(q1) == q1 and q1 >= 2, "counterexample_B requires an integer q1 >= 2")
    qs, ps = burst_schedule(int(q1))
    starts = np.array(ps[:-1], dtype=np.float64)
    ends = np.array(qs[1:], dtype=np.float64)

    def delta_count(J):
        J = np.asarray(J, dtype=np.float64)[..., None]
        return np.clip(J - starts, 0.0, ends - starts).sum(axis=-1)

    def log_m(p):
        return delta_count(np.asarray(p, dtype=np.float64) + 1.0)

    seq = WeightSequence(
        None,
        log_m,
        label=f"counterexample_B({int(q1)})",
        lc_guaranteed=True,
        params={"q1": int(q1)},
    )
    seq.known_indices["omega"] = KnownIndex(
        INF,
        "burst construction: log m_{p_{k+1}} / log(p_{k+1}+1) >= k/2",
        certify=lambda limit: burst_certificate(seq, limit)["omega_lower_bounds_ok"],
    )
    return seq


def burst_certificate(seq: WeightSequence, limit: int = 10**5) -> dict[str, Any]:
    """Check both burst-construction inequalities at every ``p_k <= limit``.

    Returns the per-``k`` values of ``beta_{p_k} = log(m_{p_k} / M_{p_k}^{1/p_k})``
    with the literal target ``<= 1`` and the bound ``1 + q_k / (2(q_k - 1))``
    that the construction actually guarantees, and of ``log m_{p_{k+1}} / log(p_{k+1}+1)`` (each
    must be ``>= k/2``).
    """
    qs, ps = burst_schedule(seq.params["q1"])
    ps_in = [p for p in ps if p <= limit]
    betas = []
    for p in ps_in:
        betas.append(float(seq.log_m(p) - seq.log_M(p) / p))
    ratios = []
    for k, p in enumerate(ps_in[1:], start=1):
        ratios.append((k, float(seq.log_m(p) / math.log(p + 1.0))))
    return {
        "p_k": ps_in,
        "q_k": [q for q in qs if q <= limit],
        "beta_at_p_k": betas,
        "root_ratio_ok": all(b <= 1.0 for b in betas),
        # the burst starting at p_k + 1 adds exactly 1 to the flat-stretch bound
        "beta_bound": [1.0 + q / (2.0 * (q - 1.0)) for q in qs[: len(ps_in)]],
        "root_ratio_bounded": all(b <= 1.0 + q / (2.0 * (q - 1.0)) + 1e-12 for b, q in zip(betas, qs)),
        "omega_ratios": ratios,
        "omega_lower_bounds_ok": all(r >= k / 2 for k, r in ratios),
        "schedule_ok": all(qs[i] < ps[i] < qs[i + 1] for i in range(len(qs) - 1)),
    }


# -- registry and expected profiles ---------------------------------------


@dataclass(frozen=True)
class Expectation:
    value: Any
    provenance: str  # "asserted": stated by the theory; "derived": computed from closed forms


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    builder: Callable[..., WeightSequence]
    param_names: tuple[str, ...]
    defaults: dict[str, float]
    summary: str
    profile: Callable[..., dict[str, Expectation]] = field(repr=False)

    def build(self, **params) -> WeightSequence:
        return self.builder(**self.resolve(params))

    def resolve(self, params: dict[str, Any]) -> dict[str, Any]:
        unknown = set(params) - set(self.param_names)
        if unknown:
            raise ValueError(f"{self.id}: unknown parameter(s) {sorted(unknown)}")
        out = dict(self.defaults)
        out.update(params)
        missing = [n for n in self.param_names if n not in out]
        if missing:
            raise ValueError(f"{self.id}: missing parameter(s) {missing}")
        return out


A, D = "asserted", "derived"


def _regular_profile(alpha, src_regular=D):
    return {
        "lc": Expectation(True, src_regular),
        "dc": Expectation(True, src_regular),
        "mg": Expectation(True, src_regular),
        "snq": Expectation(True, src_regular),
        "beta2": Expectation(False, D),
        "gamma": Expectation(alpha, D),
        "omega": Expectation(alpha, D),
    }


def _gevrey_profile(alpha):
    return _regular_profile(alpha, A)


def _log_gevrey_profile(alpha, beta):
    return _regular_profile(alpha, D)


def _pure_log_profile(beta):
    return {
        "lc": Expectation(True, A),
        "mg": Expectation(True, A),
        "snq": Expectation(False, A),
        "dc": Expectation(True, D),
        "beta2": Expectation(False, D),
        "gamma": Expectation(0.0, D),
        "omega": Expectation(0.0, D),
    }


def _q_gevrey_profile(q):
    return {
        "lc": Expectation(True, A),
        "dc": Expectation(True, A),
        "snq": Expectation(True, A),
        "mg": Expectation(False, A),
        "beta2": Expectation(True, D),
        "gamma": Expectation(INF, D),
        "omega": Expectation(INF, D),
    }


def _gamma_profile(alpha):
    return _regular_profile(alpha, D)


def _cex_a_profile(q):
    return {
        "lc": Expectation(True, D),
        "sv_monotone": Expectation(False, A),
        "mg": Expectation(False, D),
        "gamma": Expectation(INF, A),
        "omega": Expectation(INF, D),
    }


def _cex_b_profile(q1):
    return {
        "lc": Expectation(True, A),
        "condition_vi": Expectation(False, A),
        "beta2": Expectation(False, D),
        "omega": Expectation(INF, A),
    }


CATALOG: dict[str, CatalogEntry] = {
    e.id: e
    for e in [
        CatalogEntry("gevrey", gevrey, ("alpha",), {}, "strongly regular: (lc), (dc), (mg), (snq); gamma = omega = alpha", _gevrey_profile),
        CatalogEntry("log_gevrey", log_gevrey, ("alpha", "beta"), {}, "strongly regular for alpha > 0; indices equal alpha", _log_gevrey_profile),
        CatalogEntry("pure_log", pure_log, ("beta",), {}, "(lc) and (mg) hold, (snq) fails; gamma = 0", _pure_log_profile),
        CatalogEntry("q_gevrey", q_gevrey, ("q",), {}, "satisfies (lc), (dc), (snq), not (mg); gamma = omega = infinity", _q_gevrey_profile),
        CatalogEntry("gamma_seq", gamma_seq, ("alpha",), {}, "equivalent to gevrey(alpha); strongly regular", _gamma_profile),
        CatalogEntry("counterexample_A", counterexample_A, ("q",), {"q": 2.0}, "gamma = infinity while (m_{n-1}/n) is not eventually increasing", _cex_a_profile),
        CatalogEntry("counterexample_B", counterexample_B, ("q1",), {"q1": 2}, "omega = infinity while m_n / M_n^{1/n} stays bounded along p_k", _cex_b_profile),
    ]
}


def get_entry(entry_id: str) -> CatalogEntry:
    try:
        return CATALOG[entry_id]
    except KeyError:
        raise KeyError(f"unknown catalog id {entry_id!r}; known: {sorted(CATALOG)}") from None


def build(entry_id: str, **params) -> WeightSequence:
    return get_entry(entry_id).build(**params)


def expected_profile(entry_id: str, **params) -> dict[str, Expectation]:
    entry = get_entry(entry_id)
    return entry.profile(**entry.resolve(params))


# instances used by catalog-wide property tests and demos
SAMPLE_INSTANCES: list[tuple[str, dict[str, float]]] = [
    ("gevrey", {"alpha": 0.5}),
    ("gevrey", {"alpha": 1.0}),
    ("gevrey", {"alpha": 2.0}),
    ("log_gevrey", {"alpha": 1.0, "beta": 0.5}),
    ("log_gevrey", {"alpha": 1.0, "beta": -0.5}),
    ("pure_log", {"beta": 1.0}),
    ("q_gevrey", {"q": 2.0}),
    ("gamma_seq", {"alpha": 1.0}),
    ("counterexample_A", {"q": 2.0}),
    ("counterexample_B", {"q1": 2}),
]
