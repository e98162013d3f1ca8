"""Finite-truncation checkers for the growth conditions on weight sequences.

Every checker returns a :class:`ConditionVerdict`.  Bounded-constant
conditions ((dc), (mg), (snq), (gamma_beta)) use :func:`verdict.sup_trend`
on the tested quantity; divergence conditions ((beta_2^0), the root ratio
condition) use :func:`verdict.liminf_trend`.

Tail sums for (snq) and (gamma_beta) are handled by :func:`tail_profile`:
explicit summation over ``q <= Q``, then either an integral-comparison
remainder on the sequence's smooth interpolant (closed forms) or dyadic
block extrapolation (sampled quotients).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sequence import WeightSequence
from .verdict import (
    DEFAULT_PROTOCOL,
    ConditionVerdict,
    TailBoundError,
    TrendProtocol,
    Verdict,
    increments_trend,
    liminf_trend,
    sup_trend,
)

LOG2 = math.log(2.0)
TAIL_REL_TOL = 0.01
Q_CAP = 2**22
FAR_LOG_INDEX = 700.0
FAR_STEP = LOG2 / 8


def _lc_tol(v: np.ndarray) -> np.ndarray:
    return 1e-12 * np.maximum(1.0, np.abs(v))


# -- (lc) -----------------------------------------------------------------


def check_lc(M: WeightSequence, N: int) -> ConditionVerdict:
    """Log-convexity over ``1 <= p <= N``; decisive on the window.

    Compared through quotients, ``log m_p >= log m_{p-1}``, which is the
    same inequality without the cancellation of second differences of
    ``log M``.
    """
    if N < 2:
        raise ValueError("check_lc needs N >= 2")
    N = M.evaluable(N + 1) - 1
    lm = M.log_m_array(N)
    drop = lm[:-1] - lm[1:]
    bad = np.flatnonzero(drop > _lc_tol(lm[1:]))
    if len(bad):
        p = int(bad[0]) + 1
        return ConditionVerdict("lc", Verdict.FAILS, N, {"index": p, "value": float(-drop[p - 1])},
                                details={"violations": int(len(bad))})
    return ConditionVerdict("lc", Verdict.HOLDS, N, None)


# -- bounded-sup conditions ------------------------------------------------


def _sup_verdict(name: str, x: np.ndarray, N: int, protocol: TrendProtocol, extra=None) -> ConditionVerdict:
    trend, info = sup_trend(x, protocol)
    info.update(extra or {})
    witness = {"index": info["argmax"], "value": info["sup"]}
    if trend == "bounded":
        c = math.exp(info["sup"])
        return ConditionVerdict(name, Verdict.HOLDS, N, witness, constant_estimate=c,
                                slack_constant=1.1 * c, details=info)
    if trend == "divergent":
        witness = {"index": len(x) - 1, "value": float(x[-1])}
        return ConditionVerdict(name, Verdict.FAILS, N, witness, details=info)
    return ConditionVerdict(name, Verdict.INCONCLUSIVE, N, witness, details=info)


def check_dc(M: WeightSequence, N: int, protocol: TrendProtocol = DEFAULT_PROTOCOL) -> ConditionVerdict:
    """(dc): ``log m_p / (p+1)`` bounded; ``D = exp(sup)`` on the window."""
    if N < 2:
        raise ValueError("check_dc needs N >= 2")
    N = M.evaluable(N + 1) - 1
    p = np.arange(N + 1)
    x = M.log_m_array(N) / (p + 1.0)
    return _sup_verdict("dc", x, N, protocol)


def _mg_excess(M: WeightSequence, N: int) -> tuple[np.ndarray, str]:
    lM = M.log_M_array(N)
    n = np.arange(N + 1)
    if M.lc_guaranteed:
        # for convex log M the excess of a split p + q = n peaks at the balanced split
        lo, hi = n // 2, n - n // 2
        x = lM - lM[lo] - lM[hi]
        return np.concatenate(([0.0], x[1:] / n[1:])), "balanced-split"
    best = np.zeros(N + 1)
    for s in range(2, N + 1):
        p = np.arange(1, s // 2 + 1)
        best[s] = np.max(lM[s] - lM[p] - lM[s - p]) / s
    return best, "full-scan"


def check_mg(M: WeightSequence, N: int, protocol: TrendProtocol = DEFAULT_PROTOCOL) -> ConditionVerdict:
    """(mg): ``(log M_{p+q} - log M_p - log M_q)/(p+q)`` bounded; ``A = exp(sup)``.

    For log-convex sequences only ``p = q`` (or ``q = p+1``) is scanned.  A
    bounded window on a sequence with certified infinite omega is reported
    Inconclusive, since omega = inf rules (mg) out.
    """
    if N < 4:
        raise ValueError("check_mg needs N >= 4")
    N = M.evaluable(N)
    x, scan = _mg_excess(M, N)
    v = _sup_verdict("mg", x, N, protocol, {"scan": scan})
    known = M.known_indices.get("omega")
    if v.holds and known is not None and known.value == math.inf and known.certify and known.certify(10**6):
        # omega = inf forces alpha(m) = inf, so a bounded window cannot mean (mg)
        details = dict(v.details, reason="window looks bounded but omega is certified infinite")
        return ConditionVerdict("mg", Verdict.INCONCLUSIVE, N, v.witness, details=details)
    return v


# -- tail sums ---------------------------------------------------------------


@dataclass(frozen=True)
class TailProfile:
    """Suffix sums ``S(p) = sum_{q >= p} w_q`` for ``p <= N``, in log form."""

    log_suffix: np.ndarray  # log S(p), p = 0..N
    cutoff: int
    method: str
    remainder_fraction: float


class _NonSummable(Exception):
    pass


def _logsumexp(v: np.ndarray) -> float:
    m = float(np.max(v))
    if not np.isfinite(m):
        return m
    return m + math.log(float(np.sum(np.exp(v - m))))


def _suffix_logsum(logw: np.ndarray) -> np.ndarray:
    return np.logaddexp.accumulate(logw[::-1])[::-1]


def _far_tail(log_w_smooth, Q: int) -> tuple[float, float, bool]:
    """``log`` of the integral of the smooth weight beyond ``Q`` and of its remainder.

    Integrates ``w(e^u) e^u`` over ``u`` from ``log(Q + 1/2)`` to
    ``FAR_LOG_INDEX`` treating ``log`` of the integrand as piecewise linear
    (exact for power laws), then adds the remainder implied by the last rate.
    Returns ``(log_mid, log_remainder, summable)``.
    """
    u = np.arange(math.log(Q + 0.5), FAR_LOG_INDEX + FAR_STEP, FAR_STEP)
    with np.errstate(over="ignore", invalid="ignore"):
        lg = np.asarray(log_w_smooth(np.exp(u)), dtype=float) + u
    lg = np.where(np.isnan(lg), -np.inf, lg)
    a, b = lg[:-1], lg[1:]
    diff = b - a
    with np.errstate(invalid="ignore", divide="ignore"):
        # log of h * (e^a - e^b) / (a - b), the exact integral of an exponential
        rel = np.where(np.abs(diff) < 1e-8, 0.0, np.log(np.expm1(diff) / diff))
    pieces = a + math.log(FAR_STEP) + rel
    pieces = np.where(np.isneginf(a) & np.isneginf(b), -np.inf, pieces)
    log_mid = _logsumexp(pieces) if np.any(np.isfinite(pieces)) else -math.inf
    if np.isneginf(lg[-1]):
        return log_mid, -math.inf, True
    rates = -(np.diff(lg[-3:]) / FAR_STEP)  # s - 1 at the last two steps
    if np.all(rates <= 0):
        return log_mid, math.inf, False
    rate = float(rates[-1])
    if rate <= 0:
        return log_mid, math.inf, True
    return log_mid, float(lg[-1] - math.log(rate)), True


def _block_rate_tail(logw: np.ndarray, Q: int) -> tuple[float, float, float]:
    """Dyadic-block extrapolation of ``sum_{q > Q} w_q``.

    Returns ``(log remainder, r, r_prev)`` where ``r`` is the ratio of the
    block sums over ``(Q/2, Q]`` and ``(Q/4, Q/2]``, and ``r_prev`` the ratio
    one doubling earlier.
    """
    b2 = _logsumexp(logw[Q // 8 + 1 : Q // 4 + 1])
    b0 = _logsumexp(logw[Q // 4 + 1 : Q // 2 + 1])
    b1 = _logsumexp(logw[Q // 2 + 1 : Q + 1])
    with np.errstate(invalid="ignore"):
        log_prev = b0 - b2 if np.isfinite(b0) else -math.inf
    r_prev = math.exp(min(log_prev, 700.0))
    if np.isneginf(b1):
        return -math.inf, 0.0, r_prev
    log_r = b1 - b0
    if log_r >= 0:
        return math.inf, math.exp(min(log_r, 700.0)), r_prev
    r = math.exp(log_r)
    return b1 + log_r - math.log1p(-r), r, r_prev


def tail_profile(M: WeightSequence, log_w, log_w_smooth, N: int) -> TailProfile:
    """Suffix sums of the weights ``w_q`` with a controlled remainder.

    Raises ``_NonSummable`` when the weights are not summable and returns
    ``None``-free profiles only when the remainder is below 1% of the
    partial sum from ``N``.  ``TailBoundError`` is left to the caller.
    """
    cap = Q_CAP if M.max_index is None else M.max_index - 1
    Q = min(max(8 * N, 1024), cap)
    if Q <= 4 * N // 3:
        raise TailBoundError(f"{M.label}: only {cap} quotients available for tail sums up to N={N}")

    if log_w_smooth is not None and M.max_index is None:
        lw = log_w(np.arange(Q + 1))
        suf = _suffix_logsum(lw)
        log_mid, log_rem, summable = _far_tail(log_w_smooth, Q)
        if not summable:
            raise _NonSummable("smooth weights decay no faster than 1/q")
        log_partial = np.logaddexp(suf[N], log_mid)
        frac = math.exp(min(log_rem - log_partial, 700.0))
        if frac < TAIL_REL_TOL:
            tail = np.logaddexp(log_mid, log_rem)
            return TailProfile(np.logaddexp(suf[: N + 1], tail), Q, "smooth-integral", frac)
        return _Unresolved(Q, frac)  # type: ignore[return-value]

    history = []
    while True:
        lw = log_w(np.arange(Q + 1))
        suf = _suffix_logsum(lw)
        log_rem, r, r_prev = _block_rate_tail(lw, Q)
        if r >= 1.0 and r_prev >= 1.0:
            raise _NonSummable("dyadic block sums stopped decreasing")
        frac = math.exp(min(log_rem - suf[N], 700.0)) if np.isfinite(suf[N]) else 0.0
        history.append((Q, log_rem, suf))
        if frac < TAIL_REL_TOL:
            return TailProfile(np.logaddexp(suf[: N + 1], log_rem), Q, "block-extrapolation", frac)
        if 2 * Q > cap:
            break
        Q *= 2
    if len(history) >= 2 and np.isfinite(history[-1][1]) and np.isfinite(history[-2][1]):
        (Qa, ra, sa), (Qb, rb, sb) = history[-2], history[-1]
        total_a = np.logaddexp(sa[0], ra)
        total_b = np.logaddexp(sb[0], rb)
        spread = abs(math.exp(total_a - sb[N]) - math.exp(total_b - sb[N]))
        if spread < TAIL_REL_TOL:
            return TailProfile(np.logaddexp(sb[: N + 1], rb), Qb, "block-extrapolation-two-rate", frac)
    return _Unresolved(Q, frac)  # type: ignore[return-value]


@dataclass(frozen=True)
class _Unresolved:
    cutoff: int
    remainder_fraction: float


def _divergence_lower_bound(M, log_w, log_scale, N, protocol):
    """Trend of ``x(n) = max_{p<=n} scale_p sum_{q=p}^{64n} w_q``, a lower bound of the sup."""
    cap = Q_CAP if M.max_index is None else M.max_index - 1
    hi_all = min(64 * N, cap)
    lw = log_w(np.arange(hi_all + 1))
    suf = np.concatenate((_suffix_logsum(lw), [-np.inf]))
    ls = log_scale(np.arange(N + 1))
    start = int(N * (1.0 - protocol.tail_fraction))
    samples = sorted(set(
        [max(1, N >> j) for j in range(4)]
        + list(np.linspace(start, N, protocol.monotone_samples).astype(int))
    ))
    values = {}
    for n in samples:
        hi = min(64 * n, hi_all)
        p = np.arange(n + 1)
        with np.errstate(invalid="ignore", divide="ignore"):
            seg = suf[p] + np.log(-np.expm1(suf[hi + 1] - suf[p]))
        vals = ls[: n + 1] + seg
        j = int(np.argmax(vals))
        values[n] = (float(np.exp(min(vals[j], 700.0))), j)
    cps = [max(1, N >> (3 - j)) for j in range(4)]
    pts = np.maximum.accumulate(np.array([values[c][0] for c in cps]))
    trend = increments_trend(pts, protocol)
    tail = np.array([values[n][0] for n in samples if n >= start])
    if trend == "divergent" and not (np.all(np.diff(tail) >= 0) and tail[-1] > tail[0]):
        trend = "unclear"
    return trend, {"checkpoints": cps, "lower_bounds": pts.tolist(), "argmax": values[N][1]}


def _tail_sum_check(name, M, N, log_w, log_scale, log_w_smooth, protocol, extra=None) -> ConditionVerdict:
    extra = dict(extra or {})
    try:
        prof = tail_profile(M, log_w, log_w_smooth, N)
    except _NonSummable as exc:
        return ConditionVerdict(name, Verdict.FAILS, N, {"index": 0, "value": math.inf},
                                details={"reason": f"tail sum diverges: {exc}", **extra})
    if isinstance(prof, _Unresolved):
        trend, info = _divergence_lower_bound(M, log_w, log_scale, N, protocol)
        if trend == "divergent":
            info.update(extra, reason="lower bounds of the supremum diverge", cutoff=prof.cutoff)
            return ConditionVerdict(name, Verdict.FAILS, N,
                                    {"index": info["argmax"], "value": info["lower_bounds"][-1]},
                                    details=info)
        raise TailBoundError(
            f"{name} on {M.label}: tail remainder is {prof.remainder_fraction:.3g} of the partial sum "
            f"at cutoff {prof.cutoff} and divergence could not be certified"
        )
    logR = log_scale(np.arange(N + 1)) + prof.log_suffix
    R = np.exp(np.minimum(logR, 709.0))
    R[logR > 709.0] = np.inf
    extra.update(cutoff=prof.cutoff, tail_method=prof.method, remainder_fraction=prof.remainder_fraction)
    trend, info = sup_trend(R, protocol)
    info.update(extra)
    witness = {"index": info["argmax"], "value": info["sup"]}
    if trend == "bounded":
        c = info["sup"]
        return ConditionVerdict(name, Verdict.HOLDS, N, witness, constant_estimate=c,
                                slack_constant=1.1 * c, details=info)
    if trend == "divergent":
        return ConditionVerdict(name, Verdict.FAILS, N, {"index": N, "value": float(R[-1])}, details=info)
    return ConditionVerdict(name, Verdict.INCONCLUSIVE, N, witness, details=info)


def check_snq(M: WeightSequence, N: int, protocol: TrendProtocol = DEFAULT_PROTOCOL) -> ConditionVerdict:
    """(snq): ``sup_p m_p sum_{q>=p} 1/((q+1) m_q)`` finite; ``B`` = that sup."""
    if N < 4:
        raise ValueError("check_snq needs N >= 4")
    smooth = None
    if M.smooth_log_m is not None:
        smooth = lambda x: -np.log(x + 1.0) - M.smooth_log_m(x)
    return _tail_sum_check(
        "snq", M, N,
        lambda q: -np.log(q + 1.0) - M.log_m(q),
        lambda p: M.log_m(p),
        smooth, protocol,
    )


def check_gamma_beta(M: WeightSequence, beta: float, N: int,
                     protocol: TrendProtocol = DEFAULT_PROTOCOL) -> ConditionVerdict:
    """(gamma_beta): ``sup_p m_p^{1/beta}/(p+1) sum_{l>=p} m_l^{-1/beta}`` finite; ``A`` = that sup."""
    if not beta > 0:
        raise ValueError("check_gamma_beta needs beta > 0")
    if N < 4:
        raise ValueError("check_gamma_beta needs N >= 4")
    inv = 1.0 / beta
    smooth = None
    if M.smooth_log_m is not None:
        smooth = lambda x: -inv * M.smooth_log_m(x)
    return _tail_sum_check(
        "gamma_beta", M, N,
        lambda q: -inv * M.log_m(q),
        lambda p: inv * M.log_m(p) - np.log(p + 1.0),
        smooth, protocol, {"beta": beta},
    )


# -- (beta_2) --------------------------------------------------------------


def _beta2_quantity(M: WeightSequence, k: int, p: np.ndarray) -> np.ndarray:
    return (M.log_M(k * p) - M.log_M(p)) / ((k - 1) * p) - M.log_m(k * p - 1)


def _extrapolate_in_k(v: list[float]) -> float:
    """Limit of a sequence sampled at geometric ``k``; ``-inf`` if it is not settling."""
    v1, v2, v3 = v
    d1, d2 = v1 - v2, v2 - v3
    if d2 <= 1e-12 * max(1.0, abs(v3)):
        return v3
    if d1 > 0 and d2 < d1:
        r = d2 / d1
        return v3 - d2 * r / (1.0 - r)
    return -math.inf


def check_beta2(M: WeightSequence, eps_grid=(0.5, 0.1, 0.01), k_max: int = 8, N: int = 10**4) -> ConditionVerdict:
    """(beta_2) with ``k`` bounded by ``k_max``.

    For each ``k`` the limsup in ``p`` of
    ``(M_{kp}/M_p)^{1/((k-1)p)} / m_{kp-1}`` is estimated by its max over
    the last quarter of ``p <= N/k_max``.  Holds when every ``eps`` is reached;
    Fails when some ``eps`` is missed and the trend of the estimate in ``k``
    (at ``k_max/4, k_max/2, k_max``) levels off above ``log eps``.
    """
    eps = sorted((float(e) for e in eps_grid), reverse=True)
    if not eps or eps[-1] <= 0:
        raise ValueError("eps_grid must be positive")
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    N = M.evaluable(N)
    hi = N // k_max
    if hi < 4:
        raise ValueError(f"check_beta2 needs N >= 4*k_max, got N={N}")
    p = np.arange(max(1, int(0.75 * hi)), hi + 1)
    G = {}
    for k in range(2, k_max + 1):
        vals = _beta2_quantity(M, k, p)
        G[k] = float(np.max(vals))
    achieved = {}
    for e in eps:
        ks = [k for k in G if G[k] <= math.log(e)]
        achieved[e] = ks[0] if ks else None
    details = {"log_limsup_by_k": {str(k): v for k, v in G.items()}, "k_for_eps": {str(e): k for e, k in achieved.items()},
               "k_max": k_max, "eps_grid": eps}
    if all(k is not None for k in achieved.values()):
        e = eps[-1]
        return ConditionVerdict("beta2", Verdict.HOLDS, N, {"index": achieved[e], "value": G[achieved[e]]},
                                details=details)
    missed = [e for e, k in achieved.items() if k is None]
    if k_max >= 4:
        ks = [max(2, k_max // 4), k_max // 2, k_max]
        limit = _extrapolate_in_k([G[k] for k in ks])
        details["extrapolated_log_limit"] = limit
        e = next((e for e in missed if limit > math.log(e)), None)
        if e is not None:
            kbest = min(G, key=G.get)
            return ConditionVerdict("beta2", Verdict.FAILS, N, {"index": kbest, "value": G[kbest], "eps": e},
                                    details=details)
    return ConditionVerdict("beta2", Verdict.INCONCLUSIVE, N, None, details=details)


# -- divergence conditions ------------------------------------------------------


def _liminf_verdict(name, x, N, protocol, extra=None):
    trend, info = liminf_trend(x, protocol)
    info.update(extra or {})
    if trend == "divergent":
        return ConditionVerdict(name, Verdict.HOLDS, N,
                                {"index": info["block_argmin"][-1], "value": info["block_minima"][-1]},
                                details=info)
    if trend == "bounded":
        return ConditionVerdict(name, Verdict.FAILS, N,
                                {"index": info["block_argmin"][-1], "value": info["block_minima"][-1],
                                 "indices": info["block_argmin"]},
                                details=info)
    return ConditionVerdict(name, Verdict.INCONCLUSIVE, N, None, details=info)


def check_beta2_zero(M: WeightSequence, k: int = 2, N: int = 10**4,
                     protocol: TrendProtocol = DEFAULT_PROTOCOL) -> ConditionVerdict:
    """``m_{kn}/m_n -> infinity`` via ``log m_{kn} - log m_n`` over ``n <= N/k``."""
    if k < 2:
        raise ValueError("check_beta2_zero needs k >= 2")
    N = M.evaluable(N + 1) - 1
    n = np.arange(N // k + 1)
    x = M.log_m(k * n) - M.log_m(n)
    return _liminf_verdict("beta2_zero", x, N, protocol, {"k": k})


def check_condition_vi(M: WeightSequence, N: int, protocol: TrendProtocol = DEFAULT_PROTOCOL) -> ConditionVerdict:
    """``m_n / M_n^{1/n} -> infinity`` via ``beta_n = log m_n - log M_n / n``."""
    if N < 2:
        raise ValueError("check_condition_vi needs N >= 2")
    N = M.evaluable(N + 1) - 1
    n = np.arange(1, N + 1)
    x = np.concatenate(([0.0], M.log_m(n) - M.log_M(n) / n))
    x[0] = x[1]
    return _liminf_verdict("condition_vi", x, N, protocol)


def check_sv_monotone(M: WeightSequence, r_max: int = 3, N: int = 10**4, min_witnesses: int = 5) -> ConditionVerdict:
    """Eventual strict increase of ``m_{n-1}/n^r`` for every integer ``r <= r_max``.

    A descent is an index ``n+1`` with ``c_{n+1} <= c_n`` where
    ``c_n = log m_{n-1} - r log n``; flat steps count as descents.  Fails needs
    ``min_witnesses`` descents with at least one in ``(N/2, N]``.
    """
    if r_max < 1:
        raise ValueError("check_sv_monotone needs r_max >= 1")
    N = M.evaluable(N)
    n = np.arange(1, N + 1)
    lm = M.log_m(n - 1)
    per_r = {}
    verdict = Verdict.HOLDS
    witness = None
    for r in range(1, r_max + 1):
        c = lm - r * np.log(n)
        desc = n[1:][c[1:] <= c[:-1]]
        # the upper half of the window always holds one index of each dyadic block
        late = desc[desc > N / 2]
        per_r[str(r)] = {"last_descent": int(desc[-1]) if len(desc) else None, "count": int(len(desc)),
                         "first": desc[:8].tolist(), "late": late[:8].tolist()}
        if len(late) and len(desc) >= min_witnesses:
            if verdict is not Verdict.FAILS:
                witness = {"index": int(late[0]), "r": r, "indices": desc[: max(min_witnesses, 8)].tolist()}
            verdict = Verdict.FAILS
        elif len(desc) and desc[-1] >= N / 2 and verdict is Verdict.HOLDS:
            verdict = Verdict.INCONCLUSIVE
    return ConditionVerdict("sv_monotone", verdict, N, witness, details={"per_r": per_r, "r_max": r_max})
