"""Estimators for the growth indices gamma(M), omega(M) and the Matuszewska
indices of the quotient sequence, plus checks of the Gamma-shift identities.

Infinite values are carried by ``IndexEstimate.infinite``; ``value`` is then
``math.inf`` and never a large sentinel float.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .conditions import check_gamma_beta
from .sequence import WeightSequence, gamma_scale, gamma_unscale
from .verdict import TailBoundError, Verdict, _jsonable

BETA_MAX = 64.0
BISECTION_WIDTH = 0.01
K_GRID = (2, 4, 8, 16)


@dataclass(frozen=True)
class IndexEstimate:
    index_id: str
    value: float
    infinite: bool
    window: tuple[int, ...]
    method: str
    spread: float
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.infinite and self.value != math.inf:
            raise ValueError("infinite estimates must carry value = inf")
        if not self.infinite and not (self.value >= 0 or math.isclose(self.value, 0.0, abs_tol=1e-9)):
            raise ValueError(f"index estimate must be >= 0, got {self.value}")

    def key(self) -> float:
        """Sort key placing infinite estimates above all finite ones."""
        return math.inf if self.infinite else self.value

    def to_dict(self) -> dict[str, Any]:
        return _jsonable({
            "index_id": self.index_id,
            "value": self.value,
            "infinite": self.infinite,
            "window": list(self.window),
            "method": self.method,
            "spread": self.spread,
            "metadata": self.metadata,
        })


def _finite(idx, value, window, method, spread, **meta) -> IndexEstimate:
    return IndexEstimate(idx, max(0.0, float(value)), False, tuple(window), method, float(spread), meta)


def _infinite(idx, window, method, **meta) -> IndexEstimate:
    return IndexEstimate(idx, math.inf, True, tuple(window), method, 0.0, meta)


# -- gamma --------------------------------------------------------------------


def _holds(M, beta, N, errors):
    try:
        return check_gamma_beta(M, beta, N).verdict is Verdict.HOLDS
    except TailBoundError as exc:
        errors.append({"beta": beta, "error": str(exc)})
        return False


def _bisect_gamma(M: WeightSequence, N: int) -> tuple[float, bool, list]:
    """Sup of the ``beta`` for which (gamma_beta) Holds at truncation ``N``."""
    errors: list = []
    if _holds(M, BETA_MAX, N, errors):
        return math.inf, True, errors
    lo, hi = 0.0, BETA_MAX
    while hi - lo > BISECTION_WIDTH:
        mid = 0.5 * (lo + hi)
        if _holds(M, mid, N, errors):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), False, errors


def slope_profile(M: WeightSequence, N: int, k_grid=K_GRID) -> dict[int, tuple[float, float]]:
    """Per-``k`` (liminf, limsup) of ``(log m_{kp} - log m_p) / log k`` over ``p in [N/(2k), N/k]``."""
    out = {}
    for k in k_grid:
        hi = N // k
        p = np.arange(max(1, hi // 2), hi + 1)
        s = (M.log_m(k * p) - M.log_m(p)) / math.log(k)
        out[k] = (float(np.min(s)), float(np.max(s)))
    return out


def _k_trend(values: list[float]) -> float:
    """Last-two-point geometric extrapolation over the k-grid, clipped to the observed range."""
    if len(values) < 3:
        return values[-1]
    d1, d2 = values[-2] - values[-3], values[-1] - values[-2]
    if d1 != 0 and 0 < d2 / d1 < 1:
        r = d2 / d1
        v = values[-1] + d2 * r / (1.0 - r)
    else:
        v = values[-1]
    return v


def estimate_gamma(M: WeightSequence, N: int) -> IndexEstimate:
    """gamma(M) by bisection on (gamma_beta) at ``N`` and ``N/2``.

    The slope estimator ``liminf_p (log m_{kp} - log m_p)/log k`` over the
    k-grid is recorded in the metadata as a cross-check.
    """
    if N < 16:
        raise ValueError("estimate_gamma needs N >= 16")
    v1, inf1, err1 = _bisect_gamma(M, N)
    slopes = slope_profile(M, N)
    meta = {
        "slope_liminf_by_k": {str(k): v[0] for k, v in slopes.items()},
        "slope_k_trend": _k_trend([slopes[k][0] for k in K_GRID]),
        "bisection_width": BISECTION_WIDTH,
        "beta_max": BETA_MAX,
    }
    if err1:
        meta["tail_errors"] = err1
    if inf1:
        return _infinite("gamma", (N,), "gamma_beta-bisection", **meta)
    v2, inf2, _ = _bisect_gamma(M, N // 2)
    spread = math.inf if inf2 else abs(v1 - v2)
    return _finite("gamma", v1, (N // 2, N), "gamma_beta-bisection", spread, **meta)


# -- omega ----------------------------------------------------------------------


def _omega_tail(M: WeightSequence, N: int) -> tuple[float, np.ndarray]:
    n = np.arange(max(2, N // 2), N + 1)
    r = M.log_m(n) / np.log(n)
    return float(np.min(r)), r


def _certified(M: WeightSequence, name: str, limit: int):
    known = M.known_indices.get(name)
    if known is None or known.certify is None:
        return None
    return known if known.certify(limit) else None


def estimate_omega(M: WeightSequence, N: int) -> IndexEstimate:
    """``liminf log m_n / log n`` from the tail minimum over ``[N/2, N]`` at ``N`` and ``2N``.

    A sequence carrying a verified construction certificate for omega
    reports the certified value.
    """
    if N < 4:
        raise ValueError("estimate_omega needs N >= 4")
    N2 = M.evaluable(2 * N)
    a, _ = _omega_tail(M, N)
    b, tail = _omega_tail(M, N2)
    cert = _certified(M, "omega", 10**6)
    if cert is not None and cert.value == math.inf:
        return _infinite("omega", (N, N2), "construction-certificate", provenance=cert.provenance,
                         window_value=b)
    if b > BETA_MAX and b >= a:
        return _infinite("omega", (N, N2), "tail-minimum", tail_minimum=b)
    return _finite("omega", b, (N, N2), "tail-minimum", abs(b - a))


# -- Matuszewska ----------------------------------------------------------------


def estimate_matuszewska(M: WeightSequence, N: int) -> tuple[IndexEstimate, IndexEstimate]:
    """(lower, upper) Matuszewska indices of the quotients.

    Lower: min over ``k`` of the tail-liminf slopes and their extrapolated
    k-trend.  Upper: max over ``k`` of the tail-limsup slopes and their trend.  Slopes beyond 64 are reported infinite; the
    upper index is also infinite whenever omega is certified infinite, since
    it dominates omega.
    """
    s1 = slope_profile(M, N)
    s2 = slope_profile(M, N // 2)

    def lower_of(s):
        lows = [s[k][0] for k in K_GRID]
        return min(min(lows), _k_trend(lows))

    def upper_of(s):
        highs = [s[k][1] for k in K_GRID]
        return max(max(highs), _k_trend(highs))

    lo1, lo2 = lower_of(s1), lower_of(s2)
    hi1, hi2 = upper_of(s1), upper_of(s2)
    meta = {"slopes_by_k": {str(k): list(v) for k, v in s1.items()}}
    window = (N // 2, N)
    if lo1 > BETA_MAX:
        lower = _infinite("matuszewska_lower", window, "k-slopes", **meta)
    else:
        lower = _finite("matuszewska_lower", lo1, window, "k-slopes", abs(lo1 - lo2), **meta)
    cert = _certified(M, "omega", 10**6)
    if cert is not None and cert.value == math.inf:
        upper = _infinite("matuszewska_upper", window, "dominates-certified-omega", window_value=hi1, **meta)
    elif hi1 > BETA_MAX:
        upper = _infinite("matuszewska_upper", window, "k-slopes", **meta)
    else:
        upper = _finite("matuszewska_upper", hi1, window, "k-slopes", abs(hi1 - hi2), **meta)
    return lower, upper


# -- shift identities -------------------------------------------------------------


def verify_shift_identities(M: WeightSequence, s_grid, N: int, tol: float = 0.1) -> dict[str, Any]:
    """Check ``gamma(M . L_s) = gamma(M) + s``, ``gamma(M / L_s) = gamma(M) - s`` and
    ``omega(M . L_s) = omega(M) + s`` for each ``s``.

    Division is only tested for ``s`` below the estimated ``gamma(M)``.
    """
    g0 = estimate_gamma(M, N)
    w0 = estimate_omega(M, N)
    rows = []
    ok = True
    for s in s_grid:
        row: dict[str, Any] = {"s": s}
        gp = estimate_gamma(gamma_scale(M, s), N)
        wp = estimate_omega(gamma_scale(M, s), N)
        row["gamma_times"] = gp.key()
        row["omega_times"] = wp.key()
        checks = [_shift_ok(gp, g0, s, tol), _shift_ok(wp, w0, s, tol)]
        if g0.infinite or s < g0.value:
            gm = estimate_gamma(gamma_unscale(M, s), N)
            row["gamma_divided"] = gm.key()
            checks.append(_shift_ok(gm, g0, -s, tol))
        row["ok"] = all(checks)
        ok &= row["ok"]
        rows.append(row)
    return _jsonable({"gamma": g0.key(), "omega": w0.key(), "tolerance": tol, "rows": rows, "ok": ok})


def _shift_ok(shifted: IndexEstimate, base: IndexEstimate, s: float, tol: float) -> bool:
    if base.infinite or shifted.infinite:
        return base.infinite and shifted.infinite
    return abs(shifted.value - base.value - s) <= tol


def index_chain(M: WeightSequence, N: int) -> dict[str, IndexEstimate]:
    """All four estimates for a sequence."""
    lower, upper = estimate_matuszewska(M, N)
    return {
        "gamma": estimate_gamma(M, N),
        "matuszewska_lower": lower,
        "omega": estimate_omega(M, N),
        "matuszewska_upper": upper,
    }
