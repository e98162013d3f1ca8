"""Weight sequences held in the natural-log domain.

A :class:`WeightSequence` is a lazily evaluated, memoized view of
``log M_p`` together with the log-quotients ``log m_p = log M_{p+1} - log M_p``.
Sequences are defined either by closed forms (vectorized functions of the
index) or by their quotients, in which case ``log M`` is the running sum of
``log m`` and the quotients are reproduced bit-for-bit.

Factorials and Gamma values always go through ``scipy.special.gammaln``; no
linear-domain products are ever formed.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy.special import gammaln

from .verdict import DEFAULT_PROTOCOL, ConditionVerdict, TrendProtocol, Verdict, sup_trend

ArrayFn = Callable[[np.ndarray], np.ndarray]

_MIN_CHUNK = 1024


@dataclass(frozen=True)
class KnownIndex:
    """Exact index value attached to a sequence, with provenance.

    ``certify(limit)`` optionally re-verifies the value from the sequence's
    construction up to index ``limit`` and returns ``True`` when it does.
    """

    value: float
    provenance: str
    certify: Callable[[int], bool] | None = None


class WeightSequence:
    """Log-domain sequence ``(M_p)`` with ``M_0 = 1``.

    ``smooth_log_m`` is an optional interpolant of ``log m`` valid for real
    arguments far beyond any evaluated index; tail sums use it when present.

    Parameters
    ----------
    log_M : callable, optional
        Vectorized closed form ``p -> log M_p``.
    log_m : callable or array, optional
        Vectorized closed form of the log-quotients, or an explicit finite
        array of them.  When given without ``log_M`` the sequence is
        quotient-defined.
    lc_guaranteed : bool
        The caller vouches for log-convexity (nondecreasing quotients).
    max_index : int, optional
        Largest index at which ``log M`` may be evaluated.
    """

    def __init__(
        self,
        log_M: ArrayFn | None = None,
        log_m: ArrayFn | Sequence[float] | np.ndarray | None = None,
        *,
        label: str = "custom",
        lc_guaranteed: bool = False,
        max_index: int | None = None,
        known_indices: dict[str, KnownIndex] | None = None,
        params: dict[str, Any] | None = None,
        smooth_log_m: ArrayFn | None = None,
    ):
        if log_M is None and log_m is None:
            raise ValueError("need a closed form for log M or for the log-quotients")
        self.label = label
        self.lc_guaranteed = bool(lc_guaranteed)
        self.known_indices: dict[str, KnownIndex] = dict(known_indices or {})
        self.params: dict[str, Any] = dict(params or {})
        # real-argument interpolant of log m, used to integrate far tails
        self.smooth_log_m = smooth_log_m
        self._lock = threading.RLock()
        self._log_M_fn = log_M
        self._explicit_m: np.ndarray | None = None
        self._log_m_fn: ArrayFn | None = None
        if log_m is not None and not callable(log_m):
            arr = np.array(log_m, dtype=float)
            if arr.ndim != 1 or len(arr) == 0:
                raise ValueError("explicit log-quotients must be a non-empty 1-d list")
            if not np.all(np.isfinite(arr)):
                raise ValueError("log-quotients must be finite")
            self._explicit_m = arr
            limit = len(arr)
            max_index = limit if max_index is None else min(max_index, limit)
        elif log_m is not None:
            self._log_m_fn = log_m
        self.max_index = max_index
        self.quotient_defined = log_M is None
        if log_M is not None:
            v0 = float(np.asarray(log_M(np.array([0])), dtype=float)[0])
            if v0 != 0.0:
                raise ValueError(f"log M_0 must be exactly 0 (M_0 = 1), got {v0!r}")
        self._M = np.zeros(1)
        self._m = np.zeros(0)

    def __repr__(self) -> str:
        return f"WeightSequence({self.label!r})"

    # -- evaluation -------------------------------------------------------

    def ensure(self, n: int) -> None:
        """Make ``log M_0..log M_n`` and ``log m_0..log m_{n-1}`` available."""
        n = int(n)
        if n < len(self._M):
            return
        if self.max_index is not None and n > self.max_index:
            raise IndexError(f"{self.label}: index {n} beyond defined range {self.max_index}")
        with self._lock:
            have = len(self._M) - 1
            if n <= have:
                return
            target = max(n, 2 * have, _MIN_CHUNK)
            if self.max_index is not None:
                target = min(target, self.max_index)
            self._extend(have, target)

    def _extend(self, have: int, target: int) -> None:
        new_m_idx = np.arange(have, target)
        if self.quotient_defined:
            if self._explicit_m is not None:
                lm = self._explicit_m[have:target]
            else:
                lm = np.asarray(self._log_m_fn(new_m_idx), dtype=float)
            _check_finite(lm, self.label)
            # sequential accumulation from the last value keeps the running
            # sum identical to a one-shot cumsum of the full quotient list
            lM = np.add.accumulate(np.concatenate(([self._M[-1]], lm)))[1:]
        else:
            lM = np.asarray(self._log_M_fn(np.arange(have + 1, target + 1)), dtype=float)
            _check_finite(lM, self.label)
            if self._log_m_fn is not None:
                lm = np.asarray(self._log_m_fn(new_m_idx), dtype=float)
                _check_finite(lm, self.label)
            else:
                lm = np.diff(np.concatenate(([self._M[-1]], lM)))
        self._M = np.concatenate((self._M, lM))
        self._m = np.concatenate((self._m, lm))

    def log_M(self, p):
        """``log M_p`` for an integer or integer array ``p``."""
        p_arr = np.asarray(p)
        self.ensure(int(p_arr.max()) if p_arr.size else 0)
        out = self._M[p_arr]
        return float(out) if out.ndim == 0 else out

    def log_m(self, p):
        """``log m_p`` for an integer or integer array ``p``."""
        p_arr = np.asarray(p)
        self.ensure((int(p_arr.max()) if p_arr.size else 0) + 1)
        out = self._m[p_arr]
        return float(out) if out.ndim == 0 else out

    def log_M_array(self, n: int) -> np.ndarray:
        """Read-only view of ``log M_0 .. log M_n``."""
        self.ensure(n)
        v = self._M[: n + 1]
        v.flags.writeable = False
        return v

    def log_m_array(self, n: int) -> np.ndarray:
        """Read-only view of ``log m_0 .. log m_n``."""
        self.ensure(n + 1)
        v = self._m[: n + 1]
        v.flags.writeable = False
        return v

    def quotients(self) -> "QuotientView":
        return QuotientView(self)

    def evaluable(self, n: int) -> int:
        """Largest index ``<= n`` at which ``log M`` can be evaluated."""
        return n if self.max_index is None else min(n, self.max_index)

    def looks_like_weight_sequence(self, n: int = 1024) -> bool:
        """Finite-window plausibility of (lc) with ``m_p -> infinity``."""
        n = self.evaluable(n) - 1
        lm = self.log_m_array(n)
        lc = bool(np.all(np.diff(lm) >= -1e-12 * np.maximum(1.0, np.abs(lm[1:]))))
        return lc and lm[-1] > lm[n // 2] + 1e-12


def _check_finite(values: np.ndarray, label: str) -> None:
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise ValueError(f"{label}: non-finite log value at chunk offset {bad}")


@dataclass(frozen=True)
class QuotientView:
    """Log-quotients of a parent sequence."""

    parent: WeightSequence

    def __call__(self, p):
        return self.parent.log_m(p)

    def array(self, n: int) -> np.ndarray:
        return self.parent.log_m_array(n)

    def reconstruct(self, n: int) -> np.ndarray:
        """``log M_0..log M_n`` rebuilt as running sums of the quotients."""
        lm = self.parent.log_m_array(n - 1) if n >= 1 else np.zeros(0)
        return np.add.accumulate(np.concatenate(([0.0], lm)))


# -- constructors --------------------------------------------------------


def make_sequence(
    log_M: ArrayFn | None = None,
    *,
    log_m: ArrayFn | Sequence[float] | np.ndarray | None = None,
    quotients: Sequence[float] | None = None,
    label: str = "custom",
    lc_guaranteed: bool | None = None,
    known_indices: dict[str, KnownIndex] | None = None,
    params: dict[str, Any] | None = None,
) -> WeightSequence:
    """Build a sequence from a closed form, log-quotients, or linear quotients.

    For explicit finite quotient lists, ``lc_guaranteed`` defaults to whether
    the list is nondecreasing.
    """
    if quotients is not None:
        q = np.asarray(quotients, dtype=float)
        if np.any(q <= 0) or not np.all(np.isfinite(q)):
            raise ValueError("quotients must be positive and finite")
        log_m = np.log(q)
    if lc_guaranteed is None:
        if log_m is not None and not callable(log_m):
            arr = np.asarray(log_m, dtype=float)
            lc_guaranteed = bool(np.all(np.diff(arr) >= 0))
        else:
            lc_guaranteed = False
    return WeightSequence(
        log_M,
        log_m,
        label=label,
        lc_guaranteed=lc_guaranteed,
        known_indices=known_indices,
        params=params,
    )


def gamma_sequence(s: float) -> WeightSequence:
    """``L_s = (Gamma(1 + s p))_p``."""
    if not s > 0:
        raise ValueError("gamma_seq requires s > 0")
    s = float(s)
    return WeightSequence(
        lambda p: gammaln(1.0 + s * p),
        lambda p: log_gamma_step(1.0 + s * p, s),
        label=f"gamma_seq({s:g})",
        lc_guaranteed=True,
        params={"alpha": s},
        smooth_log_m=lambda x: log_gamma_step(1.0 + s * x, s),
    )


def log_gamma_step(a, s):
    """``log Gamma(a + s) - log Gamma(a)`` for real ``a >= 1``, stable for huge ``a``."""
    a = np.asarray(a, dtype=float)
    small = a < 1e6
    out = np.empty_like(a)
    out[small] = gammaln(a[small] + s) - gammaln(a[small])
    big = a[~small]
    out[~small] = s * np.log(big) + s * (s - 1.0) / (2.0 * big)
    return out


def _log_factorial(p):
    return gammaln(p + 1.0)


def _combined(a: WeightSequence, b: WeightSequence, sign: float, label: str, lc: bool) -> WeightSequence:
    limit = None
    for s in (a, b):
        if s.max_index is not None:
            limit = s.max_index if limit is None else min(limit, s.max_index)
    smooth = None
    if a.smooth_log_m is not None and b.smooth_log_m is not None:
        smooth = lambda x: a.smooth_log_m(x) + sign * b.smooth_log_m(x)
    return WeightSequence(
        lambda p: a.log_M(p) + sign * b.log_M(p),
        lambda p: a.log_m(p) + sign * b.log_m(p),
        label=label,
        lc_guaranteed=lc,
        max_index=limit,
        smooth_log_m=smooth,
    )


def product(a: WeightSequence, b: WeightSequence) -> WeightSequence:
    """Pointwise product ``M . L``."""
    return _combined(a, b, 1.0, f"{a.label}*{b.label}", a.lc_guaranteed and b.lc_guaranteed)


def quotient(a: WeightSequence, b: WeightSequence) -> WeightSequence:
    """Pointwise quotient ``M / L`` (log-convexity is not inherited)."""
    return _combined(a, b, -1.0, f"{a.label}/{b.label}", False)


def factorial_lift(M: WeightSequence) -> WeightSequence:
    """``(p! M_p)_p``."""
    return WeightSequence(
        lambda p: _log_factorial(p) + M.log_M(p),
        lambda p: np.log(p + 1.0) + M.log_m(p),
        label=f"lift({M.label})",
        lc_guaranteed=M.lc_guaranteed,
        max_index=M.max_index,
        smooth_log_m=_shift_smooth(M, 1.0),
    )


def factorial_unlift(M: WeightSequence) -> WeightSequence:
    """``(M_p / p!)_p``, the exact inverse of :func:`factorial_lift`."""
    return WeightSequence(
        lambda p: M.log_M(p) - _log_factorial(p),
        lambda p: M.log_m(p) - np.log(p + 1.0),
        label=f"unlift({M.label})",
        lc_guaranteed=False,
        max_index=M.max_index,
        smooth_log_m=_shift_smooth(M, -1.0),
    )


def _shift_smooth(M: WeightSequence, sign: float):
    if M.smooth_log_m is None:
        return None
    return lambda x: M.smooth_log_m(x) + sign * np.log(x + 1.0)


def gamma_scale(M: WeightSequence, s: float) -> WeightSequence:
    """``M . L_s``: multiply every term by ``Gamma(1 + s p)``."""
    return product(M, gamma_sequence(s))


def gamma_unscale(M: WeightSequence, s: float) -> WeightSequence:
    """``M / L_s``."""
    return quotient(M, gamma_sequence(s))


_OPS = {
    "pointwise_product": lambda a, b, s: product(a, b),
    "pointwise_quotient": lambda a, b, s: quotient(a, b),
    "factorial_lift": lambda a, b, s: factorial_lift(a),
    "factorial_unlift": lambda a, b, s: factorial_unlift(a),
    "gamma_scale": lambda a, b, s: gamma_scale(a, s),
}


def combine(a: WeightSequence, b: WeightSequence | None, op: str, s: float | None = None) -> WeightSequence:
    """Dispatch on a combination name; ``b`` is ignored by the unary ops."""
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown combination {op!r}; expected one of {sorted(_OPS)}") from None
    if op in ("pointwise_product", "pointwise_quotient") and b is None:
        raise ValueError(f"{op} needs two operands")
    if op == "gamma_scale" and s is None:
        raise ValueError("gamma_scale needs s")
    return fn(a, b, s)


# -- equivalence ---------------------------------------------------------


def check_equivalence(
    a: WeightSequence,
    b: WeightSequence,
    mode: str = "approx",
    N: int = 1000,
    protocol: TrendProtocol = DEFAULT_PROTOCOL,
) -> ConditionVerdict:
    """Finite-window test of ``M ~ L`` (``approx``) or ``m ~ l`` (``strong``).

    ``approx`` tracks ``|log L_p - log M_p| / p``; ``strong`` tracks
    ``|log l_p - log m_p|``.  Both must stay bounded.
    """
    if N < 2:
        raise ValueError("equivalence check needs N >= 2")
    if mode == "approx":
        p = np.arange(1, N + 1)
        x = np.abs(b.log_M_array(N)[1:] - a.log_M_array(N)[1:]) / p
        x = np.concatenate(([0.0], x))
    elif mode == "strong":
        x = np.abs(b.log_m_array(N) - a.log_m_array(N))
    else:
        raise ValueError("mode must be 'approx' or 'strong'")
    trend, info = sup_trend(x, protocol)
    cond = "equivalence" if mode == "approx" else "strong_equivalence"
    if trend == "bounded":
        bound = math.exp(info["sup"])
        return ConditionVerdict(cond, Verdict.HOLDS, N, {"index": info["argmax"], "value": info["sup"]},
                                constant_estimate=bound, slack_constant=1.1 * bound, details=info)
    if trend == "divergent":
        return ConditionVerdict(cond, Verdict.FAILS, N, {"index": N, "value": float(x[-1])}, details=info)
    return ConditionVerdict(cond, Verdict.INCONCLUSIVE, N, {"index": info["argmax"], "value": info["sup"]},
                            details=info)


# -- log decomposition of the quotients ----------------------------------


def log_identity_check(M: WeightSequence, N: int) -> float:
    """Max residual of ``alpha_n = sum_{k<n} beta_k/(k+1) + beta_n`` for ``n <= N``.

    Here ``alpha_n = log m_n``, ``beta_0 = alpha_0`` and
    ``beta_n = log(m_n / M_n^{1/n})``.  Requires a log-convex sequence.
    """
    if not M.lc_guaranteed:
        raise ValueError(f"{M.label}: log decomposition requires an lc-guaranteed sequence")
    if N < 0:
        raise ValueError("N must be non-negative")
    alpha = M.log_m_array(N)
    lM = M.log_M_array(N)
    n = np.arange(N + 1)
    beta = np.empty(N + 1)
    beta[0] = alpha[0]
    beta[1:] = alpha[1:] - lM[1:] / n[1:]
    weighted = beta / (n + 1.0)
    # prefix sums over k < n
    prefix = np.concatenate(([0.0], np.add.accumulate(weighted)[:-1]))
    resid = np.abs(alpha - prefix - beta)
    return float(resid.max())


def root_bound_violation(M: WeightSequence, N: int) -> float:
    """Largest ``log M_p / p - log m_{p-1}`` over ``1 <= p <= N`` (<= 0 for lc)."""
    lM = M.log_M_array(N)
    lm = M.log_m_array(N - 1)
    p = np.arange(1, N + 1)
    return float(np.max(lM[1:] / p - lm))
