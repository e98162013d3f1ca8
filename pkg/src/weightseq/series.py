"""Truncated formal power series, weighted sup-norms and the formal
Laplace/Borel transforms of order ``alpha``.

Coefficients are stored either linearly (``encoding="linear"``) or as
``(log|a_p|, arg a_p)`` pairs (``encoding="log"``) when they leave double
range.  Norms are always computed from log magnitudes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn, gammaln

from .sequence import WeightSequence, gamma_scale


@dataclass(frozen=True)
class FormalSeries:
    """``sum_{p<=K} a_p z^p``."""

    coeffs: np.ndarray | None = None
    log_abs: np.ndarray | None = None
    phase: np.ndarray | None = None

    def __post_init__(self):
        if self.coeffs is not None:
            c = np.array(self.coeffs, dtype=complex)
            if c.ndim != 1 or len(c) == 0:
                raise ValueError("a series needs at least the coefficient a_0")
            if not np.all(np.isfinite(c)):
                raise ValueError("series coefficients must be finite")
            c.flags.writeable = False
            object.__setattr__(self, "coeffs", c)
        else:
            la = np.array(self.log_abs, dtype=float)
            ph = np.array(self.phase, dtype=float)
            if la.shape != ph.shape or la.ndim != 1 or len(la) == 0:
                raise ValueError("log-encoded series needs matching log_abs and phase arrays")
            if np.any(np.isnan(la)) or np.any(la == np.inf):
                raise ValueError("log magnitudes must be finite or -inf")
            object.__setattr__(self, "log_abs", la)
            object.__setattr__(self, "phase", ph)

    @classmethod
    def from_log(cls, log_abs, phase) -> "FormalSeries":
        return cls(None, np.asarray(log_abs, float), np.asarray(phase, float))

    @property
    def encoding(self) -> str:
        return "linear" if self.coeffs is not None else "log"

    @property
    def K(self) -> int:
        return len(self) - 1

    def __len__(self) -> int:
        return len(self.coeffs if self.coeffs is not None else self.log_abs)

    def log_magnitudes(self) -> tuple[np.ndarray, np.ndarray]:
        if self.coeffs is None:
            return self.log_abs, self.phase
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.coeffs)), np.angle(self.coeffs)

    def to_linear(self) -> np.ndarray:
        """Linear coefficients; raises ``OverflowError`` if any is out of range."""
        if self.coeffs is not None:
            return self.coeffs
        if np.any(self.log_abs > 709.7):
            raise OverflowError("coefficients exceed double range")
        return np.exp(self.log_abs) * np.exp(1j * self.phase)

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        if len(self) != len(other):
            raise ValueError("series truncations differ")
        return FormalSeries(self.to_linear() + other.to_linear())

    def scale(self, c: complex) -> "FormalSeries":
        if self.coeffs is not None:
            return FormalSeries(self.coeffs * c)
        la, ph = self.log_abs, self.phase
        with np.errstate(divide="ignore"):
            return FormalSeries.from_log(la + math.log(abs(c)) if c != 0 else np.full_like(la, -np.inf),
                                         ph + np.angle(c))

    def evaluate(self, z, order: int | None = None):
        """Partial sum ``sum_{n<order} a_n z^n`` (all terms when ``order`` is None)."""
        a = self.to_linear()
        if order is not None:
            a = a[:order]
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in a[::-1]:
            out = out * z + c
        return out

    def to_records(self) -> dict:
        if self.coeffs is not None:
            return {"encoding": "linear", "coefficients": [[float(c.real), float(c.imag)] for c in self.coeffs]}
        la = ["-inf" if np.isneginf(x) else float(x) for x in self.log_abs]
        return {"encoding": "log", "coefficients": [[a, float(b)] for a, b in zip(la, self.phase)]}

    @classmethod
    def from_records(cls, rec: dict) -> "FormalSeries":
        enc = rec.get("encoding", "linear")
        pairs = rec["coefficients"]
        if enc == "linear":
            return cls(np.array([complex(float(a), float(b)) for a, b in pairs]))
        if enc == "log":
            la = np.array([-np.inf if a == "-inf" else float(a) for a, _ in pairs])
            return cls.from_log(la, np.array([float(b) for _, b in pairs]))
        raise ValueError(f"unknown series encoding {enc!r}")


def _rescale(f: FormalSeries, alpha: float, sign: int) -> FormalSeries:
    if not alpha > 0:
        raise ValueError("transform order alpha must be positive")
    p = np.arange(len(f))
    lg = gammaln(1.0 + alpha * p)
    if f.coeffs is not None:
        g = gamma_fn(1.0 + alpha * p)
        if np.all(np.isfinite(g)):
            # complex / real through numpy promotes to complex division, which is inexact
            out = f.coeffs * g if sign > 0 else (f.coeffs.real / g) + 1j * (f.coeffs.imag / g)
            if np.all(np.isfinite(out)):
                return FormalSeries(out)
    la, ph = f.log_magnitudes()
    return FormalSeries.from_log(la + sign * lg, ph)


def formal_laplace(f: FormalSeries, alpha: float) -> FormalSeries:
    """``a_p -> Gamma(1 + alpha p) a_p``; falls back to log records on overflow."""
    return _rescale(f, alpha, +1)


def formal_borel(f: FormalSeries, alpha: float) -> FormalSeries:
    """``a_p -> a_p / Gamma(1 + alpha p)``."""
    out = _rescale(f, alpha, -1)
    if out.encoding == "log" and np.all(out.log_abs <= 709.0):
        return FormalSeries(out.to_linear())
    return out


@dataclass(frozen=True)
class WeightedNorm:
    """``|f|_{M,A} = sup_p |a_p| / (A^p M_p)``."""

    M: WeightSequence
    A: float

    def __post_init__(self):
        if not self.A > 0:
            raise ValueError("norm type A must be positive")

    def log_weights(self, K: int) -> np.ndarray:
        return np.arange(K + 1) * math.log(self.A) + self.M.log_M_array(K)


def log_norm(f: FormalSeries, w: WeightedNorm) -> float:
    la, _ = f.log_magnitudes()
    return float(np.max(la - w.log_weights(f.K)))


def norm(f: FormalSeries, w: WeightedNorm) -> float:
    return math.exp(log_norm(f, w))


def norm_isomorphism_check(f: FormalSeries, M: WeightSequence, A: float, alpha: float,
                           rtol: float = 1e-10) -> dict:
    """Compare ``|L_alpha f|_{M.L_alpha, A}`` with ``|f|_{M, A}``."""
    before = log_norm(f, WeightedNorm(M, A))
    after = log_norm(formal_laplace(f, alpha), WeightedNorm(gamma_scale(M, alpha), A))
    rel = abs(math.expm1(after - before)) if np.isfinite(before) else (0.0 if before == after else math.inf)
    return {"norm": math.exp(before), "transformed_norm": math.exp(after), "relative_difference": rel,
            "ok": rel <= rtol}
