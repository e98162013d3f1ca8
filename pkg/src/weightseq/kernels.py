"""Kernels e_alpha, m_alpha, E_alpha and the integral alpha-Laplace/alpha-Borel
transforms.

Points of the Riemann surface of the logarithm are passed as
``(modulus, argument)`` pairs; arguments are never reduced modulo 2*pi.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np
from scipy.special import gammaln, loggamma, wofz

from .quadrature import QuadResult, integrate
from .verdict import NumericalFailure

ML_RTOL = 1e-11
BOREL_MAX_RELATIVE_ERROR = 1e-2
_EPS = np.finfo(float).eps


class DomainError(ValueError):
    """A point or parameter lies outside the region where an operation is defined."""


class AccuracyError(NumericalFailure):
    """No evaluation regime certified the requested accuracy."""


class TruncationError(NumericalFailure):
    """The growth hint does not allow a finite truncation of a ray integral."""


class KernelOverflowError(NumericalFailure):
    """E_alpha along a Borel path exceeds double range."""


# -- geometry -----------------------------------------------------------------


@dataclass(frozen=True)
class Sector:
    """Sector of opening ``opening * pi`` bisected by ``direction``; ``radius=inf`` when unbounded."""

    direction: float
    opening: float
    radius: float = math.inf

    def __post_init__(self):
        if not self.opening > 0:
            raise DomainError("sector opening factor must be positive")
        if not self.radius > 0:
            raise DomainError("sector radius must be positive")

    @property
    def half_angle(self) -> float:
        return 0.5 * self.opening * math.pi

    def contains(self, modulus, argument) -> np.ndarray:
        modulus, argument = np.asarray(modulus, float), np.asarray(argument, float)
        return (modulus > 0) & (modulus < self.radius) & (np.abs(argument - self.direction) < self.half_angle)

    def contains_direction(self, argument: float) -> bool:
        return abs(argument - self.direction) < self.half_angle

    def to_dict(self) -> dict:
        return {"direction": self.direction, "opening": self.opening,
                "radius": "inf" if math.isinf(self.radius) else self.radius}


@dataclass(frozen=True)
class GrowthHint:
    """``|f(u)| <= constant * (1 + |u|)**power * exp(type * |u|**order)`` on the domain."""

    constant: float = 1.0
    power: float = 0.0
    order: float = 0.0
    type: float = 0.0

    def log_bound(self, t):
        t = np.asarray(t, float)
        return math.log(self.constant) + self.power * np.log1p(t) + self.type * t ** self.order


@dataclass(frozen=True)
class SampledFunction:
    """A function on the Riemann surface given by a vectorized evaluator ``(modulus, argument) -> complex``."""

    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    domain: Sector
    growth_hint: GrowthHint | None = None
    label: str = "custom"

    def __call__(self, modulus, argument) -> np.ndarray:
        modulus = np.asarray(modulus, float)
        argument = np.broadcast_to(np.asarray(argument, float), modulus.shape)
        return np.asarray(self.evaluator(modulus, argument), dtype=complex)

    def at(self, z: complex) -> complex:
        return complex(self(np.array([abs(z)]), np.array([np.angle(z)]))[0])


@dataclass(frozen=True)
class BorelPath:
    """Segment from 0 to ``arc_radius*e^{i(tau+h)}``, arc back to ``tau-h``, segment to 0,
    with ``h = alpha*(pi+epsilon)/2``."""

    direction: float
    order: float
    arc_radius: float
    epsilon: float = 0.5

    def __post_init__(self):
        if not self.arc_radius > 0:
            raise DomainError("arc radius must be positive")
        if not 0 < self.epsilon < math.pi:
            raise DomainError("epsilon must lie in (0, pi)")
        if not 0 < self.order < 2:
            raise DomainError("Borel transform order must lie in (0, 2)")

    @property
    def half_angle(self) -> float:
        return 0.5 * self.order * (math.pi + self.epsilon)

    @property
    def segment_directions(self) -> tuple[float, float]:
        return self.direction + self.half_angle, self.direction - self.half_angle

    @property
    def admissible_half_width(self) -> float:
        """Directions of ``u`` within this distance of ``direction`` keep E_alpha(u/z) decaying at 0."""
        return 0.5 * self.order * self.epsilon


# -- kernels ------------------------------------------------------------------


def _check_order(alpha: float) -> None:
    if not 0 < alpha < 2:
        raise DomainError("kernel order alpha must lie in (0, 2)")


def kernel_e(alpha: float, modulus, argument=0.0):
    """``e_alpha(z) = (1/alpha) z^{1/alpha} exp(-z^{1/alpha})`` for ``|arg z| < alpha*pi/2``."""
    _check_order(alpha)
    modulus = np.asarray(modulus, float)
    argument = np.asarray(argument, float)
    if np.any(np.abs(argument) >= 0.5 * alpha * math.pi) or np.any(modulus < 0):
        raise DomainError("e_alpha is only defined on the sector |arg z| < alpha*pi/2")
    w = modulus ** (1.0 / alpha) * np.exp(1j * argument / alpha)
    out = w * np.exp(-w) / alpha
    return out[()] if out.ndim == 0 else out


def kernel_moment(alpha: float, lam):
    """``m_alpha(lambda) = Gamma(1 + alpha*lambda)`` through log-gamma."""
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    lam_arr = np.asarray(lam)
    if np.any(np.real(lam_arr) < 0):
        raise DomainError("moment function needs Re(lambda) >= 0")
    if np.iscomplexobj(lam_arr):
        out = np.exp(loggamma(1.0 + alpha * lam_arr))
    else:
        out = np.exp(gammaln(1.0 + alpha * lam_arr.astype(float)))
    return out[()] if np.ndim(out) == 0 else out


def moment_integral(alpha: float, lam: float, rtol: float = 1e-12) -> QuadResult:
    """Quadrature of ``int_0^inf e_alpha(t) t^{lambda-1} dt`` after ``t = s^alpha``.

    The integrand becomes ``s^{alpha*lambda} e^{-s}``; the ray is cut where the
    remaining tail is below ``rtol`` of the value.
    """
    _check_order(alpha)
    if lam < 0:
        raise DomainError("moment integral needs lambda >= 0")
    a = alpha * lam
    # tail int_S^inf s^a e^{-s} ds <= 2 S^a e^{-S} once S > 2a
    S = max(4.0, 2.0 * a + 2.0)
    target = math.log(rtol) + gammaln(1.0 + a)
    while a * math.log(S) - S + math.log(2.0) > target:
        S *= 1.25
    return integrate(lambda s: s ** a * np.exp(-s), 0.0, S, rtol=rtol * 0.1, breakpoints=(1.0, 2 * a + 1))


# -- Mittag-Leffler -------------------------------------------------------------


def _series(alpha: float, w: np.ndarray):
    """Taylor series in log-magnitude arithmetic; returns (value, error estimate)."""
    r = np.abs(w)
    theta = np.angle(w)
    rmax = float(np.max(r)) if r.size else 0.0
    n_peak = rmax ** (1.0 / alpha) / alpha if rmax > 0 else 0.0
    n_terms = 8
    lr = math.log(rmax) if rmax > 0 else -math.inf
    while n_terms < 20000:
        last = n_terms * lr - gammaln(1 + alpha * n_terms)
        if n_terms > n_peak and last < -40 + min(0.0, -rmax):
            break
        n_terms = int(n_terms * 1.5) + 4
    n = np.arange(n_terms, dtype=float)
    lg = gammaln(1.0 + alpha * n)
    with np.errstate(divide="ignore", invalid="ignore"):
        logr = np.log(r)[:, None]
        logt = np.where(n[None, :] == 0, 0.0, n[None, :] * logr - lg[None, :])
    mag = np.exp(logt)
    terms = mag * np.exp(1j * n[None, :] * theta[:, None])
    value = terms.sum(axis=1)
    absr = np.where(np.isfinite(logr[:, 0]), np.abs(logr[:, 0]), 0.0)
    rel = 2.0 + n[None, :] * (absr[:, None] + np.abs(theta)[:, None]) + np.abs(lg)[None, :]
    err = _EPS * (mag * rel).sum(axis=1) + _EPS * math.log2(n_terms) * mag.sum(axis=1) + 2.0 * mag[:, -1]
    return value, err


def _inv_gamma_one_minus(x: np.ndarray):
    """``1/Gamma(1-x)`` for ``x > 0`` as (log magnitude, sign); zero at integers."""
    frac = x - 2.0 * np.round(0.5 * x)
    s = np.sin(np.pi * frac)
    s = np.where(x == np.round(x), 0.0, s)
    with np.errstate(divide="ignore"):
        return gammaln(x) + np.log(np.abs(s)) - math.log(math.pi), np.sign(s)


def _asymptotic(alpha: float, w: np.ndarray):
    """Exponential branches plus the algebraic expansion with optimal truncation."""
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return _asymptotic_terms(alpha, w)


def _asymptotic_terms(alpha: float, w: np.ndarray):
    r = np.abs(w)
    theta = np.angle(w)
    value = np.zeros(w.shape, complex)
    err = np.zeros(w.shape)
    rho = r ** (1.0 / alpha)
    for m in (-1, 0, 1):
        phi = theta + 2 * math.pi * m
        on = np.abs(phi) < alpha * math.pi
        zeta = rho * np.exp(1j * phi / alpha)
        branch = np.where(on, np.exp(np.where(on, zeta, 0.0)) / alpha, 0.0)
        value += branch
        # branches past the anti-Stokes line are only determined up to their size
        stokes = on & (np.abs(phi / alpha) > 0.5 * math.pi)
        err += np.where(stokes, np.abs(branch), 0.0)
    k = np.arange(1, 401, dtype=float)
    env = gammaln(alpha * k)[None, :] - math.log(math.pi) - k[None, :] * np.log(r)[:, None]
    kbest = np.argmin(env, axis=1)
    logc, sgn = _inv_gamma_one_minus(alpha * k)
    terms = sgn[None, :] * np.exp(logc[None, :] - k[None, :] * np.log(r)[:, None]) \
        * np.exp(-1j * k[None, :] * theta[:, None])
    mask = np.arange(len(k))[None, :] < kbest[:, None]
    value -= np.where(mask, terms, 0.0).sum(axis=1)
    err += np.exp(env[np.arange(len(r)), kbest]) + _EPS * np.abs(value)
    return value, err


@functools.lru_cache(maxsize=64)
def _mp_coefficients(alpha: float, dps: int, n_terms: int) -> tuple:
    with mpmath.workdps(dps):
        a = mpmath.mpf(alpha)
        return tuple(1 / mpmath.gamma(1 + a * n) for n in range(n_terms))


def _mp_series(alpha: float, z: complex) -> complex:
    """Taylor series by Horner's rule at a precision covering the worst cancellation."""
    r = abs(z)
    growth = r ** (1.0 / alpha) if r > 0 else 0.0
    if growth > 5000:
        raise AccuracyError(f"Mittag-Leffler E_{alpha}({z}) out of reach of every regime")
    # the sum can be exp(-growth) while its largest term is exp(growth)
    dps = 10 * math.ceil((30 + 2 * growth / math.log(10)) / 10)
    cut = -dps * math.log(10)
    n = max(8, int(growth / alpha) + 2)
    lr = math.log(r) if r > 0 else -math.inf
    while n * lr - gammaln(1 + alpha * n) > cut:
        n += 8
    n = 16 * math.ceil(n / 16)
    coeffs = _mp_coefficients(float(alpha), dps, n)
    with mpmath.workdps(dps):
        zz = mpmath.mpc(z)
        total = mpmath.mpc(0)
        for c in reversed(coeffs):
            total = total * zz + c
        return complex(total)


def _ml_general(alpha: float, z: np.ndarray, rtol: float = ML_RTOL):
    """Series, then asymptotic form, then extended-precision series; returns (value, regime codes)."""
    z = np.asarray(z, complex).ravel()
    out = np.empty(z.shape, complex)
    regime = np.zeros(z.shape, np.int8)
    todo = np.ones(z.shape, bool)
    small = np.abs(z) ** (1.0 / alpha) <= 60.0
    if np.any(small):
        idx = np.flatnonzero(small)
        v, e = _series(alpha, z[idx])
        ok = e <= rtol * np.abs(v)
        out[idx[ok]] = v[ok]
        regime[idx[ok]] = 1
        todo[idx[ok]] = False
    big = todo & (np.abs(z) > 0.5)
    if np.any(big):
        idx = np.flatnonzero(big)
        v, e = _asymptotic(alpha, z[idx])
        ok = np.isfinite(v) & (e <= rtol * np.abs(v))
        out[idx[ok]] = v[ok]
        regime[idx[ok]] = 2
        todo[idx[ok]] = False
    for i in np.flatnonzero(todo):
        out[i] = _mp_series(alpha, complex(z[i]))
        regime[i] = 3
    return out, regime


def mittag_leffler(alpha: float, z):
    """``E_alpha(z) = sum_n z^n / Gamma(1 + alpha n)`` for ``alpha > 0``.

    Closed forms are used for alpha in {1/2, 1, 2}; otherwise the certified
    regime chain of :func:`_ml_general`.  Raises :class:`AccuracyError` if no
    regime reaches relative accuracy 1e-10.
    """
    if not alpha > 0:
        raise DomainError("Mittag-Leffler order must be positive")
    z_arr = np.asarray(z, dtype=complex)
    flat = z_arr.ravel()
    if alpha == 1.0:
        out = np.exp(flat)
    elif alpha == 0.5:
        out = wofz(-1j * flat)  # exp(z^2) erfc(-z)
    elif alpha == 2.0:
        out = np.cosh(np.sqrt(flat))
    elif alpha > 2.0:
        out = np.array([_mp_series(alpha, complex(x)) for x in flat], complex)
    else:
        out, _ = _ml_general(alpha, flat)
    out = out.reshape(z_arr.shape)
    return complex(out) if out.ndim == 0 else out


# -- transforms -------------------------------------------------------------------


@dataclass(frozen=True)
class TransformResult:
    value: complex
    error: float
    truncation: float | None
    evaluations: int
    details: dict

    def __complex__(self) -> complex:
        return self.value

    def to_dict(self) -> dict:
        return {"re": self.value.real, "im": self.value.imag, "error": self.error,
                "truncation": self.truncation, "evaluations": self.evaluations, **self.details}


def laplace_transform(f: SampledFunction, alpha: float, tau: float, z: complex, *,
                      z_argument: float | None = None, rtol: float = 1e-12,
                      max_doublings: int = 60) -> TransformResult:
    """``int_0^{inf(tau)} e_alpha(u/z) f(u) du/u`` along ``u = t e^{i tau}``.

    ``z_argument`` gives ``arg z`` on the Riemann surface; by default the
    principal argument.  The ray is integrated in ``s = t^{1/alpha}`` and
    extended by doubling until the growth-hint tail bound drops below
    ``rtol`` of the accumulated value.
    """
    _check_order(alpha)
    if f.growth_hint is None:
        raise TruncationError("laplace_transform needs a growth hint to truncate the ray")
    if not f.domain.contains_direction(tau):
        raise DomainError("direction tau lies outside the function's domain")
    if abs(z) == 0:
        raise DomainError("z must be non-zero")
    theta = float(np.angle(z)) if z_argument is None else float(z_argument)
    if abs(theta - tau) >= 0.5 * alpha * math.pi:
        raise DomainError("|arg z - tau| must be below alpha*pi/2")
    rho = abs(z) ** (1.0 / alpha)
    phi = (tau - theta) / alpha
    rate = math.cos(phi) / rho
    hint = f.growth_hint
    if hint.order > 1.0 / alpha or (hint.order == 1.0 / alpha and hint.type >= rate):
        raise TruncationError("growth hint exceeds the decay of the Laplace kernel")
    if f.domain.radius < math.inf:
        raise TruncationError("Laplace transform needs f on an unbounded sector")
    phase = np.exp(1j * phi) / rho

    def integrand(s):
        t = s ** alpha
        return phase * np.exp(-s * phase) * f(t, np.full_like(t, tau))

    def log_tail(S):
        # tail of the bound |integrand| <= exp(-rate s + log_bound(s^alpha)) / rho
        g = lambda s: -rate * s + float(hint.log_bound(s ** alpha)) - math.log(rho)
        h = 1e-6 * S
        slope = (g(S + h) - g(S - h)) / (2 * h)
        if slope >= 0:
            return math.inf
        return g(S) - math.log(-slope)

    S = 30.0 / rate
    res = integrate(integrand, 0.0, S, rtol=rtol * 0.1)
    value, error, evals = res.value, res.error, res.evaluations
    converged = res.converged
    for _ in range(max_doublings):
        lt = log_tail(S)
        if lt < math.log(rtol) + math.log(max(abs(value), 1e-300)):
            return TransformResult(complex(value), float(error + math.exp(lt)), S ** alpha, evals,
                                   {"converged": converged})
        seg = integrate(integrand, S, 2 * S, rtol=rtol * 0.1, atol=rtol * 0.1 * abs(value))
        value += seg.value
        error += seg.error
        evals += seg.evaluations
        converged &= seg.converged
        S *= 2
    raise TruncationError("ray truncation did not reach the tail tolerance")


def borel_transform(f: SampledFunction, alpha: float, tau: float, path: BorelPath, u: complex, *,
                    u_argument: float | None = None, rtol: float = 1e-11) -> TransformResult:
    """``-(1/2 pi i) int_{delta} E_alpha(u/z) f(z) dz/z`` over the segment-arc-segment path."""
    _check_order(alpha)
    if path.order != alpha or path.direction != tau:
        raise DomainError("Borel path was built for a different order or direction")
    dom = f.domain
    up, down = path.segment_directions
    if not (dom.contains_direction(up) and dom.contains_direction(down)):
        raise DomainError("Borel path leaves the function's sector")
    if not path.arc_radius < dom.radius:
        raise DomainError("arc radius must be below the sector radius")
    if u == 0:
        return TransformResult(_value_at_zero(f), 0.0, None, 0, {})
    arg_u = float(np.angle(u)) if u_argument is None else float(u_argument)
    if abs(arg_u - tau) >= path.admissible_half_width:
        raise DomainError("arg u must lie within alpha*epsilon/2 of tau")
    log_peak = (abs(u) / path.arc_radius) ** (1.0 / alpha)
    if log_peak > 700:
        raise KernelOverflowError("E_alpha(u/z) exceeds double range on the arc")
    R = path.arc_radius
    abs_u = abs(u)

    def kernel(mod, arg):
        w = (abs_u / mod) * np.exp(1j * (arg_u - arg))
        return mittag_leffler(alpha, w)

    def seg(direction):
        def g(r):
            return kernel(r, direction) * f(r, np.full_like(r, direction)) / r
        return g

    def arc(theta):
        rr = np.full_like(theta, R)
        return 1j * kernel(rr, theta) * f(rr, theta)

    scale = math.exp(log_peak)
    legs = [integrate(seg(up), 0.0, R, rtol=rtol, atol=rtol * 1e-3),
            integrate(arc, down, up, rtol=rtol, atol=rtol * 1e-3 * scale),
            integrate(seg(down), 0.0, R, rtol=rtol, atol=rtol * 1e-3)]
    # outgoing segment, arc traversed from up to down, incoming segment
    total = legs[0].value - legs[1].value - legs[2].value
    value = -total / (2j * math.pi)
    err = sum(l.error for l in legs) / (2 * math.pi)
    if err > BOREL_MAX_RELATIVE_ERROR * abs(value):
        # the arc carries exp(log_peak) and the legs cancel down to |value|
        raise AccuracyError(f"Borel transform at u={u} lost its digits to cancellation "
                            f"(error {err:.1e} vs value {abs(value):.1e}); enlarge the arc radius")
    return TransformResult(complex(value), float(err), R, sum(l.evaluations for l in legs),
                           {"converged": all(l.converged for l in legs),
                            "admissible_half_width": path.admissible_half_width,
                            "kernel_log_peak": log_peak})


def _value_at_zero(f: SampledFunction) -> complex:
    # B_alpha f(0) is the limit of f at 0; sample it just inside the sector
    return complex(f(np.array([1e-300]), np.array([f.domain.direction]))[0])


# -- builtin functions ---------------------------------------------------------------


def monomial(p: int, opening: float = 4.0) -> SampledFunction:
    """``u^p`` on an unbounded sector."""
    if p < 0:
        raise DomainError("monomial degree must be non-negative")
    return SampledFunction(lambda m, a: m ** p * np.exp(1j * p * a), Sector(0.0, opening),
                           GrowthHint(1.0, float(p)), label=f"monomial({p})")


def inverse_one_plus(opening: float = 1.8) -> SampledFunction:
    """``1/(1+z)`` on the sector ``|arg z| < opening*pi/2`` (needs ``opening < 2``)."""
    if not opening < 2:
        raise DomainError("1/(1+z) needs an opening below 2 to avoid the pole")
    return SampledFunction(lambda m, a: 1.0 / (1.0 + m * np.exp(1j * a)), Sector(0.0, opening),
                           GrowthHint(1.0 / math.cos(0.5 * opening * math.pi - 0.5 * math.pi)
                                      if opening > 1 else 1.0), label="inverse_one_plus")


def exponential_decay(opening: float = 0.9) -> SampledFunction:
    """``exp(-z)`` on ``|arg z| < opening*pi/2`` (bounded there when ``opening < 1``)."""
    return SampledFunction(lambda m, a: np.exp(-m * np.exp(1j * a)), Sector(0.0, opening),
                           GrowthHint(1.0), label="exponential_decay")


def mittag_leffler_negative(alpha: float, opening: float = 0.5) -> SampledFunction:
    """``E_alpha(-u)``, the alpha-Borel transform of ``1/(1+z)``; bounded near the positive axis."""
    return SampledFunction(lambda m, a: mittag_leffler(alpha, -m * np.exp(1j * a)),
                           Sector(0.0, opening), GrowthHint(2.0),
                           label=f"mittag_leffler_negative({alpha})")


BUILTIN_FUNCTIONS = {
    "monomial": monomial,
    "inverse_one_plus": inverse_one_plus,
    "exponential_decay": exponential_decay,
    "mittag_leffler_negative": mittag_leffler_negative,
}


def builtin_function(name: str, **params) -> SampledFunction:
    try:
        maker = BUILTIN_FUNCTIONS[name]
    except KeyError:
        raise DomainError(f"unknown builtin function {name!r}; choose from {sorted(BUILTIN_FUNCTIONS)}") from None
    return maker(**params)
