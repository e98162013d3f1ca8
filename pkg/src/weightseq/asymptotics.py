"""Grid verification of uniform asymptotic expansions
``|f(z) - sum_{n<p} a_n z^n| <= C A^p M_p |z|^p`` and fitting of (C, A).

Verification is one-sided: Holds means no cell of the grid violates the
inequality.  Remainders are measured against the rounding floor of the
partial sums, so a reported violation is a certain one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .kernels import Sector, SampledFunction
from .sequence import WeightSequence
from .series import FormalSeries
from .verdict import NumericalFailure, Verdict, _jsonable

_EPS = np.finfo(float).eps


class NoFiniteFit(ValueError):
    """The remainder ratios grow faster than any geometric rate in ``p``."""


@dataclass(frozen=True)
class GridSpec:
    """Log-radial x angular grid inside a sector.

    Radii are ``top * 10**(-j/per_decade)`` for ``j = 1..per_decade*decades``;
    angles are equispaced between the two edges moved inwards by ``inset``.
    ``top`` defaults to the sector radius, or 1 for unbounded sectors.
    """

    max_order: int
    per_decade: int = 32
    decades: int = 3
    angles: int = 17
    inset: float = 1e-3
    top: float | None = None

    def __post_init__(self):
        if self.max_order < 0 or self.per_decade < 1 or self.decades < 1 or self.angles < 1:
            raise ValueError("grid sizes must be positive and max_order non-negative")

    def points(self, sector: Sector) -> tuple[np.ndarray, np.ndarray]:
        top = self.top if self.top is not None else (1.0 if math.isinf(sector.radius) else sector.radius)
        if top > sector.radius:
            raise ValueError("grid top radius lies outside the sector")
        j = np.arange(1, self.per_decade * self.decades + 1)
        radii = top * 10.0 ** (-j / self.per_decade)
        h = sector.half_angle - self.inset
        if h <= 0:
            raise ValueError("sector too narrow for the edge inset")
        angles = np.linspace(sector.direction - h, sector.direction + h, self.angles) if self.angles > 1 \
            else np.array([sector.direction])
        R, T = np.meshgrid(radii, angles, indexing="ij")
        return R.ravel(), T.ravel()

    def to_dict(self) -> dict:
        return {"max_order": self.max_order, "per_decade": self.per_decade, "decades": self.decades,
                "angles": self.angles, "inset": self.inset, "top": self.top}


@dataclass(frozen=True)
class AsymptoticClaim:
    f: SampledFunction
    series: FormalSeries
    M: WeightSequence
    C: float
    A: float
    sector: Sector

    def __post_init__(self):
        if not (self.C > 0 and self.A > 0):
            raise ValueError("constants C and A must be positive")
        dom = self.f.domain
        inside = (self.sector.radius <= dom.radius
                  and abs(self.sector.direction - dom.direction) + self.sector.half_angle <= dom.half_angle + 1e-12)
        if not inside:
            raise ValueError("claim sector is not contained in the function's domain")


@dataclass(frozen=True)
class ExpansionVerdict:
    verdict: Verdict
    worst_ratio: float
    worst_point: tuple[float, float] | None
    worst_order: int | None
    grid: dict
    unresolved_cells: int
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    def to_dict(self) -> dict:
        mod_arg = None if self.worst_point is None else {"modulus": self.worst_point[0],
                                                         "argument": self.worst_point[1]}
        return _jsonable({"verdict": self.verdict.value, "worst_ratio": self.worst_ratio,
                          "worst_point": mod_arg, "worst_order": self.worst_order, "grid": self.grid,
                          "unresolved_cells": self.unresolved_cells, "details": self.details})


def _remainder_logs(f: SampledFunction, series: FormalSeries, radii, angles, P: int, evaluator_rtol: float):
    """``log`` of the certified remainder lower bound for each grid point and order ``p <= P``.

    Returns an array of shape ``(P+1, npts)`` holding
    ``log max(|f - S_p| - floor_p, 0) - p log|z|``.
    """
    if P > series.K + 1:
        raise ValueError("max order exceeds the series truncation")
    fz = f(radii, angles)
    if not np.all(np.isfinite(fz)):
        bad = int(np.flatnonzero(~np.isfinite(fz))[0])
        raise NumericalFailure(f"evaluator failed at modulus={radii[bad]}, argument={angles[bad]}")
    la, ph = series.log_magnitudes()
    logr = np.log(radii)
    partial = np.zeros_like(fz)
    absum = np.zeros(radii.shape)
    out = np.empty((P + 1, len(radii)))
    for p in range(P + 1):
        rem = np.abs(fz - partial)
        floor = 8 * _EPS * (absum + np.abs(partial)) + evaluator_rtol * np.abs(fz)
        with np.errstate(divide="ignore"):
            out[p] = np.log(np.maximum(rem - floor, 0.0)) - p * logr
        if p < len(la):
            with np.errstate(over="ignore"):
                mag = np.exp(la[p] + p * logr)
            term = mag * np.exp(1j * (ph[p] + p * angles))
            partial = partial + np.where(mag > 0, term, 0.0)
            absum = absum + mag
    return out


def verify_uniform_expansion(claim: AsymptoticClaim, grid: GridSpec, evaluator_rtol: float = 1e-14,
                             points: tuple[np.ndarray, np.ndarray] | None = None) -> ExpansionVerdict:
    """Worst ratio ``|f - S_p| / (C A^p M_p |z|^p)`` over the grid and ``p <= grid.max_order``.

    ``evaluator_rtol`` is the relative accuracy of ``claim.f``; remainders
    below the resulting rounding floor count as zero and are tallied in
    ``unresolved_cells``.  ``points`` replaces the grid's own (modulus,
    argument) points, e.g. for tabulated functions.
    """
    P = grid.max_order
    radii, angles = _grid_points(grid, claim.sector, points)
    logs = _remainder_logs(claim.f, claim.series, radii, angles, P, evaluator_rtol)
    p = np.arange(P + 1)
    log_bound_p = math.log(claim.C) + p * math.log(claim.A) + claim.M.log_M_array(P)
    ratio = logs - log_bound_p[:, None]
    flat = int(np.argmax(ratio))
    pi, zi = divmod(flat, len(radii))
    worst = float(ratio[pi, zi])
    R = math.exp(worst) if worst > -745 else 0.0
    unresolved = int(np.sum(np.isneginf(logs)))
    if worst == -np.inf:
        point, order = None, None
    else:
        point, order = (float(radii[zi]), float(angles[zi])), int(pi)
    by_order = ratio.max(axis=1)
    with np.errstate(under="ignore"):
        by_order = np.where(np.isneginf(by_order), 0.0, np.exp(np.minimum(by_order, 700)))
    return ExpansionVerdict(Verdict.HOLDS if R <= 1.0 else Verdict.FAILS, R, point, order,
                            {**grid.to_dict(), "points": int(len(radii))}, unresolved,
                            {"C": claim.C, "A": claim.A, "sector": claim.sector.to_dict(),
                             "ratio_by_order": by_order.tolist()})


def _grid_points(grid, sector, points):
    if points is None:
        return grid.points(sector)
    radii, angles = (np.asarray(x, float) for x in points)
    if not np.all(sector.contains(radii, angles)):
        raise ValueError("some supplied points lie outside the claim sector")
    return radii, angles


def _order_profile(f, series, M, sector, grid, evaluator_rtol, points=None):
    """``g_p = log sup |f - S_p| / (M_p |z|^p)`` over the grid plus the origin, where the
    ratio tends to ``|a_p|``."""
    radii, angles = _grid_points(grid, sector, points)
    P = grid.max_order
    logs = _remainder_logs(f, series, radii, angles, P, evaluator_rtol)
    la, _ = series.log_magnitudes()
    at_origin = np.full(P + 1, -np.inf)
    n = min(P + 1, len(la))
    at_origin[:n] = la[:n]
    return np.maximum(logs.max(axis=1), at_origin) - M.log_M_array(P)


def fit_constants(f: SampledFunction, series: FormalSeries, M: WeightSequence, sector: Sector,
                  grid: GridSpec, evaluator_rtol: float = 1e-14,
                  points: tuple[np.ndarray, np.ndarray] | None = None) -> tuple[float, float]:
    """Smallest ``A`` (to 1% relative) with ``g_p - p log A`` bounded on the order window, and
    the induced ``C`` = max ratio at that ``A``.

    Bounded means the maximum over the upper half of the orders does not exceed
    the maximum over the lower half.  Raises :class:`NoFiniteFit` when the
    increments of ``g_p`` in the last quarter of the window all exceed those of
    the quarter before, so no geometric rate absorbs them.
    """
    g = _order_profile(f, series, M, sector, grid, evaluator_rtol, points)
    finite = np.isfinite(g)
    if not np.any(finite):
        return 0.0, 0.0
    P = int(np.flatnonzero(finite)[-1])  # orders past an exact remainder carry no information
    g = g[:P + 1]
    if not np.all(np.isfinite(g)):
        g = np.where(np.isfinite(g), g, np.min(g[np.isfinite(g)]))
    if P < 2:
        return float(math.exp(np.max(g))), 1.0
    d = np.diff(g)
    q = max(1, len(d) // 4)
    if P >= 8 and np.min(d[-q:]) > np.max(d[-2 * q:-q]) and d[-q:].mean() - d[-2 * q:-q].mean() > 0.05:
        raise NoFiniteFit("remainder ratios grow super-geometrically in p")

    def bounded(logA):
        h = g - np.arange(P + 1) * logA
        return np.max(h[P // 2 + 1:]) <= np.max(h[:P // 2 + 1]) + 1e-12

    lo, hi = float(np.min(d)) - 1.0, float(np.max(d)) + 1.0
    while not bounded(hi):
        hi += 1.0
    while hi - lo > math.log(1.01):
        mid = 0.5 * (lo + hi)
        if bounded(mid):
            hi = mid
        else:
            lo = mid
    C = math.exp(float(np.max(g - np.arange(P + 1) * hi)))
    return C * (1 + 1e-12), math.exp(hi)


@dataclass(frozen=True)
class CoefficientBound:
    verdict: Verdict
    max_ratio: float
    argmax: int | None

    def to_dict(self) -> dict:
        return _jsonable({"verdict": self.verdict.value, "max_ratio": self.max_ratio, "argmax": self.argmax})


def check_borel_map_norm_bound(claim: AsymptoticClaim, max_order: int | None = None) -> CoefficientBound:
    """``max_p |a_p| / (C A^p M_p)``: the formal series of a Holding claim lies in the weighted ball."""
    P = claim.series.K if max_order is None else min(max_order, claim.series.K)
    la, _ = claim.series.log_magnitudes()
    p = np.arange(P + 1)
    r = la[:P + 1] - (math.log(claim.C) + p * math.log(claim.A) + claim.M.log_M_array(P))
    if np.all(np.isneginf(r)):
        return CoefficientBound(Verdict.HOLDS, 0.0, None)
    i = int(np.argmax(r))
    ratio = math.exp(float(r[i]))
    return CoefficientBound(Verdict.HOLDS if ratio <= 1 + 1e-9 else Verdict.FAILS, ratio, i)
