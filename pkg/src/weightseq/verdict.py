"""Three-valued verdicts and the finite-window trend rules shared by all checkers.

Every growth condition on a weight sequence is asymptotic, so a scan over
``p <= N`` can only ever support a verdict.  The helpers here turn a sampled
quantity into one of three trends (bounded, divergent, unclear) using a fixed
protocol on dyadic sub-windows ``N/8, N/4, N/2, N``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np


class Verdict(str, enum.Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ConditionVerdict:
    """Outcome of a finite-truncation condition check.

    ``constant_estimate`` is the tightest bounding constant found on the
    window (D for (dc), A for (mg) and (gamma_beta), B for (snq));
    ``slack_constant`` is the same constant with 10% slack applied.
    """

    condition: str
    verdict: Verdict
    truncation: int
    witness: dict[str, Any] | None = None
    constant_estimate: float | None = None
    slack_constant: float | None = None
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    @property
    def fails(self) -> bool:
        return self.verdict is Verdict.FAILS

    @property
    def decisive(self) -> bool:
        return self.verdict is not Verdict.INCONCLUSIVE

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["verdict"] = self.verdict.value
        return _jsonable(d)


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


@dataclass(frozen=True)
class TrendProtocol:
    """Thresholds of the bounded/divergent decision.

    Increments of a running supremum between successive dyadic checkpoints
    must shrink by ``decay`` for a bounded call and keep at least ``growth``
    of the previous increment for a divergent call.  Slowly shrinking
    increments also count as bounded when their geometric projection adds
    less than ``projection_tolerance`` of the current value.
    """

    decay: float = 0.75
    growth: float = 0.85
    tail_fraction: float = 0.25
    monotone_samples: int = 32
    divergence_step: float = math.log(2.0)
    divergence_doublings: int = 3
    projection_tolerance: float = 0.25


def projected_growth(d_prev: float, d_last: float) -> float:
    """Remaining growth if increments keep shrinking by ``d_last / d_prev``; inf otherwise."""
    if d_prev <= 0 or d_last >= d_prev:
        return math.inf
    r = d_last / d_prev
    return d_last * r / (1.0 - r)


DEFAULT_PROTOCOL = TrendProtocol()


def dyadic_checkpoints(n: int, count: int = 4) -> list[int]:
    """Indices ``n/2**(count-1), ..., n/2, n`` (at least 1 each)."""
    return [max(1, n >> (count - 1 - j)) for j in range(count)]


def increments_trend(points: np.ndarray, protocol: TrendProtocol = DEFAULT_PROTOCOL) -> str:
    """Trend of a sequence of block maxima sampled at dyadic checkpoints.

    Returns ``"bounded"`` when the last increment is negligible or decays
    geometrically, ``"divergent"`` when increments do not decay, else
    ``"unclear"``.
    """
    pts = np.asarray(points, dtype=float)
    if np.isinf(pts[-1]):
        return "divergent"
    d = np.diff(pts)
    scale = max(1.0, float(np.max(np.abs(pts))))
    tiny = 1e-12 * scale
    if d[-1] <= tiny:
        return "bounded"
    if len(d) >= 2 and d[-2] > tiny and d[-1] <= protocol.decay * d[-2]:
        return "bounded"
    if len(d) >= 2 and projected_growth(d[-2], d[-1]) <= protocol.projection_tolerance * abs(pts[-1]):
        return "bounded"
    if np.all(d > tiny) and np.all(d[1:] >= protocol.growth * d[:-1]):
        return "divergent"
    return "unclear"


def tail_is_increasing(values: np.ndarray, protocol: TrendProtocol = DEFAULT_PROTOCOL) -> bool:
    """Sampled check that ``values`` increase over the last window fraction."""
    n = len(values)
    start = int(n * (1.0 - protocol.tail_fraction))
    idx = np.unique(np.linspace(start, n - 1, protocol.monotone_samples).astype(int))
    v = np.asarray(values)[idx]
    return bool(np.all(np.diff(v) >= 0) and v[-1] > v[0])


def sup_trend(values: np.ndarray, protocol: TrendProtocol = DEFAULT_PROTOCOL) -> tuple[str, dict[str, Any]]:
    """Classify boundedness of ``sup_{p<=n} values[p]`` as ``n`` grows.

    The trend is read from maxima over the dyadic blocks ``[c/2, c]`` so an
    early peak does not mask late growth.  Divergence is only declared when
    the raw quantity also increases over the last quarter of the window.
    """
    v = np.asarray(values, dtype=float)
    n = len(v) - 1
    cps = dyadic_checkpoints(n)
    pts = np.array([np.max(v[c // 2 : c + 1]) for c in cps])
    trend = increments_trend(pts, protocol)
    if trend == "divergent" and not (np.isinf(pts[-1]) or tail_is_increasing(v, protocol)):
        trend = "unclear"
    argmax = int(np.argmax(v))
    info = {
        "checkpoints": cps,
        "block_maxima": pts.tolist(),
        "sup": float(v[argmax]),
        "argmax": argmax,
    }
    return trend, info


def liminf_trend(values: np.ndarray, protocol: TrendProtocol = DEFAULT_PROTOCOL) -> tuple[str, dict[str, Any]]:
    """Divergence test of a sequence via minima over dyadic blocks ``[n/2, n]``.

    ``"divergent"`` needs ``protocol.divergence_doublings`` successive block
    minima each rising by at least ``protocol.divergence_step``;
    ``"bounded"`` means the block minima stopped rising: the last increment
    is non-positive, or it is below the step and either decays geometrically
    or projects to a small relative gain.
    """
    v = np.asarray(values, dtype=float)
    n = len(v) - 1
    cps = dyadic_checkpoints(n, protocol.divergence_doublings + 1)
    mins, argmins = [], []
    for c in cps:
        lo = max(1, c // 2)
        block = v[lo : c + 1]
        j = int(np.argmin(block))
        mins.append(float(block[j]))
        argmins.append(lo + j)
    mins_a = np.array(mins)
    d = np.diff(mins_a)
    info = {"checkpoints": cps, "block_minima": mins, "block_argmin": argmins}
    if np.all(d >= protocol.divergence_step):
        return "divergent", info
    scale = max(1.0, float(np.max(np.abs(mins_a))))
    last = d[-1]
    if last <= 1e-12 * scale:
        return "bounded", info
    if last < protocol.divergence_step and len(d) >= 2 and d[-2] > 0:
        if last <= protocol.decay * d[-2]:
            return "bounded", info
        if projected_growth(d[-2], last) <= protocol.projection_tolerance * abs(mins_a[-1]):
            return "bounded", info
    return "unclear", info


class NumericalFailure(RuntimeError):
    """A computation could not reach its documented accuracy."""


class TailBoundError(NumericalFailure):
    """A tail sum could neither be bounded nor shown to diverge."""
