"""Rule engine turning condition verdicts and index estimates into surjectivity
intervals and extension-operator verdicts.

Three interval sets are tracked, for a sequence M:

* ``derivative``: openings where the Borel map is onto from functions whose
  derivatives are uniformly bounded by the lifted sequence (p! M_p);
* ``uniform``: openings where it is onto from uniform asymptotic expansions;
* ``general``: openings where it is onto from asymptotic expansions on
  bounded proper subsectors.

Each certified bound carries the tags of the rules that produced it.  The
behaviour at the endpoint gamma(M) is never decided: it is an open problem
and is reported as such.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

from .indices import BISECTION_WIDTH, IndexEstimate
from .verdict import ConditionVerdict, Verdict, _jsonable

TAG_SNQ_NECESSARY = "nonempty-interval-requires-snq"
TAG_REGULAR = "regular-sequence-interval-bounds"
TAG_INTEGER = "integer-index-excludes-endpoint"
TAG_INFINITE = "infinite-index-global-extension"
TAG_GENERAL_BOUND = "floor-plus-one-bound"
TAG_CHAIN = "interval-inclusion-chain"
TAG_EXTENSION = "global-extension-implications"
TAG_HALF_PLANE = "half-plane-extension"

INTERVAL_NAMES = ("derivative", "uniform", "general")
OPEN_AT_GAMMA = "open question at gamma(M)"


class InconsistentInputs(ValueError):
    """Verdicts and estimates contradict a theorem relating them."""


@dataclass(frozen=True)
class Interval:
    """``(0, upper)`` or ``(0, upper]``; ``empty`` overrides everything else."""

    upper: float = 0.0
    closed: bool = False
    empty: bool = False

    @classmethod
    def none(cls) -> "Interval":
        return cls(0.0, False, True)

    @classmethod
    def everything(cls) -> "Interval":
        return cls(math.inf, False, False)

    def __post_init__(self):
        if not self.empty and not self.upper > 0:
            object.__setattr__(self, "empty", True)
        if math.isinf(self.upper) and self.closed:
            raise ValueError("an unbounded interval cannot be closed")

    def interior(self) -> "Interval":
        return Interval(self.upper, False, self.empty)

    def issubset(self, other: "Interval") -> bool:
        if self.empty:
            return True
        if other.empty:
            return False
        if self.upper < other.upper:
            return True
        return self.upper == other.upper and (other.closed or not self.closed)

    def contains(self, r: float) -> bool:
        if self.empty or r <= 0:
            return False
        return r < self.upper or (self.closed and r == self.upper)

    def __str__(self) -> str:
        if self.empty:
            return "empty"
        return f"(0, {'inf' if math.isinf(self.upper) else repr(self.upper)}{']' if self.closed else ')'}"

    def to_dict(self) -> dict:
        return _jsonable({"empty": self.empty, "upper": self.upper, "closed": self.closed, "text": str(self)})


@dataclass
class IntervalBounds:
    certified_subset: Interval
    certified_superset: Interval
    boundary_status: str
    citations: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"certified_subset": self.certified_subset.to_dict(),
                "certified_superset": self.certified_superset.to_dict(),
                "boundary_status": self.boundary_status, "citations": list(self.citations)}


EXISTS = "ExistenceCertified"
NOT_EXISTS = "NonexistenceCertified"
BOUNDARY = "BoundaryOpen"


@dataclass(frozen=True)
class ExtensionVerdict:
    opening: float
    status: str
    citations: tuple[str, ...]
    half_plane: str | None = None

    def to_dict(self) -> dict:
        return _jsonable({"opening": self.opening, "status": self.status,
                          "citations": list(self.citations), "half_plane": self.half_plane})


@dataclass
class SurjectivityReport:
    sequence: str
    gamma_estimate: IndexEstimate
    regularity: dict[str, str]
    intervals: dict[str, IntervalBounds]
    extension_ops: list[ExtensionVerdict]
    citations: list[str]
    rules_applied: list[str]

    def to_dict(self) -> dict:
        return _jsonable({
            "sequence": self.sequence,
            "gamma_estimate": self.gamma_estimate.to_dict(),
            "regularity": self.regularity,
            "intervals": {k: v.to_dict() for k, v in self.intervals.items()},
            "extension_ops": [e.to_dict() for e in self.extension_ops],
            "citations": self.citations,
            "rules_applied": self.rules_applied,
        })


def _name(v: ConditionVerdict | Verdict | str | None) -> str:
    if v is None:
        return Verdict.INCONCLUSIVE.value
    if isinstance(v, ConditionVerdict):
        return v.verdict.value
    return Verdict(v).value


def uncertainty(estimate: IndexEstimate) -> float:
    """Half-width used for conservative comparisons with the estimate."""
    s = estimate.spread if math.isfinite(estimate.spread) else math.inf
    return max(s, BISECTION_WIDTH)


def nearest_integer(estimate: IndexEstimate) -> int | None:
    """The positive integer within the estimate's uncertainty, if any."""
    if estimate.infinite:
        return None
    n = round(estimate.value)
    return n if n >= 1 and abs(estimate.value - n) <= uncertainty(estimate) else None


def _regularity(verdicts: Mapping[str, Any]) -> dict[str, str]:
    return {k: _name(verdicts.get(k)) for k in ("lc", "dc", "snq", "mg", "beta2")}


def _check_consistency(reg: dict[str, str], g: IndexEstimate) -> None:
    u = uncertainty(g)
    if reg["snq"] == "Holds" and not g.infinite and g.value + u <= 0.02:
        raise InconsistentInputs("(snq) Holds but the gamma estimate is 0 beyond its spread")
    if reg["snq"] == "Fails" and (g.infinite or g.value > 2 * u + 0.02):
        raise InconsistentInputs("(snq) Fails but the gamma estimate is positive beyond its spread")


def classify(M, verdicts: Mapping[str, Any], estimates: Mapping[str, IndexEstimate],
             openings=(0.5, 1.0, 2.0, 5.0)) -> SurjectivityReport:
    """Apply the interval rules in order and classify extension operators at ``openings``.

    ``verdicts`` maps condition names (``lc``, ``dc``, ``snq``, ``mg``,
    ``beta2``) to :class:`ConditionVerdict` objects or verdict strings;
    ``estimates`` must contain ``gamma``.  ``M`` only labels the report.
    """
    if "lc" not in verdicts or "dc" not in verdicts:
        raise InconsistentInputs("classification needs at least the (lc) and (dc) verdicts")
    if "gamma" not in estimates:
        raise InconsistentInputs("classification needs a gamma estimate")
    g = estimates["gamma"]
    reg = _regularity(verdicts)
    _check_consistency(reg, g)
    rules: list[str] = []
    cites: list[str] = []

    def cite(rule, tag):
        rules.append(rule)
        if tag not in cites:
            cites.append(tag)

    unknown = lambda: IntervalBounds(Interval.none(), Interval.everything(), "no rule applies", [TAG_CHAIN])
    iv = {name: unknown() for name in INTERVAL_NAMES}
    lc, dc = reg["lc"] == "Holds", reg["dc"] == "Holds"

    if reg["snq"] == "Fails":
        cite("R1", TAG_SNQ_NECESSARY)
        iv = {n: IntervalBounds(Interval.none(), Interval.none(), "empty", [TAG_SNQ_NECESSARY])
              for n in INTERVAL_NAMES}
    elif g.infinite and lc:
        cite("R4", TAG_INFINITE)
        iv = {n: IntervalBounds(Interval.everything(), Interval.everything(), "no finite endpoint",
                                [TAG_INFINITE]) for n in INTERVAL_NAMES}
    elif lc and dc and not g.infinite and g.value > 0:
        cite("R2", TAG_REGULAR)
        gv = g.value
        iv = {n: IntervalBounds(Interval(gv, False), Interval(gv, True), OPEN_AT_GAMMA, [TAG_REGULAR])
              for n in INTERVAL_NAMES}
        n_int = nearest_integer(g)
        if n_int is not None:
            cite("R3", TAG_INTEGER)
            exact = Interval(float(n_int), False)
            for n in ("derivative", "uniform"):
                iv[n] = IntervalBounds(exact, exact, "open at the integer endpoint", [TAG_REGULAR, TAG_INTEGER])
            iv["general"] = IntervalBounds(exact, Interval(float(n_int), True), OPEN_AT_GAMMA, [TAG_REGULAR])
    elif lc and not dc and not g.infinite:
        cite("R5", TAG_GENERAL_BOUND)
        bound = Interval(float(math.floor(g.value + uncertainty(g)) + 1), True)
        for n in INTERVAL_NAMES:
            tags = [TAG_GENERAL_BOUND] if n == "general" else [TAG_GENERAL_BOUND, TAG_CHAIN]
            iv[n] = IntervalBounds(Interval.none(), bound, "upper bound only", tags)

    ext = [classify_extension_operators(M, verdicts, estimates, r) for r in openings]
    for e in ext:
        for t in e.citations:
            if t not in cites:
                cites.append(t)
    return SurjectivityReport(getattr(M, "label", str(M)), g, reg, iv, ext, cites, rules)


def classify_extension_operators(M, verdicts: Mapping[str, Any], estimates: Mapping[str, IndexEstimate],
                                 r: float) -> ExtensionVerdict:
    """Existence of global extension operators for the opening ``r * pi``.

    Existence needs (beta_2) and ``r`` below gamma by more than the estimate's
    uncertainty; failure of (beta_2) or ``r`` above gamma by more than it rules
    them out.  Everything in between, including ``r`` at gamma, stays open.
    """
    if not r > 0:
        raise ValueError("opening must be positive")
    g = estimates["gamma"]
    beta2 = _name(verdicts.get("beta2"))
    u = uncertainty(g)
    tags = [TAG_EXTENSION]
    if g.infinite:
        tags.append(TAG_INFINITE)
    below = g.infinite or r < g.value - u
    above = (not g.infinite) and r > g.value + u
    if beta2 == "Fails" or above:
        status = NOT_EXISTS
    elif beta2 == "Holds" and below:
        status = EXISTS
    else:
        status = BOUNDARY
    half = None
    if r == 1.0:
        tags.append(TAG_HALF_PLANE)
        if beta2 == "Holds" and (g.infinite or g.value > 1 + u):
            half = EXISTS
        elif beta2 == "Fails" or (not g.infinite and g.value < 1 - u):
            half = NOT_EXISTS
        else:
            half = BOUNDARY
    return ExtensionVerdict(float(r), status, tuple(tags), half)


def check_interval_chain(report: SurjectivityReport) -> bool:
    """Emitted bounds respect ``interior(uniform) <= derivative <= uniform <= general``
    and each subset lies inside its superset."""
    iv = report.intervals
    try:
        d, u, g = (iv[n] for n in INTERVAL_NAMES)
    except KeyError:
        return False
    if not all(b.citations for b in iv.values()):
        return False
    if not all(b.certified_subset.issubset(b.certified_superset) for b in iv.values()):
        return False
    # a set certified inside X must fit in every certified superset of a larger Y
    pairs = [(d, u), (u, g), (d, g)]
    if not all(x.certified_subset.issubset(y.certified_superset) for x, y in pairs):
        return False
    return u.certified_subset.interior().issubset(d.certified_superset)
