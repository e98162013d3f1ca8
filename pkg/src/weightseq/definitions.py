"""JSON input documents: sequence definitions, series records and verification claims.

Validation errors are raised as :class:`InputError` with the offending field
path, so the command line can report them without a traceback.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.special import gamma as gamma_fn, gammaln

from . import catalog
from .kernels import BUILTIN_FUNCTIONS, DomainError, Sector, SampledFunction, builtin_function
from .sequence import WeightSequence, make_sequence
from .series import FormalSeries

MIN_TRUNCATION = 16
MIN_CUSTOM_QUOTIENTS = 16


class InputError(ValueError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(path, f"cannot read file ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}", f"invalid JSON ({exc.msg})") from None


def _require(doc: dict, key: str, where: str):
    if not isinstance(doc, dict):
        raise InputError(where, "expected a JSON object")
    if key not in doc:
        raise InputError(f"{where}.{key}", "missing required field")
    return doc[key]


def _number(x, where: str, *, positive=False, integer=False) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InputError(where, "expected a number")
    if integer and int(x) != x:
        raise InputError(where, "expected an integer")
    if not math.isfinite(x):
        raise InputError(where, "expected a finite number")
    if positive and not x > 0:
        raise InputError(where, "must be positive")
    return int(x) if integer else float(x)


# -- sequences ------------------------------------------------------------------


@dataclass(frozen=True)
class SequenceDefinition:
    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    custom_log_quotients: tuple[float, ...] | None = None
    truncation: int = 10**4

    def __post_init__(self):
        if not isinstance(self.truncation, int) or self.truncation < MIN_TRUNCATION:
            raise InputError("truncation", f"must be an integer >= {MIN_TRUNCATION}, got {self.truncation!r}")
        if self.kind == "custom":
            q = self.custom_log_quotients
            if q is None or len(q) < MIN_CUSTOM_QUOTIENTS:
                raise InputError("custom_log_quotients", f"custom sequences need at least {MIN_CUSTOM_QUOTIENTS} values")
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v) for v in q):
                raise InputError("custom_log_quotients", "values must be finite numbers")
        elif self.kind not in catalog.CATALOG:
            raise InputError("kind", f"unknown kind {self.kind!r}; use 'custom' or one of {sorted(catalog.CATALOG)}")
        else:
            try:
                catalog.get_entry(self.kind).resolve(self.params)
            except ValueError as exc:
                raise InputError("params", str(exc)) from None

    @classmethod
    def from_dict(cls, doc: Any, where: str = "definition") -> "SequenceDefinition":
        kind = _require(doc, "kind", where)
        if not isinstance(kind, str):
            raise InputError(f"{where}.kind", "expected a string")
        params = doc.get("params", {}) or {}
        if not isinstance(params, dict):
            raise InputError(f"{where}.params", "expected an object")
        for k, v in params.items():
            _number(v, f"{where}.params.{k}")
        q = doc.get("custom_log_quotients")
        if q is not None and not isinstance(q, list):
            raise InputError(f"{where}.custom_log_quotients", "expected a list of numbers")
        N = doc.get("truncation", 10**4)
        if isinstance(N, bool) or not isinstance(N, int):
            raise InputError(f"{where}.truncation", "expected an integer")
        unknown = set(doc) - {"kind", "params", "custom_log_quotients", "truncation"}
        if unknown:
            raise InputError(where, f"unknown field(s) {sorted(unknown)}")
        try:
            return cls(kind, dict(params), tuple(q) if q is not None else None, N)
        except InputError as exc:
            raise InputError(f"{where}.{exc.where}", str(exc).split(": ", 1)[1]) from None

    def with_truncation(self, N: int) -> "SequenceDefinition":
        return SequenceDefinition(self.kind, self.params, self.custom_log_quotients, N)

    def build(self) -> WeightSequence:
        if self.kind == "custom":
            return make_sequence(log_m=np.asarray(self.custom_log_quotients, float), label="custom")
        try:
            return catalog.build(self.kind, **self.params)
        except ValueError as exc:
            raise InputError("params", str(exc)) from None

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"kind": self.kind, "params": dict(self.params), "truncation": self.truncation}
        if self.custom_log_quotients is not None:
            d["custom_log_quotients"] = list(self.custom_log_quotients)
        return d


# -- series ---------------------------------------------------------------------

BUILTIN_SERIES = {
    "factorial": lambda p: (gammaln(p + 1.0), np.zeros_like(p, dtype=float)),
    "inverse_factorial": lambda p: (-gammaln(p + 1.0), np.zeros_like(p, dtype=float)),
    "ones": lambda p: (np.zeros_like(p, dtype=float), np.zeros_like(p, dtype=float)),
    "alternating": lambda p: (np.zeros_like(p, dtype=float), np.pi * (p % 2)),
    "factorial_squared": lambda p: (2 * gammaln(p + 1.0), np.zeros_like(p, dtype=float)),
}


def builtin_series(name: str, terms: int) -> FormalSeries:
    if name not in BUILTIN_SERIES:
        raise InputError("series.builtin", f"unknown series {name!r}; choose from {sorted(BUILTIN_SERIES)}")
    if terms < 1:
        raise InputError("series.terms", "need at least one coefficient")
    p = np.arange(terms)
    la, ph = BUILTIN_SERIES[name](p)
    if np.all(la < 700):
        # exact gamma values keep p! integral; phases are multiples of pi
        g = gamma_fn(p + 1.0)
        exact = {"factorial": g, "inverse_factorial": 1.0 / g, "factorial_squared": g * g}
        c = exact.get(name, np.exp(la)) * np.where(ph == 0, 1.0, -1.0)
        return FormalSeries(c.astype(complex))
    return FormalSeries.from_log(la, ph)


def series_from_dict(doc: Any, where: str = "series") -> FormalSeries:
    if isinstance(doc, dict) and "builtin" in doc:
        terms = _number(_require(doc, "terms", where), f"{where}.terms", integer=True)
        return builtin_series(doc["builtin"], terms)
    try:
        return FormalSeries.from_records(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(where, f"malformed series record ({exc})") from None


# -- functions and claims ---------------------------------------------------------


def sector_from_dict(doc: Any, where: str = "sector") -> Sector:
    opening = _number(_require(doc, "opening", where), f"{where}.opening")
    d = _number(doc.get("direction", 0.0), f"{where}.direction")
    radius = doc.get("radius", "inf")
    radius = math.inf if radius in ("inf", None) else _number(radius, f"{where}.radius")
    try:
        return Sector(d, opening, radius)
    except DomainError as exc:
        raise InputError(where, str(exc)) from None


def table_function(doc: dict, where: str) -> SampledFunction:
    """Dense value table on declared points; evaluation off the table is an error."""
    try:
        mod = np.asarray(doc["modulus"], float)
        arg = np.asarray(doc["argument"], float)
        val = np.asarray(doc["re"], float) + 1j * np.asarray(doc["im"], float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(where, f"table needs modulus, argument, re, im arrays ({exc})") from None
    if not (mod.shape == arg.shape == val.shape) or mod.ndim != 1 or len(mod) == 0:
        raise InputError(where, "table arrays must have one matching length")
    domain = sector_from_dict(_require(doc, "domain", where), f"{where}.domain")
    index = {(float(m), float(a)): i for i, (m, a) in enumerate(zip(mod, arg))}

    def evaluate(m, a):
        out = np.empty(np.shape(m), complex)
        for j, key in enumerate(zip(np.ravel(m), np.ravel(a))):
            i = index.get((float(key[0]), float(key[1])))
            if i is None:
                raise DomainError(f"point {key} is not in the value table")
            out.flat[j] = val[i]
        return out

    f = SampledFunction(evaluate, domain, None, label="table")
    object.__setattr__(f, "table_points", (mod, arg))
    return f


def function_from_dict(doc: Any, where: str = "function") -> SampledFunction:
    if not isinstance(doc, dict):
        raise InputError(where, "expected an object")
    if "builtin" in doc:
        name = doc["builtin"]
        params = doc.get("params", {}) or {}
        if name not in BUILTIN_FUNCTIONS:
            raise InputError(f"{where}.builtin", f"unknown function {name!r}; choose from {sorted(BUILTIN_FUNCTIONS)}")
        try:
            return builtin_function(name, **params)
        except (TypeError, ValueError) as exc:
            raise InputError(f"{where}.params", str(exc)) from None
    if "table" in doc:
        return table_function(doc["table"], f"{where}.table")
    raise InputError(where, "give either 'builtin' or 'table'")


@dataclass(frozen=True)
class Claim:
    function: SampledFunction
    series: FormalSeries
    weights: SequenceDefinition
    sector: Sector
    C: float | None
    A: float | None
    fit: bool
    grid: dict
    echo: dict


def claim_from_dict(doc: Any, where: str = "claim") -> Claim:
    if not isinstance(doc, dict):
        raise InputError(where, "expected a JSON object")
    f = function_from_dict(_require(doc, "function", where), f"{where}.function")
    s = series_from_dict(_require(doc, "series", where), f"{where}.series")
    w = _require(doc, "weights", where)
    if isinstance(w, dict) and "truncation" not in w:
        w = {**w, "truncation": max(MIN_TRUNCATION, s.K + 1)}
    weights = SequenceDefinition.from_dict(w, f"{where}.weights")
    sector = sector_from_dict(_require(doc, "sector", where), f"{where}.sector")
    fit = bool(doc.get("fit", False))
    C = A = None
    if not fit:
        consts = _require(doc, "constants", where)
        C = _number(_require(consts, "C", f"{where}.constants"), f"{where}.constants.C", positive=True)
        A = _number(_require(consts, "A", f"{where}.constants"), f"{where}.constants.A", positive=True)
    grid = doc.get("grid", {}) or {}
    if not isinstance(grid, dict):
        raise InputError(f"{where}.grid", "expected an object")
    allowed = {"max_order", "per_decade", "decades", "angles", "inset", "top"}
    if set(grid) - allowed:
        raise InputError(f"{where}.grid", f"unknown field(s) {sorted(set(grid) - allowed)}")
    return Claim(f, s, weights, sector, C, A, fit, dict(grid), doc)
