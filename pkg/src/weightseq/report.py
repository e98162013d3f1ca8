"""Full analysis of one sequence definition as a self-contained JSON report."""
from __future__ import annotations

import dataclasses
import json
from typing import Any, Callable

from . import __version__
from .conditions import (check_beta2, check_beta2_zero, check_condition_vi, check_dc, check_lc, check_mg,
                         check_snq, check_sv_monotone)
from .definitions import SequenceDefinition
from .indices import estimate_gamma, estimate_matuszewska, estimate_omega
from .surjectivity import classify
from .verdict import DEFAULT_PROTOCOL, NumericalFailure, TrendProtocol, _jsonable

TOLERANCE_PROFILES = {
    "default": DEFAULT_PROTOCOL,
    "strict": TrendProtocol(decay=0.6, growth=0.9, projection_tolerance=0.1),
}

CONDITION_TAGS = ["dyadic-window-trend-protocol"]
INDEX_TAGS = ["gamma-beta-characterization", "omega-tail-minimum", "matuszewska-k-slopes"]


def _guard(fn: Callable[[], Any], errors: list) -> Any:
    """Run one checker; numerical failures and unmet checker preconditions become an
    embedded error record so the other sections still run."""
    try:
        return fn()
    except (NumericalFailure, IndexError, ValueError) as exc:
        rec = {"error": type(exc).__name__, "message": str(exc)}
        errors.append(rec)
        return None


def analyze(defn: SequenceDefinition, tolerance_profile: str = "default") -> tuple[dict, bool]:
    """Run every condition check, index estimate and the classification.

    Returns ``(report, complete)``; ``complete`` is False when some section
    recorded a numerical failure instead of a result.
    """
    protocol = TOLERANCE_PROFILES[tolerance_profile]
    M = defn.build()
    N = defn.truncation
    sections_ok = True

    checks = {
        "lc": lambda: check_lc(M, N),
        "dc": lambda: check_dc(M, N, protocol),
        "mg": lambda: check_mg(M, N, protocol),
        "snq": lambda: check_snq(M, N, protocol),
        "beta2": lambda: check_beta2(M, N=N),
        "beta2_zero": lambda: check_beta2_zero(M, 2, N, protocol),
        "condition_vi": lambda: check_condition_vi(M, N, protocol),
        "sv_monotone": lambda: check_sv_monotone(M, N=N),
    }
    verdicts, cond_out = {}, {}
    for name, fn in checks.items():
        errs: list = []
        v = _guard(fn, errs)
        if v is None:
            cond_out[name] = errs[0]
            sections_ok = False
        else:
            verdicts[name] = v
            cond_out[name] = v.to_dict()

    est, idx_out = {}, {}
    for name, fn in (("gamma", lambda: estimate_gamma(M, N)), ("omega", lambda: estimate_omega(M, N))):
        errs = []
        e = _guard(fn, errs)
        if e is None:
            idx_out[name] = errs[0]
            sections_ok = False
        else:
            est[name] = e
            idx_out[name] = e.to_dict()
    errs = []
    mat = _guard(lambda: estimate_matuszewska(M, N), errs)
    if mat is None:
        idx_out["matuszewska"] = errs[0]
        sections_ok = False
    else:
        idx_out["matuszewska_lower"], idx_out["matuszewska_upper"] = mat[0].to_dict(), mat[1].to_dict()

    if "gamma" in est and "lc" in verdicts and "dc" in verdicts:
        try:
            surj = classify(M, verdicts, est).to_dict()
        except ValueError as exc:
            surj = {"error": type(exc).__name__, "message": str(exc), "citations": []}
            sections_ok = False
    else:
        surj = {"error": "MissingInputs", "message": "classification needs lc, dc and gamma", "citations": []}
        sections_ok = False

    report = {
        "sequence": {**defn.to_dict(), "label": M.label},
        "conditions": {"results": cond_out, "citations": CONDITION_TAGS},
        "indices": {"results": idx_out, "citations": INDEX_TAGS},
        "surjectivity": surj,
        "tool": {"name": "weightseq", "version": __version__},
        "config": {"truncation": N, "tolerance_profile": tolerance_profile,
                   "protocol": dataclasses.asdict(protocol)},
    }
    return _jsonable(report), sections_ok


def dumps(report: Any) -> str:
    """Canonical serialization: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
