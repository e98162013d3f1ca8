"""Command line: ``weightseq {analyze,transform,verify,catalog}``.

Exit codes: 0 completed, 2 invalid input, 3 numerical failure.  Reports are
JSON with sorted keys and no timestamps, so identical inputs give identical
bytes.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from typing import Any

import numpy as np

from . import __version__, catalog
from .asymptotics import AsymptoticClaim, GridSpec, NoFiniteFit, check_borel_map_norm_bound, fit_constants, \
    verify_uniform_expansion
from .definitions import (InputError, SequenceDefinition, builtin_series, claim_from_dict, function_from_dict,
                          load_json, series_from_dict)
from .kernels import BorelPath, DomainError, borel_transform, laplace_transform
from .report import TOLERANCE_PROFILES, analyze, dumps
from .sequence import gamma_scale
from .series import WeightedNorm, formal_borel, formal_laplace, log_norm
from .verdict import NumericalFailure, _jsonable

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3


def _flatten(obj: Any, prefix: str = "") -> list[tuple[str, Any]]:
    if isinstance(obj, dict):
        out = []
        for k in sorted(obj):
            out += _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
        return out
    if isinstance(obj, list):
        out = []
        for i, v in enumerate(obj):
            out += _flatten(v, f"{prefix}[{i}]")
        return out
    return [(prefix, obj)]


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: r.get(c, "") for c in columns})
    return buf.getvalue()


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(doc: Any, fmt: str, table: tuple[list[dict], list[str]] | None = None) -> str:
    if fmt == "json":
        return dumps(doc)
    if table is not None:
        return _csv(*table)
    rows = [{"field": k, "value": v} for k, v in _flatten(doc)]
    return _csv(rows, ["field", "value"])


# -- analyze ----------------------------------------------------------------------


def cmd_analyze(args) -> int:
    defn = SequenceDefinition.from_dict(load_json(args.definition))
    if args.truncation is not None:
        defn = defn.with_truncation(args.truncation)
    report, complete = analyze(defn, args.tolerance_profile)
    _emit(_render(report, args.format), args.output)
    return EXIT_OK if complete else EXIT_NUMERICAL


# -- transform --------------------------------------------------------------------


def _parse_point(text: str) -> tuple[complex, float | None]:
    """``a+bj`` (principal argument) or ``modulus@argument`` (Riemann-surface argument)."""
    text = text.strip()
    try:
        if "@" in text:
            m, a = text.split("@", 1)
            m, a = float(m), float(a)
            return m * complex(math.cos(a), math.sin(a)), a
        return complex(text.replace(" ", "")), None
    except ValueError:
        raise InputError("--points", f"cannot parse point {text!r}") from None


def _series_arg(args):
    if args.series:
        return series_from_dict(load_json(args.series), args.series)
    if args.series_builtin:
        return builtin_series(args.series_builtin, args.terms)
    raise InputError("transform", "formal transforms need --series FILE or --series-builtin NAME")


def cmd_transform(args) -> int:
    alpha = args.alpha
    if not alpha > 0:
        raise InputError("--alpha", "must be positive")
    if args.kind in ("formal-laplace", "formal-borel"):
        f = _series_arg(args)
        g = formal_laplace(f, alpha) if args.kind == "formal-laplace" else formal_borel(f, alpha)
        doc: dict[str, Any] = {"transform": args.kind, "alpha": alpha, "input": f.to_records(),
                               "output": g.to_records()}
        if args.definition:
            M = SequenceDefinition.from_dict(load_json(args.definition)).build()
            target = gamma_scale(M, alpha) if args.kind == "formal-laplace" else M
            source = M if args.kind == "formal-laplace" else gamma_scale(M, alpha)
            doc["log_norms"] = {"input": log_norm(f, WeightedNorm(source, args.norm_type)),
                                "output": log_norm(g, WeightedNorm(target, args.norm_type)),
                                "norm_type": args.norm_type}
        rec = g.to_records()
        key = ("re", "im") if rec["encoding"] == "linear" else ("log_abs", "phase")
        rows = [{"p": i, key[0]: a, key[1]: b} for i, (a, b) in enumerate(rec["coefficients"])]
        _emit(_render(_jsonable(doc), args.format, (rows, ["p", *key])), args.output)
        return EXIT_OK

    if not 0 < alpha < 2:
        raise InputError("--alpha", "integral transforms need 0 < alpha < 2")
    if not args.function:
        raise InputError("transform", "integral transforms need --function NAME")
    params = {}
    for item in args.param or []:
        k, _, v = item.partition("=")
        try:
            params[k] = int(v) if v.lstrip("-").isdigit() else float(v)
        except ValueError:
            raise InputError("--param", f"cannot parse {item!r}") from None
    f = function_from_dict({"builtin": args.function, "params": params})
    if not args.points:
        raise InputError("--points", "give at least one evaluation point")
    points = [_parse_point(t) for t in args.points.split(",")]
    rows, results = [], []
    for z, arg in points:
        if args.kind == "laplace":
            r = laplace_transform(f, alpha, args.tau, z, z_argument=arg)
        else:
            path = BorelPath(args.tau, alpha, args.arc_radius, args.epsilon)
            r = borel_transform(f, alpha, args.tau, path, z, u_argument=arg)
        point = {"re": z.real, "im": z.imag, "argument": float(np.angle(z)) if arg is None else arg}
        results.append({"point": point, "value": {"re": r.value.real, "im": r.value.imag},
                        "error_estimate": r.error})
        rows.append({"point_re": z.real, "point_im": z.imag, "value_re": r.value.real,
                     "value_im": r.value.imag, "error_estimate": r.error})
    doc = {"transform": args.kind, "alpha": alpha, "tau": args.tau, "function": f.label, "results": results}
    if args.kind == "borel":
        doc["path"] = {"arc_radius": args.arc_radius, "epsilon": args.epsilon}
    _emit(_render(_jsonable(doc), args.format,
                  (rows, ["point_re", "point_im", "value_re", "value_im", "error_estimate"])), args.output)
    return EXIT_OK


# -- verify -----------------------------------------------------------------------


def cmd_verify(args) -> int:
    claim = claim_from_dict(load_json(args.claim))
    M = claim.weights.build()
    grid_doc = {"max_order": min(claim.series.K, 30), **claim.grid}
    grid = GridSpec(**grid_doc)
    points = getattr(claim.function, "table_points", None)
    doc: dict[str, Any] = {"claim": {k: v for k, v in claim.echo.items() if k != "function"},
                           "function": claim.function.label, "grid": grid.to_dict()}
    if claim.fit:
        try:
            C, A = fit_constants(claim.function, claim.series, M, claim.sector, grid, points=points)
            doc["fit"] = {"C": C, "A": A, "finite": True}
        except NoFiniteFit as exc:
            doc["fit"] = {"finite": False, "reason": str(exc)}
            _emit(_render(_jsonable(doc), args.format), args.output)
            return EXIT_OK
    else:
        C, A = claim.C, claim.A
    ac = AsymptoticClaim(claim.function, claim.series, M, C, A, claim.sector)
    v = verify_uniform_expansion(ac, grid, points=points)
    doc["verification"] = v.to_dict()
    doc["coefficient_bound"] = check_borel_map_norm_bound(ac, grid.max_order).to_dict()
    _emit(_render(_jsonable(doc), args.format), args.output)
    return EXIT_OK


# -- catalog ----------------------------------------------------------------------


def _entry_doc(entry) -> dict:
    example = {n: entry.defaults.get(n) for n in entry.param_names}
    doc = {"id": entry.id, "parameters": list(entry.param_names), "defaults": entry.defaults,
           "summary": entry.summary}
    if all(v is not None for v in example.values()):
        doc["expected_profile"] = {k: {"value": e.value, "provenance": e.provenance}
                                   for k, e in entry.profile(**example).items()}
    else:
        doc["example_profiles"] = {
            label: {k: {"value": e.value, "provenance": e.provenance}
                    for k, e in entry.profile(**entry.resolve(p)).items()}
            for label, p in ((f"{i}:{p}", p) for i, (cid, p) in enumerate(catalog.SAMPLE_INSTANCES)
                             if cid == entry.id)
        }
    return _jsonable(doc)


def cmd_catalog(args) -> int:
    if args.action == "list":
        entries = [_entry_doc(catalog.CATALOG[k]) for k in sorted(catalog.CATALOG)]
        if args.format == "json":
            _emit(dumps(entries), args.output)
        else:
            rows = [{"id": e["id"], "parameters": " ".join(e["parameters"]), "summary": e["summary"]}
                    for e in entries]
            _emit(_csv(rows, ["id", "parameters", "summary"]), args.output)
        return EXIT_OK
    if not args.id:
        raise InputError("catalog show", "needs an entry id")
    if args.id not in catalog.CATALOG:
        raise InputError("catalog show", f"unknown id {args.id!r}; known: {sorted(catalog.CATALOG)}")
    _emit(_render(_entry_doc(catalog.CATALOG[args.id]), args.format), args.output)
    return EXIT_OK


# -- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="write to this path instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--tolerance-profile", choices=sorted(TOLERANCE_PROFILES), default="default")
    common.add_argument("--truncation", type=int, help="override the truncation N")

    p = argparse.ArgumentParser(prog="weightseq", description="Weight sequence analysis and transforms.")
    p.add_argument("--version", action="version", version=f"weightseq {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="conditions, indices and surjectivity of a sequence")
    a.add_argument("definition", help="sequence definition JSON file")
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("transform", parents=[common], help="formal or integral Laplace/Borel transforms")
    t.add_argument("kind", choices=("formal-laplace", "formal-borel", "laplace", "borel"))
    t.add_argument("--alpha", type=float, required=True)
    t.add_argument("--tau", type=float, default=0.0, help="direction of integration")
    t.add_argument("--series", help="series JSON file (formal transforms)")
    t.add_argument("--series-builtin", help="builtin series name (formal transforms)")
    t.add_argument("--terms", type=int, default=20, help="coefficients of a builtin series")
    t.add_argument("--definition", help="sequence definition whose weighted norms are reported")
    t.add_argument("--norm-type", type=float, default=1.0, help="type A of the weighted norm")
    t.add_argument("--function", help="builtin function (integral transforms)")
    t.add_argument("--param", action="append", help="builtin function parameter key=value")
    t.add_argument("--points", help="comma-separated points: a+bj or modulus@argument")
    t.add_argument("--arc-radius", type=float, default=1.0)
    t.add_argument("--epsilon", type=float, default=0.5)
    t.set_defaults(func=cmd_transform)

    v = sub.add_parser("verify", parents=[common], help="check a uniform asymptotic expansion claim")
    v.add_argument("claim", help="claim JSON file")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("catalog", parents=[common], help="list or show catalog sequences")
    c.add_argument("action", choices=("list", "show"))
    c.add_argument("id", nargs="?")
    c.set_defaults(func=cmd_catalog)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except NumericalFailure as exc:
        print(f"weightseq: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InputError, DomainError, ValueError, KeyError, TypeError) as exc:
        print(f"weightseq: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entry_point() -> None:
    sys.exit(main())
