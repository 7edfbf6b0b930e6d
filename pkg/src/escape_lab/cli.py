"""escape-lab command line.

    escape-lab tent-table [--x0 ...] [--k ...] [--full] [--check]
    escape-lab naive-table [--k ...] [--check]
    escape-lab cat [--check]
    escape-lab logistic --levels N [--check]
    escape-lab simulate (--x0 X | --skew S | --spec FILE) --levels L --hole I
    escape-lab report (--x0 X | --skew S | --spec FILE) [--levels L]

Exit status is 0 only when every inequality verdict holds and, with
``--check``, every comparison against the reference values is within
tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import reference as ref
from ._workers import ordered_map
from .errors import EscapeLabError, InsufficientDataError
from .estimators import build_report, escape_rate_from_eigenvalue, naive_n1
from .maps import cat_map_eigenvalues, load_map_spec, make_skewed_tent
from .montecarlo import fit_escape_rate, simulate_survival
from .spectral import DEFAULT_TOL, leading_eigenvalue
from .systems import cat_system, interval_system, logistic_system, system_from_spec
from .transition import levels_for_cells, punch_hole

FORMATS = ("pretty", "json", "csv")
MC_REL_TOL = 0.02
MC_SIGMAS = 3.0


def _g(x) -> str:
    return "inf" if isinstance(x, float) and math.isinf(x) else f"{x:.17g}"


def _p5(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, str):
        return x
    return "inf" if math.isinf(x) else f"{x:.5f}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return "inf" if math.isinf(x) else float(_g(x))
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _write(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _report_block(report) -> list[str]:
    lines = [f"{'hole':>5} {'mu':>9} {'p':>9} {'rho':>9}"]
    for r, mu in zip(report.hole_rates, report.measure):
        lines.append(f"{r.hole_index + 1:>5} {_p5(mu):>9} {_p5(r.p):>9} {_p5(r.rho):>9}")
    lines += [
        f"<rho>        {_p5(report.average_rho)}",
        f"lower bound  {_p5(report.lower_bound)}",
        f"N1           {_p5(report.n1)}",
        f"N2           {_p5(report.n2)}",
        f"<rho> >= lower bound: {report.jensen_holds}",
        f"N2 >= N1:             {report.n2_ge_n1_holds}",
    ]
    lines += [f"note: {n}" for n in report.notes]
    return lines


# -- commands ---------------------------------------------------------------

def _tent_cell(x0, k, tol, full):
    entry = {"x0": x0, "k": k}
    try:
        levels = levels_for_cells(k)
        sys_ = interval_system(make_skewed_tent(x0), levels)
        report = build_report(sys_.matrix, sys_.measure, tol, workers=1, diagnose=False)
    except EscapeLabError as exc:
        entry["error"] = str(exc)
        return entry, None
    entry["lower_bound"] = report.lower_bound
    if full:
        entry.update(average_rho=report.average_rho, n1=report.n1, n2=report.n2)
    return entry, report


def cmd_tent_table(args) -> int:
    pairs = [(x0, k) for x0 in args.x0 for k in args.k]
    results = ordered_map(lambda xk: _tent_cell(*xk, args.tol, args.full), pairs)
    ok = True
    entries = []
    for entry, report in results:
        if report is None:
            ok = False
        else:
            ok &= report.verdicts_hold if args.full else report.jensen_holds
        if args.check:
            expected = ref.tent_reference(entry["x0"], entry["k"])
            if expected is not None:
                entry["reference"] = expected
                entry["within_tol"] = ("lower_bound" in entry
                                       and abs(entry["lower_bound"] - expected) <= ref.TENT_TOL)
                ok &= entry["within_tol"]
        entries.append(entry)

    quantities = ["lower_bound"] + (["average_rho", "n1", "n2"] if args.full else [])
    by_key = {(e["x0"], e["k"]): e for e in entries}

    def value(x0, k, q):
        e = by_key[(x0, k)]
        return e.get(q, "error")

    if args.format == "json":
        text = json.dumps(_jsonable({"command": "tent-table", "entries": entries, "ok": ok}), indent=1) + "\n"
    elif args.format == "csv":
        rows = [["quantity", "x0"] + [str(k) for k in args.k]]
        for q in quantities:
            for x0 in args.x0:
                rows.append([q, _g(x0)] + [_g(v) if not isinstance(v, str) else v
                                          for v in (value(x0, k, q) for k in args.k)])
        text = _csv(rows)
    else:
        lines = []
        for q in quantities:
            lines.append(f"{q}")
            lines.append(f"{'x0':>6} " + " ".join(f"{k:>8}" for k in args.k))
            for x0 in args.x0:
                lines.append(f"{x0:>6} " + " ".join(f"{_p5(value(x0, k, q)):>8}" for k in args.k))
            lines.append("")
        errors = [e for e in entries if "error" in e]
        lines += [f"error x0={e['x0']} k={e['k']}: {e['error']}" for e in errors]
        if args.check:
            bad = [e for e in entries if e.get("within_tol") is False]
            lines.append(f"check: {len(bad)} of {sum('reference' in e for e in entries)} "
                         f"reference values outside {ref.TENT_TOL}")
        text = "\n".join(lines) + "\n"
    _write(args, text)
    return 0 if ok else 1


def cmd_naive_table(args) -> int:
    values = [(k, naive_n1(k)) for k in args.k]
    ok = True
    checks = {}
    if args.check:
        for k, v in values:
            if k in ref.N1:
                checks[k] = math.isclose(ref.truncate(v), ref.N1[k], abs_tol=1e-12)
                ok &= checks[k]
    if args.format == "json":
        text = json.dumps(_jsonable({"command": "naive-table",
                                     "n1": [{"k": k, "n1": v, **({"matches_reference": checks[k]} if k in checks else {})}
                                            for k, v in values], "ok": ok}), indent=1) + "\n"
    elif args.format == "csv":
        text = _csv([["quantity"] + [str(k) for k, _ in values], ["N1"] + [_g(v) for _, v in values]])
    else:
        text = (f"{'k':>4} " + " ".join(f"{k:>8}" for k, _ in values) + "\n"
                + f"{'N1':>4} " + " ".join(f"{_p5(v):>8}" for _, v in values) + "\n")
    _write(args, text)
    return 0 if ok else 1


def cmd_cat(args) -> int:
    sys_ = cat_system(0)
    report = build_report(sys_.matrix, sys_.measure, args.tol, label=sys_.label)
    closed = cat_map_eigenvalues()
    lam = report.p
    ok = report.verdicts_hold
    checks = {}
    if args.check:
        checks = {
            "eigenvalues": bool(np.max(np.abs(lam - closed)) <= ref.CAT_EIGENVALUE_TOL),
            "average_rho": abs(report.average_rho - ref.CAT_AVERAGE_RHO) <= ref.CAT_TOL,
            "lower_bound": abs(report.lower_bound - ref.CAT_LOWER_BOUND) <= ref.CAT_TOL,
        }
        ok &= all(checks.values())
    if args.format == "json":
        doc = {"command": "cat", "report": report.to_dict(),
               "eigenvalues_closed_form": closed.tolist(), "checks": checks, "ok": ok}
        text = json.dumps(_jsonable(doc), indent=1) + "\n"
    elif args.format == "csv":
        rows = [["hole", "measure", "eigenvalue", "closed_form", "rho"]]
        for r, mu, c in zip(report.hole_rates, report.measure, closed):
            rows.append([r.hole_index + 1, _g(mu), _g(r.p), _g(c), _g(r.rho)])
        text = _csv(rows) + report.to_csv()
    else:
        lines = ["cat map, five-cell generating partition"]
        lines += [f"  lambda_{i + 1} = {l:.12f}  (closed form {c:.12f})" for i, (l, c) in enumerate(zip(lam, closed))]
        lines += _report_block(report)
        lines += [f"check {k}: {'ok' if v else 'FAIL'}" for k, v in checks.items()]
        text = "\n".join(lines) + "\n"
    _write(args, text)
    return 0 if ok else 1


def cmd_logistic(args) -> int:
    n = args.levels
    sys_ = logistic_system(n)
    report = build_report(sys_.matrix, sys_.measure, args.tol, label=sys_.label)
    tent = interval_system(make_skewed_tent(0.5), n - 1)
    tent_report = build_report(tent.matrix, tent.measure, args.tol)
    diffs = [abs(a - b) for a, b in [
        (report.average_rho, tent_report.average_rho),
        (report.lower_bound, tent_report.lower_bound),
        (report.n1, tent_report.n1), (report.n2, tent_report.n2),
    ]] + list(np.abs(report.p - tent_report.p))
    max_diff = float(max(diffs))
    equal = max_diff <= ref.TRANSFER_TOL
    ok = report.verdicts_hold and equal
    expected = ref.tent_reference(0.5, 2 ** n) if args.check else None
    if expected is not None:
        ok &= abs(report.lower_bound - expected) <= ref.TENT_TOL
    if args.format == "json":
        doc = {"command": "logistic", "n": n, "breakpoints": sys_.partition.breakpoints.tolist(),
               "report": report.to_dict(), "max_diff_vs_tent": max_diff,
               "equals_tent": equal, "ok": ok}
        text = json.dumps(_jsonable(doc), indent=1) + "\n"
    elif args.format == "csv":
        rows = [["cell", "lo", "hi", "mu"]]
        for j, c in enumerate(sys_.partition.cells):
            rows.append([j + 1, _g(c.lo), _g(c.hi), _g(sys_.measure.weights[j])])
        text = _csv(rows) + report.to_csv()
    else:
        lines = [f"logistic map, n={n}, k={2 ** n}", "breakpoints: "
                 + ", ".join(f"{b:.6f}" for b in sys_.partition.breakpoints)]
        lines += _report_block(report)
        lines.append(f"max |logistic - tent(0.5)| = {max_diff:.3e} ({'equal' if equal else 'DIFFERENT'})")
        text = "\n".join(lines) + "\n"
    _write(args, text)
    return 0 if ok else 1


def _spec_from_args(args) -> dict:
    if args.spec:
        with open(args.spec) as fh:
            spec = json.load(fh)
        if args.levels is not None:
            spec["level"] = args.levels
        return load_map_spec(spec)
    level = args.levels if args.levels is not None else 0
    if args.x0 is not None:
        return load_map_spec({"kind": "tent", "x0": args.x0, "level": level})
    if args.skew is not None:
        return load_map_spec({"kind": "doubling", "skew": args.skew, "level": level})
    raise EscapeLabError("one of --x0, --skew or --spec is required")


def cmd_simulate(args) -> int:
    spec = _spec_from_args(args)
    if spec["kind"] not in ("tent", "doubling"):
        raise EscapeLabError("simulate needs an interval map (tent or doubling)")
    sys_ = system_from_spec(spec)
    k = len(sys_.partition)
    if not 1 <= args.hole <= k:
        raise EscapeLabError(f"--hole must lie in 1..{k}")
    i = args.hole - 1
    spectral = leading_eigenvalue(punch_hole(sys_.matrix, i), args.tol)
    rho = escape_rate_from_eigenvalue(spectral.eigenvalue)
    series = simulate_survival(sys_.map, sys_.partition.cell(i), args.nmax, args.samples, args.seed)
    fit = fit_escape_rate(series, (args.fit_start, min(args.fit_end, args.nmax)))
    diff = abs(fit.rate - rho)
    allowed = max(MC_REL_TOL * rho, MC_SIGMAS * fit.stderr)
    passed = diff <= allowed
    ok = passed or not args.check
    doc = {"command": "simulate", "spec": spec, "hole": args.hole, "samples": args.samples,
           "seed": args.seed, "initial": "uniform on the complement of the hole", "spectral_rho": rho, "fit_rate": fit.rate, "fit_stderr": fit.stderr,
           "fit_window": list(fit.window), "abs_diff": diff,
           "rel_diff": diff / rho if rho else math.inf, "allowed": allowed, "pass": passed}
    if args.format == "json":
        doc["survivors"] = series.counts.tolist()
        text = json.dumps(_jsonable(doc), indent=1) + "\n"
    elif args.format == "csv":
        text = series.to_csv()
    else:
        text = "\n".join([
            f"{sys_.label}, hole {args.hole} = [{sys_.partition.cell(i).lo:.6f}, {sys_.partition.cell(i).hi:.6f}]",
            f"spectral rho   {rho:.5f}",
            f"fitted rate    {fit.rate:.5f} +/- {fit.stderr:.5f}  (n in [{fit.window[0]}, {fit.window[1]}], N={args.samples}, seed={args.seed})",
            "initial law    uniform on the complement of the hole",
            f"discrepancy    {diff:.5f} ({100 * doc['rel_diff']:.2f}%), allowed {allowed:.5f}",
            f"result         {'PASS' if passed else 'FAIL'}",
        ]) + "\n"
    _write(args, text)
    return 0 if ok else 1


def cmd_report(args) -> int:
    spec = _spec_from_args(args)
    sys_ = system_from_spec(spec)
    report = build_report(sys_.matrix, sys_.measure, args.tol, label=sys_.label)
    ok = report.verdicts_hold
    if args.format == "json":
        text = report.to_json(indent=1) + "\n"
    elif args.format == "csv":
        text = report.to_csv()
    else:
        text = "\n".join([sys_.label] + _report_block(report)) + "\n"
    _write(args, text)
    return 0 if ok else 1


# -- argument parsing -------------------------------------------------------

def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"{text} is negative")
    return v


def _unit_open(text):
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in (0, 1)")
    return v


def _cell_count(text):
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("cell counts start at 2")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"{text} is not positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)
    common.add_argument("--format", choices=FORMATS, default="pretty")
    common.add_argument("--check", action="store_true", help="compare against reference values")
    common.add_argument("--out", metavar="FILE")

    parser = argparse.ArgumentParser(prog="escape-lab", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tent-table", parents=[common], help="lower-bound table for skewed tent maps")
    p.add_argument("--x0", type=_unit_open, nargs="+", default=list(ref.TENT_X0))
    p.add_argument("--k", type=_cell_count, nargs="+", default=list(ref.TABLE_K))
    p.add_argument("--full", action="store_true", help="also emit <rho>, N1 and N2")
    p.set_defaults(func=cmd_tent_table)

    p = sub.add_parser("naive-table", parents=[common], help="N1 = -ln(1 - 1/k)")
    p.add_argument("--k", type=_cell_count, nargs="+", default=list(ref.TABLE_K))
    p.set_defaults(func=cmd_naive_table)

    p = sub.add_parser("cat", parents=[common], help="cat map five-cell report")
    p.set_defaults(func=cmd_cat)

    p = sub.add_parser("logistic", parents=[common], help="logistic map on 2**levels cells")
    p.add_argument("--levels", type=_positive_int, default=2)
    p.set_defaults(func=cmd_logistic)

    for name, func, helptext in (("simulate", cmd_simulate, "Monte Carlo check of one hole"),
                                 ("report", cmd_report, "estimate report for any system")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        which = p.add_mutually_exclusive_group()
        which.add_argument("--x0", type=_unit_open)
        which.add_argument("--skew", type=_unit_open)
        which.add_argument("--spec", metavar="FILE", help="map-spec JSON document")
        p.add_argument("--levels", type=_nonneg_int)
        p.set_defaults(func=func)
        if name == "simulate":
            p.add_argument("--hole", type=_positive_int, default=1, help="1-based cell index")
            p.add_argument("--samples", type=_positive_int, default=10**7)
            p.add_argument("--nmax", type=_positive_int, default=20)
            p.add_argument("--seed", type=_nonneg_int, default=0)
            p.add_argument("--fit-start", type=_nonneg_int, default=5)
            p.add_argument("--fit-end", type=_positive_int, default=20)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InsufficientDataError as exc:
        print(f"escape-lab: insufficient data: {exc}", file=sys.stderr)
        return 1
    except EscapeLabError as exc:
        parser.error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
