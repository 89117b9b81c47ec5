"""Command-line interface: ``orthoasym <verb> [options]``.

Exit codes: 0 success, 1 check failure or empty selection, 2 usage error,
3 numerical failure (precision cap reached).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import statistics
import sys
from dataclasses import dataclass, replace
from fractions import Fraction

from . import asymptotics, verify
from .asymptotics import DEFAULT_ZONES, REGIONS
from .numerics import DEFAULT_BITS, DomainError, PrecisionError, SignedLog, check_bits, context, max_bits_from_env
from .recurrence import FAMILIES, Point, eval_sequence, find_zeros, parse_point

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

REPORT_FIELDS = (
    "family",
    "region",
    "n",
    "point_re",
    "point_im",
    "exact_sign_or_phase",
    "exact_log10",
    "approx_sign_or_phase",
    "approx_log10",
    "rel_err",
    "bits_used",
)
CHECK_FIELDS = ("suite", "name", "value", "limit", "passed")
ZERO_FIELDS = ("family", "n", "index", "zero")
SUITES = ("exact", "brackets", "quadrature", "lemma", "gamma", "matching", "zeros")


class UsageError(Exception):
    pass


def _round17(x) -> float:
    """Round a real to 17 significant digits as a float (ints pass through)."""
    if isinstance(x, int):
        return x
    return float(f"{float(x):.17g}")


def _sign_or_phase(v: SignedLog):
    """Integer sign for real values, else the phase angle in radians."""
    if v.is_real:
        return int(v.phase)
    return _round17(v.angle())


def _log10(v: SignedLog):
    if v.is_zero:
        return None
    return _round17(v.log10_modulus())


def report_row(r: verify.ErrorReport) -> dict:
    return {
        "family": r.family,
        "region": r.region,
        "n": r.n,
        "point_re": _round17(r.point.re),
        "point_im": _round17(r.point.im),
        "exact_sign_or_phase": _sign_or_phase(r.exact),
        "exact_log10": _log10(r.exact),
        "approx_sign_or_phase": _sign_or_phase(r.approx),
        "approx_log10": _log10(r.approx),
        "rel_err": _round17(r.rel_err),
        "bits_used": r.bits_used,
    }


def value_row(family, region, n, point: Point, value: SignedLog, bits, *, side) -> dict:
    """A ReportRow carrying a single value; the other side's columns are empty."""
    row = dict.fromkeys(REPORT_FIELDS)
    row.update(family=family, region=region, n=n, point_re=_round17(point.re), point_im=_round17(point.im), bits_used=bits)
    row[f"{side}_sign_or_phase"] = _sign_or_phase(value)
    row[f"{side}_log10"] = _log10(value)
    return row


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit(rows, fields, fmt) -> str:
    """Serialise rows as CSV (header first) or a JSON array of objects."""
    if fmt == "json":
        return json.dumps([{k: row[k] for k in fields} for row in rows], indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([_csv_cell(row[k]) for k in fields])
    return buf.getvalue()


# -- verbs ---------------------------------------------------------------


def _zones(args):
    return replace(
        DEFAULT_ZONES,
        **{k: v for k, v in (("delta", args.delta), ("delta_min", args.delta_min), ("rho", args.rho)) if v is not None},
    )


def cmd_eval(args, out):
    p = args.point
    if args.exact:
        if not p.is_real:
            raise UsageError("--exact needs a real rational point")
        value = eval_sequence(args.family, args.n, p, mode="exact").last
        out.write(f"{value}\n")
        return EXIT_OK
    seq = eval_sequence(args.family, args.n, p, mode="float", bits=args.bits, max_bits=args.max_bits)
    value = SignedLog.from_value(seq.last, context(seq.bits))
    if p.is_real:
        value = value.realify()
    out.write(emit([value_row(args.family, "", args.n, p, value, seq.bits, side="exact")], REPORT_FIELDS, args.format))
    return EXIT_OK


def cmd_approx(args, out):
    if args.exact:
        raise UsageError("--exact applies only to eval")
    value = asymptotics.approximant(args.family, args.region, args.n, args.point, zones=_zones(args), bits=args.bits)
    row = value_row(args.family, args.region, args.n, args.point, value, args.bits, side="approx")
    out.write(emit([row], REPORT_FIELDS, args.format))
    return EXIT_OK


def cmd_compare(args, out):
    r = verify.compare(args.family, args.region, args.n, args.point, bits=args.bits, max_bits=args.max_bits, zones=_zones(args))
    out.write(emit([report_row(r)], REPORT_FIELDS, args.format))
    return EXIT_OK


def cmd_sweep(args, out):
    try:
        res = verify.convergence_sweep(
            args.family, args.region, args.point, args.ns, bits=args.bits, max_bits=args.max_bits, zones=_zones(args)
        )
    except verify.InsufficientDataError as exc:
        print(f"orthoasym: empty selection: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if res.skipped:
        print(f"orthoasym: skipped near zeros of the approximant: n = {res.skipped}", file=sys.stderr)
    print(f"orthoasym: empirical order {float(res.empirical_order):.6g}, monotone {res.monotone}", file=sys.stderr)
    rows = sorted((report_row(r) for r in res.reports), key=lambda row: (row["n"], row["point_re"], row["point_im"]))
    out.write(emit(rows, REPORT_FIELDS, args.format))
    return EXIT_OK


def cmd_zeros(args, out):
    zeros = find_zeros(args.family, args.n, bits=args.bits)
    rows = [{"family": args.family, "n": args.n, "index": i, "zero": _round17(z)} for i, z in enumerate(zeros, start=1)]
    out.write(emit(rows, ZERO_FIELDS, args.format))
    return EXIT_OK


# -- check suites --------------------------------------------------------


@dataclass
class CheckRow:
    suite: str
    name: str
    value: float
    limit: float

    @property
    def passed(self):
        return self.value <= self.limit


def _suite_exact(bits):
    failures = verify.exact_identity_suite()
    return [CheckRow("exact", "mismatches", len(failures), 0)]


def _suite_brackets(bits):
    rows = []
    for n in (10, 50, 200):
        for y in (Fraction(11, 10), Fraction(3, 2), Fraction(2)):
            rep = verify.bracket_check_hermite(n, y, bits=bits)
            rows.append(CheckRow("brackets", f"hermite n={n} y={y}", len(rep.failures), 0))
        for x in (-5, Fraction(3, 2) * n * n, 2 * n * n):
            rep = verify.bracket_check_ismail(n, x)
            rows.append(CheckRow("brackets", f"ismail n={n} x={x}", len(rep.failures), 0))
    return rows


def _point_label(value):
    p = Point.of(value)
    return str(p.re) if p.is_real else f"{p.re}{'+' if p.im > 0 else '-'}{abs(p.im)}i"


def _suite_quadrature(bits):
    return [
        CheckRow("quadrature", f"({c.identity}) y={_point_label(c.y)}", float(c.diff), c.tol)
        for c in verify.quadrature_suite(bits=bits)
    ]


def _suite_lemma(bits):
    sq = verify.lemma_residual_check("sqrt", Fraction(1, 2), (64, 128, 256), bits=bits)
    rows = [CheckRow("lemma", f"sqrt y=1/2 |ratio(n={n})-4|", abs(float(r) - 4), 1) for n, r in sq.ratios.items()]
    square = verify.lemma_residual_check("square", Fraction(1, 2), (64, 128, 256), bits=bits)
    limit = 2.0 ** (32 - bits)
    rows += [CheckRow("lemma", f"square y=1/2 residual n={n}", float(r), limit) for n, r in square.rows]
    return rows


GAMMA_NS = tuple(range(8, 1025, 8))


def _suite_gamma(bits):
    rows = []
    for which in ("legendre", "hermite"):
        table = verify.gamma_ratio_check(which, GAMMA_NS, bits=bits)
        rows.append(CheckRow("gamma", f"{which} max/first of n^2 deviation", float(max(table.scaled) / table.scaled[0]), 2))
    return rows


def _suite_matching(bits):
    pt = Point(Fraction(1, 2), Fraction(1, 5))
    rows = []
    for family, (n1, n2) in (("legendre", (50, 100)), ("hermite", (64, 128))):
        e1 = verify.matching_check(family, n1, pt, bits=bits).mutual_rel_err
        e2 = verify.matching_check(family, n2, pt, bits=bits).mutual_rel_err
        rows.append(CheckRow("matching", f"{family} err(n={n2})/err(n={n1})", float(e2 / e1), 1))
    return rows


def _suite_zeros(bits):
    medians = {}
    rows = []
    for n in (20, 40, 80):
        devs = [float(r.deviation) for r in verify.zero_proximity(n, bits=bits)]
        medians[n] = statistics.median(devs)
        if n == 80:
            rows.append(CheckRow("zeros", "ismail n=80 max deviation", max(devs), verify.ZERO_DEVIATION_BOUND))
    rows.append(CheckRow("zeros", "median n=40/n=20", medians[40] / medians[20], 1))
    rows.append(CheckRow("zeros", "median n=80/n=40", medians[80] / medians[40], 1))
    return rows


SUITE_RUNNERS = {
    "exact": _suite_exact,
    "brackets": _suite_brackets,
    "quadrature": _suite_quadrature,
    "lemma": _suite_lemma,
    "gamma": _suite_gamma,
    "matching": _suite_matching,
    "zeros": _suite_zeros,
}


def cmd_check(args, out):
    suites = SUITES if args.suite == "all" else (args.suite,)
    rows = []
    for s in suites:
        rows.extend(SUITE_RUNNERS[s](args.bits))
    if args.tol is not None:
        rows = [replace(r, limit=args.tol) for r in rows]
    dicts = [
        {"suite": r.suite, "name": r.name, "value": _round17(r.value), "limit": _round17(r.limit), "passed": r.passed}
        for r in rows
    ]
    out.write(emit(dicts, CHECK_FIELDS, args.format))
    failed = [r for r in rows if not r.passed]
    for r in failed:
        print(f"orthoasym: FAIL {r.suite}: {r.name}: {r.value:.6g} > {r.limit:.6g}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


# -- parsing -------------------------------------------------------------


def _point(text):
    try:
        return parse_point(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _ns(text):
    try:
        ns = [int(s) for s in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--ns must be comma-separated integers, got {text!r}") from None
    if any(n < 1 for n in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
        raise argparse.ArgumentTypeError("--ns must be positive and strictly increasing")
    return ns


def _nonneg_int(text):
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("n must be >= 0")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orthoasym", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bits", type=int, default=DEFAULT_BITS, help="working precision in bits (default %(default)s)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    def family_args(p, region=True):
        p.add_argument("--family", choices=sorted(FAMILIES), required=True)
        if region:
            p.add_argument("--region", choices=REGIONS, required=True)
            p.add_argument("--delta", type=float, help="oscillatory shrink of the interval")
            p.add_argument("--delta-min", type=float, help="minimum outer distance from the interval")
            p.add_argument("--rho", type=float, help="oscillatory strip half-width")

    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("eval", parents=[common], help="pi_n at the raw argument x")
    family_args(p, region=False)
    p.add_argument("--n", type=_nonneg_int, required=True)
    p.add_argument("--point", type=_point, required=True, help="x as 're,im'")
    p.add_argument("--exact", action="store_true", help="print an exact fraction (real rational x only)")
    p.set_defaults(run=cmd_eval)

    for verb, run, help_ in (
        ("approx", cmd_approx, "approximant at the natural-variable point"),
        ("compare", cmd_compare, "relative error of the approximant"),
    ):
        p = sub.add_parser(verb, parents=[common], help=help_)
        family_args(p)
        p.add_argument("--n", type=_nonneg_int, required=True)
        p.add_argument("--point", type=_point, required=True, help="y as 're,im'")
        p.add_argument("--exact", action="store_true", help=argparse.SUPPRESS)
        p.set_defaults(run=run)

    p = sub.add_parser("sweep", parents=[common], help="convergence sweep over degrees")
    family_args(p)
    p.add_argument("--ns", type=_ns, required=True, help="comma-separated increasing degrees")
    p.add_argument("--point", type=_point, required=True)
    p.set_defaults(run=cmd_sweep)

    p = sub.add_parser("zeros", parents=[common], help="real zeros of pi_n")
    family_args(p, region=False)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(run=cmd_zeros)

    p = sub.add_parser("check", parents=[common], help="run verification suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--tol", type=float, help="override every pass limit (failure injection)")
    p.set_defaults(run=cmd_check)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.max_bits = max_bits_from_env()
        check_bits(args.bits, args.max_bits)
        return args.run(args, out)
    except (UsageError, DomainError) as exc:
        print(f"orthoasym: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PrecisionError as exc:
        print(f"orthoasym: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"orthoasym: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_entry():
    sys.exit(main())
