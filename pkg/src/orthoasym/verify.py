"""Numerical checks of the asymptotic formulas and the identities behind them.

Each check is a pure function returning a small report object whose
``passed`` attribute summarises it; failures are data, not exceptions.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction

from . import asymptotics
from .asymptotics import DEFAULT_ZONES, OSCILLATORY, OUTER, Zones, approximant, oscillatory_envelope
from .numerics import (
    DEFAULT_BITS,
    SignedLog,
    context,
    double_run,
    integrate,
    log_gamma,
    sl_rel_err,
    sqrt_cut,
    to_ctx,
)
from .recurrence import ISMAIL, Point, eval_sequence, find_zeros, get_family, ratio_sequence

# near-zero exclusion in oscillatory sweeps, relative to the envelope
NEAR_ZERO_FRACTION = 0.1

# oscillatory strip used when matching needs a point off the real axis
MATCHING_ZONES = Zones(rho=0.25)

# frozen from root-finder runs at n = 20, 40, 80 (largest deviation ~3.5e-6 at n = 80)
ZERO_DEVIATION_BOUND = 1e-5


class InsufficientDataError(ValueError):
    """Fewer than three usable points remain in a sweep."""

    def __init__(self, message, reports=(), skipped=()):
        super().__init__(message)
        self.reports = list(reports)
        self.skipped = list(skipped)


@dataclass(frozen=True)
class ErrorReport:
    family: str
    region: str
    n: int
    point: Point
    exact: SignedLog
    approx: SignedLog
    rel_err: object
    bits_used: int


def _scaled_argument(name, n, p: Point):
    """The argument at which ``pi_n`` is evaluated for a natural-variable point."""
    if name == "hermite":
        return lambda ctx: ctx.sqrt(2 * n) * p.to_ctx(ctx)
    if name == "ismail":
        return p.scaled(n * n)
    return p


def exact_value(family, n, point, *, bits=DEFAULT_BITS, max_bits=None):
    """``pi_n`` at the scaled argument as a SignedLog, with the precision used.

    Rational arguments are evaluated exactly; the rest go through the
    double-run float recurrence.
    """
    name = get_family(family).name
    p = Point.of(point)
    seq = eval_sequence(name, n, _scaled_argument(name, n, p), bits=bits, max_bits=max_bits)
    if seq.mode == "exact":
        return SignedLog.from_value(seq.last, context(bits)), bits
    value = SignedLog.from_value(seq.last, context(seq.bits))
    return (value.realify() if p.is_real else value), seq.bits


def compare(family, region, n, point, *, bits=DEFAULT_BITS, max_bits=None, zones=DEFAULT_ZONES) -> ErrorReport:
    """Relative error of the ``(family, region)`` approximant against ``pi_n``."""
    name = get_family(family).name
    p = asymptotics.check_zone(name, region, point, zones)
    exact, exact_bits = exact_value(name, n, p, bits=bits, max_bits=max_bits)
    approx, approx_bits = double_run(
        lambda b: approximant(name, region, n, p, zones=zones, bits=b), bits, max_bits
    )
    return ErrorReport(
        family=name,
        region=region,
        n=n,
        point=p,
        exact=exact,
        approx=approx,
        rel_err=sl_rel_err(exact, approx),
        bits_used=max(exact_bits, approx_bits),
    )


@dataclass(frozen=True)
class SweepResult:
    reports: list
    empirical_order: float
    monotone: bool
    skipped: list = field(default_factory=list)

    @property
    def rel_errs(self):
        return [r.rel_err for r in self.reports]


def empirical_order(ns, errs) -> float:
    """Least-squares slope of ``log(err)`` against ``log(n)``."""
    xs = [math.log(n) for n in ns]
    ys = [math.log(float(e)) for e in errs]
    return statistics.linear_regression(xs, ys).slope


def _near_zero(report, zones, bits):
    if report.approx.is_zero:
        return True
    env = oscillatory_envelope(report.family, report.n, report.point, zones=zones, bits=bits)
    return report.approx.logmod < env.logmod + math.log(NEAR_ZERO_FRACTION)


def convergence_sweep(family, region, point, ns, *, bits=DEFAULT_BITS, max_bits=None, zones=DEFAULT_ZONES) -> SweepResult:
    """Compare at each ``n`` in ``ns`` and fit the empirical error order.

    In the oscillatory region, degrees where the approximant is below
    ``NEAR_ZERO_FRACTION`` of its envelope are skipped, since relative error
    means nothing near its zeros.

    Raises
    ------
    InsufficientDataError
        If fewer than three degrees remain (partial reports are attached).
    """
    ns = list(ns)
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("ns must be strictly increasing")
    reports, skipped = [], []
    for n in ns:
        report = compare(family, region, n, point, bits=bits, max_bits=max_bits, zones=zones)
        if region == OSCILLATORY and _near_zero(report, zones, bits):
            skipped.append(n)
            continue
        if report.rel_err == 0:
            skipped.append(n)
            continue
        reports.append(report)
    if len(reports) < 3:
        raise InsufficientDataError(
            f"only {len(reports)} usable degrees (skipped near zeros: {skipped})", reports, skipped
        )
    errs = [r.rel_err for r in reports]
    return SweepResult(
        reports=reports,
        empirical_order=empirical_order([r.n for r in reports], errs),
        monotone=all(b < a for a, b in zip(errs, errs[1:])),
        skipped=skipped,
    )


# -- bracket inequalities for the ratios --------------------------------


@dataclass(frozen=True)
class BracketRow:
    k: int
    lower: object
    w: object
    upper: object

    @property
    def margin(self):
        return min(self.w - self.lower, self.upper - self.w)

    @property
    def passed(self):
        return self.lower < self.w < self.upper


@dataclass(frozen=True)
class BracketReport:
    n: int
    point: object
    rows: list

    @property
    def passed(self):
        return all(r.passed for r in self.rows)

    @property
    def failures(self):
        return [r.k for r in self.rows if not r.passed]


def bracket_check_hermite(n, y, *, bits=DEFAULT_BITS) -> BracketReport:
    """Check the two-sided bound on ``w_k(sqrt(2n) y)`` for ``k = 1..n``.

    With ``d = x**2 - 2k`` and ``c = (x + sqrt(d))/2``::

        c [1 + 1/(2d) - (5x - sqrt(d)) / (8 d**(5/2))] < w_k < c [1 + 1/(2d)]
    """
    p = Point.of(y)
    if not p.is_real or p.re <= 1:
        raise ValueError(f"bracket check needs real y > 1, got {p}")
    ctx = context(bits)
    x = ctx.sqrt(2 * n) * p.to_ctx(ctx)
    ws = ratio_sequence("hermite", n, x, mode="float", bits=bits)
    rows = []
    for k, w in enumerate(ws, start=1):
        d = x * x - 2 * k
        rd = ctx.sqrt(d)
        c = (x + rd) / 2
        upper = c * (1 + 1 / (2 * d))
        lower = c * (1 + 1 / (2 * d) - (5 * x - rd) / (8 * d ** ctx.mpf(2.5)))
        rows.append(BracketRow(k, lower, w, upper))
    return BracketReport(n, p, rows)


def bracket_check_ismail(n, x) -> BracketReport:
    """Check ``x - (k-1)**2 - 1 < w_k(x) < x - (k-1)**2 + 1`` exactly, for real ``x`` outside ``[0, n**2]``."""
    p = Point.of(x)
    if not p.is_real or 0 <= p.re <= n * n:
        raise ValueError(f"bracket check needs real x outside [0, {n * n}], got {p}")
    ws = ratio_sequence("ismail", n, p.re, mode="exact")
    rows = []
    for k, w in enumerate(ws, start=1):
        centre = p.re - (k - 1) ** 2
        rows.append(BracketRow(k, centre - 1, w, centre + 1))
    return BracketReport(n, p, rows)


# -- quadrature identities -----------------------------------------------


@dataclass(frozen=True)
class IdentityCheck:
    identity: str
    y: object
    lhs: object
    rhs: object
    tol: float

    @property
    def diff(self):
        return abs(self.lhs - self.rhs)

    @property
    def passed(self):
        return self.diff <= self.tol


def _identities(ctx):
    def log_sqrt(y):
        s = sqrt_cut(y, ctx)
        return (
            lambda t: ctx.log(y + ctx.sqrt(y * y - t)),
            y * y - ctx.mpf(0.5) - y * s + ctx.log(y + s),
        )

    def reciprocal(y):
        return lambda t: 1 / (4 * (y * y - t)), ctx.log(y * y / (y * y - 1)) / 4

    def log_square(y):
        r = ctx.sqrt(y)
        return (
            lambda t: ctx.log(y - t * t),
            (r + 1) * ctx.log(r + 1) - (r - 1) * ctx.log(r - 1) - 2,
        )

    def ratio(y):
        return lambda t: 2 * t / (y - t * t), ctx.log(y / (y - 1))

    return {"a": log_sqrt, "b": reciprocal, "c": log_square, "d": ratio}


QUADRATURE_POINTS = (Fraction(3, 2), Fraction(2), Fraction(4), complex(2, 1))
IDENTITY_NAMES = {
    "a": "int_0^1 log(y+sqrt(y^2-t)) dt = y^2-1/2-y sqrt(y^2-1)+log(y+sqrt(y^2-1))",
    "b": "int_0^1 dt/(4(y^2-t)) = log(y^2/(y^2-1))/4",
    "c": "int_0^1 log(y-t^2) dt = (sqrt y+1)log(sqrt y+1)-(sqrt y-1)log(sqrt y-1)-2",
    "d": "int_0^1 2t/(y-t^2) dt = log(y/(y-1))",
}


def identity_check(identity, y, *, bits=DEFAULT_BITS, tol=1e-20) -> IdentityCheck:
    ctx = context(bits)
    yv = ctx.mpc(Point.of(y).to_ctx(ctx))
    if Point.of(y).is_real:
        yv = yv.real
    integrand, rhs = _identities(ctx)[identity](yv)
    lhs = integrate(integrand, 0, 1, ctx.ldexp(1, -(bits // 2)), ctx)
    return IdentityCheck(identity, y, lhs, rhs, tol)


def quadrature_suite(ys=QUADRATURE_POINTS, *, bits=DEFAULT_BITS, tol=1e-20) -> list[IdentityCheck]:
    """Check the four integral identities at every ``y`` by independent quadrature."""
    return [identity_check(name, y, bits=bits, tol=tol) for name in "abcd" for y in ys]


# -- gamma-function ratios -----------------------------------------------


@dataclass(frozen=True)
class GammaRatioTable:
    which: str
    rows: list  # (n, ratio, n**2 * |ratio - target|)

    @property
    def scaled(self):
        return [r[2] for r in self.rows]

    @property
    def passed(self):
        return max(self.scaled) <= 2 * self.scaled[0]


def gamma_ratio(which, n, *, bits=DEFAULT_BITS):
    """Legendre: ``Gamma(n/2+1/2)**2 (n/2+1/4) / Gamma(n/2+1)**2``.
    Hermite: ``Gamma(n/2+1/2) sqrt(n/2) / Gamma(n/2+1)``."""
    ctx = context(bits)
    half = Fraction(n, 2)
    a = log_gamma(half + Fraction(1, 2), ctx)
    b = log_gamma(half + 1, ctx)
    if which == "legendre":
        return ctx.exp(2 * a - 2 * b) * to_ctx(ctx, half + Fraction(1, 4))
    if which == "hermite":
        return ctx.exp(a - b) * ctx.sqrt(to_ctx(ctx, half))
    raise ValueError(f"which must be legendre or hermite, got {which!r}")


def gamma_ratio_check(which, ns, *, bits=DEFAULT_BITS) -> GammaRatioTable:
    """Tabulate ``n**2 |ratio - target|`` (target ``1`` or ``1 - 1/(4n)``); passes if bounded."""
    ctx = context(bits)
    rows = []
    for n in sorted(ns):
        r = gamma_ratio(which, n, bits=bits)
        target = 1 if which == "legendre" else 1 - ctx.mpf(1) / (4 * n)
        rows.append((n, r, n * n * abs(r - target)))
    return GammaRatioTable(which, rows)


# -- local phase expansions ----------------------------------------------


@dataclass(frozen=True)
class LemmaTable:
    kind: str
    y: object
    rows: list  # (n, residual)
    ratios: dict  # n -> residual(n) / residual(2n)


def lemma_residual(phase, kind, y, n, *, bits=DEFAULT_BITS):
    """Largest deviation of the four cos/sin expansions at degree ``n``."""
    kind = asymptotics.normalize_kind(kind)
    ctx = context(bits)
    yv = to_ctx(ctx, Point.of(y).re)
    ex = asymptotics.local_expansion(phase, kind, yv, bits=bits)
    lam, mu = ex.lam, ex.mu
    base = n * phase.value(ctx, yv)
    cn, sn = ctx.cos(base), ctx.sin(base)
    worst = ctx.mpf(0)
    for s in (1, -1):
        ratio = ctx.mpf(n) / (n + s)
        y_shift = (ctx.sqrt(ratio) if kind == asymptotics.SQRT_SCALING else ratio**2) * yv
        shifted = (n + s) * phase.value(ctx, y_shift)
        c_part = ctx.cos(lam) - s * mu / n * ctx.sin(lam)
        s_part = ctx.sin(lam) + s * mu / n * ctx.cos(lam)
        cos_exp = cn * c_part - s * sn * s_part
        sin_exp = sn * c_part + s * cn * s_part
        worst = max(worst, abs(ctx.cos(shifted) - cos_exp), abs(ctx.sin(shifted) - sin_exp))
    return worst


def lemma_residual_check(kind, y, ns, *, phase=None, bits=DEFAULT_BITS) -> LemmaTable:
    """Residuals of the local expansion and their reduction factors under doubling.

    ``ratios[n] = residual(n) / residual(2n)``; a second-order remainder
    gives about 4.
    """
    kind = asymptotics.normalize_kind(kind)
    if phase is None:
        phase = asymptotics.HERMITE_PHASE if kind == asymptotics.SQRT_SCALING else asymptotics.ISMAIL_PHASE
    rows = [(n, lemma_residual(phase, kind, y, n, bits=bits)) for n in ns]
    res = dict(rows)
    ratios = {n: res[n] / res[2 * n] for n in res if 2 * n in res and res[2 * n] != 0}
    return LemmaTable(kind, y, rows, ratios)


# -- matching in the overlap ---------------------------------------------


@dataclass(frozen=True)
class MatchingReport:
    family: str
    n: int
    point: Point
    outer: SignedLog
    oscillatory: SignedLog
    mutual_rel_err: object


def matching_check(family, n, point, *, bits=DEFAULT_BITS, zones=MATCHING_ZONES) -> MatchingReport:
    """Evaluate both approximants at one point of the overlap and compare them."""
    name = get_family(family).name
    p = Point.of(point)
    for region in (OUTER, OSCILLATORY):
        asymptotics.check_zone(name, region, p, zones)
    outer = approximant(name, OUTER, n, p, zones=zones, bits=bits)
    osc = approximant(name, OSCILLATORY, n, p, zones=zones, bits=bits)
    return MatchingReport(name, n, p, outer, osc, sl_rel_err(outer, osc))


# -- zeros of the Ismail polynomials -------------------------------------


@dataclass(frozen=True)
class ZeroRow:
    j: int
    zero: object
    deviation: object


def zero_proximity(n, *, delta=0.1, bits=DEFAULT_BITS) -> list[ZeroRow]:
    """Distance from each interior square ``j**2`` to the nearest zero of ``pi_n``.

    Deviations are normalised by the gap ``2j + 1`` between consecutive
    squares.  Interior means ``sqrt(delta) <= j/n <= sqrt(1 - delta)``.
    """
    if n < 10:
        raise ValueError("zero_proximity needs n >= 10")
    zeros = find_zeros(ISMAIL, n, bits=bits)
    lo, hi = math.sqrt(delta), math.sqrt(1 - delta)
    rows = []
    for j in range(1, n + 1):
        if not lo <= j / n <= hi:
            continue
        target = j * j
        z = min(zeros, key=lambda v: abs(v - target))
        rows.append(ZeroRow(j, z, abs(z - target) / (2 * j + 1)))
    return rows


# -- exact identities ----------------------------------------------------


def classical_legendre(n, x: Fraction) -> Fraction:
    """``P_n(x)`` from ``(k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}``."""
    prev, cur = Fraction(1), Fraction(x)
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1) * x * cur - k * prev) / (k + 1)
    return cur


def classical_hermite(n, x: Fraction) -> Fraction:
    """Physicists' ``H_n(x)`` from ``H_{k+1} = 2x H_k - 2k H_{k-1}``."""
    prev, cur = Fraction(1), 2 * Fraction(x)
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, 2 * x * cur - 2 * k * prev
    return cur


def monic_from_classical(family, n, x: Fraction) -> Fraction:
    """Monic ``pi_n`` rebuilt from the classical normalisation."""
    name = get_family(family).name
    if name == "legendre":
        # leading coefficient of P_n is (2n)! / (2**n n!**2)
        lead = Fraction(math.factorial(2 * n), 2**n * math.factorial(n) ** 2)
        return classical_legendre(n, x) / lead
    if name == "hermite":
        return classical_hermite(n, x) / 2**n
    raise ValueError(f"no classical normalisation for {name}")


EXACT_POINTS = (Fraction(-5, 7), Fraction(1, 3), Fraction(3, 2), Fraction(2), Fraction(-11, 4))


@dataclass(frozen=True)
class IdentityFailure:
    identity: str
    family: str
    n: int
    point: Fraction


def exact_identity_suite(*, qn_max=40, classical_max=30, product_max=50, points=EXACT_POINTS) -> list[IdentityFailure]:
    """Exact-rational identities; returns the failures (empty when all hold)."""
    failures = []
    for n in range(qn_max + 1):
        for t in points:
            if asymptotics.qn_explicit(n, t) != asymptotics.qn_recurrence(n, t):
                failures.append(IdentityFailure("qn", "legendre", n, t))
    for name in ("legendre", "hermite"):
        for x in points:
            values = eval_sequence(name, classical_max, x, mode="exact").values
            for n, v in enumerate(values):
                if v != monic_from_classical(name, n, x):
                    failures.append(IdentityFailure("classical", name, n, x))
    for name in ("legendre", "hermite", "ismail"):
        for x in points:
            values = eval_sequence(name, product_max, x, mode="exact").values
            ws = ratio_sequence(name, product_max, x, mode="exact")
            for n in range(product_max + 1):
                if math.prod(ws[:n], start=Fraction(1)) != values[n]:
                    failures.append(IdentityFailure("product", name, n, x))
    return failures
