"""Monic three-term recurrences: exact and floating evaluation, ratios, zeros."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import gmpy2

from .numerics import DEFAULT_BITS, MPC, MPF, context, double_run, to_ctx


@dataclass(frozen=True)
class CoefficientFamily:
    """Recurrence ``pi_{n+1} = (x - a(n)) pi_n - b(n) pi_{n-1}``."""

    name: str
    a: Callable[[int], Fraction]
    b: Callable[[int], Fraction]

    def __repr__(self):
        return f"CoefficientFamily({self.name!r})"


LEGENDRE = CoefficientFamily(
    "legendre", lambda n: Fraction(0), lambda n: Fraction(n * n, 4 * n * n - 1)
)
HERMITE = CoefficientFamily("hermite", lambda n: Fraction(0), lambda n: Fraction(n, 2))
ISMAIL = CoefficientFamily("ismail", lambda n: Fraction(n * n), lambda n: Fraction(1, 4))

FAMILIES = {f.name: f for f in (LEGENDRE, HERMITE, ISMAIL)}


def get_family(family) -> CoefficientFamily:
    if isinstance(family, CoefficientFamily):
        return family
    try:
        return FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}; expected one of {sorted(FAMILIES)}") from None


def _mpf_to_fraction(v) -> Fraction:
    if not v.context.isfinite(v):
        raise ValueError(f"cannot convert {v} to an exact rational")
    sign, man, exp, _ = v._mpf_
    return (-1) ** sign * Fraction(int(man)) * (Fraction(2) ** int(exp))


def _to_fraction(v) -> Fraction:
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v)
    if isinstance(v, MPF):
        return _mpf_to_fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    raise TypeError(f"cannot convert {v!r} to an exact rational")


@dataclass(frozen=True)
class Point:
    """A complex point with exact rational coordinates.

    Binary floats and mpmath numbers convert exactly, so the same point can
    be rounded afresh at every working precision.
    """

    re: Fraction
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, value) -> "Point":
        if isinstance(value, Point):
            return value
        if isinstance(value, tuple):
            re, im = value
            return cls(_to_fraction(re), _to_fraction(im))
        if isinstance(value, str):
            return parse_point(value)
        if isinstance(value, (complex, MPC)):
            return cls(_to_fraction(value.real), _to_fraction(value.imag))
        return cls(_to_fraction(value))

    @property
    def is_real(self):
        return self.im == 0

    def to_ctx(self, ctx):
        """Round into ``ctx``: an mpf for real points, else an mpc."""
        if self.is_real:
            return to_ctx(ctx, self.re)
        return ctx.mpc(to_ctx(ctx, self.re), to_ctx(ctx, self.im))

    def scaled(self, factor) -> "Point":
        return Point(self.re * factor, self.im * factor)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        return f"{self.re},{self.im}"


def parse_point(text: str) -> Point:
    """Parse ``"re,im"`` (two decimal literals) into an exact :class:`Point`."""
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"point must be 're,im', got {text!r}")
    try:
        return Point(Fraction(parts[0].strip()), Fraction(parts[1].strip()))
    except ValueError:
        raise ValueError(f"point must be two decimal literals, got {text!r}") from None


def _exact_value(x):
    """Return the rational value of ``x`` if it is a real rational, else None."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, Point) and x.is_real:
        return x.re
    return None


@dataclass(frozen=True)
class SequenceEval:
    family: CoefficientFamily
    point: object
    values: tuple
    mode: str
    bits: int | None = None

    @property
    def last(self):
        return self.values[-1]


def _run(family, N, x, one):
    values = [one]
    if N == 0:
        return values
    prev, cur = one, x - family.a(0) if isinstance(x, Fraction) else x - _coef(family.a(0), one)
    values.append(cur)
    for n in range(1, N):
        if isinstance(x, Fraction):
            prev, cur = cur, (x - family.a(n)) * cur - family.b(n) * prev
        else:
            prev, cur = cur, (x - _coef(family.a(n), one)) * cur - _coef(family.b(n), one) * prev
        values.append(cur)
    return values


def _coef(q: Fraction, one):
    ctx = one.context
    if q.denominator == 1:
        return ctx.mpf(q.numerator)
    return ctx.mpf(q.numerator) / q.denominator


def _float_point(x, bits):
    ctx = context(bits)
    if callable(x):
        return x(ctx)
    if isinstance(x, Point):
        return x.to_ctx(ctx)
    return to_ctx(ctx, x)


def _resolve_mode(x, mode):
    if mode not in ("auto", "exact", "float"):
        raise ValueError(f"mode must be auto, exact or float, got {mode!r}")
    exact = _exact_value(x) if not callable(x) else None
    if mode == "exact" and exact is None:
        raise ValueError("exact mode requires a real rational point")
    if mode == "auto":
        mode = "exact" if exact is not None else "float"
    return mode, exact


def eval_sequence(family, N: int, x, *, mode="auto", bits=DEFAULT_BITS, max_bits=None) -> SequenceEval:
    """Evaluate ``pi_0(x), ..., pi_N(x)`` by forward recurrence.

    Real rational ``x`` (int, Fraction, real :class:`Point`) is evaluated
    exactly unless ``mode="float"``.  Float mode accepts any point, or a
    callable ``ctx -> number`` for points that must be recomputed per
    precision, and applies the double-run precision policy.
    """
    family = get_family(family)
    if N < 0:
        raise ValueError("N must be >= 0")
    mode, exact = _resolve_mode(x, mode)
    if mode == "exact":
        return SequenceEval(family, exact, tuple(_run(family, N, exact, Fraction(1))), "exact")

    def attempt(b):
        xv = _float_point(x, b)
        return tuple(_run(family, N, xv, context(b).mpf(1)))

    values, used = double_run(attempt, bits, max_bits)
    return SequenceEval(family, x, values, "float", used)


def evaluate(family, n, x, **kwargs):
    """``pi_n(x)``; see :func:`eval_sequence`."""
    return eval_sequence(family, n, x, **kwargs).last


class ZeroRatioError(ArithmeticError):
    """``w_k`` vanished: the point is a zero of ``pi_k``."""

    def __init__(self, k):
        super().__init__(f"w_{k} = 0: the point is a zero of pi_{k}")
        self.k = k


def _ratios(family, N, x, one):
    ws = []
    if N == 0:
        return ws
    exact = isinstance(x, Fraction)
    conv = (lambda q: q) if exact else (lambda q: _coef(q, one))
    w = x - conv(family.a(0))
    ws.append(w)
    for k in range(1, N):
        if w == 0:
            raise ZeroRatioError(k)
        w = x - conv(family.a(k)) - conv(family.b(k)) / w
        ws.append(w)
    return ws


def ratio_sequence(family, N: int, x, *, mode="auto", bits=DEFAULT_BITS, max_bits=None) -> list:
    """Ratios ``w_k = pi_k / pi_{k-1}`` for ``k = 1..N``.

    ``w_1 = x - a(0)`` and ``w_{k+1} = x - a(k) - b(k)/w_k``.

    Raises
    ------
    ZeroRatioError
        If some ``w_k`` with ``k < N`` is zero.
    """
    family = get_family(family)
    mode, exact = _resolve_mode(x, mode)
    if mode == "exact":
        return _ratios(family, N, exact, Fraction(1))

    def attempt(b):
        return tuple(_ratios(family, N, _float_point(x, b), context(b).mpf(1)))

    values, _ = double_run(attempt, bits, max_bits)
    return list(values)


def reconstruct_product(ws):
    """``prod(ws)``; the empty product is ``pi_0 = 1``."""
    return math.prod(ws, start=1)


class BracketError(ArithmeticError):
    """A zero could not be bracketed by a sign change."""


def _mpq_coefficients(family, n):
    return [gmpy2.mpq(q.numerator, q.denominator) for q in map(family.a, range(n))], [
        gmpy2.mpq(q.numerator, q.denominator) for q in map(family.b, range(n))
    ]


def _count_above(coefs, n, x):
    """Sign changes in ``pi_0(x), ..., pi_n(x)``: the number of zeros of ``pi_n`` above ``x``.

    Also returns ``pi_n(x)``.  Zeros inside the sequence are skipped; at a
    zero of ``pi_n`` the count covers zeros strictly above ``x``.
    """
    a, b = coefs
    prev, cur = gmpy2.mpq(1), x - a[0]
    changes = 0
    last_sign = 1
    seq_last = cur
    for k in range(1, n + 1):
        s = gmpy2.sign(cur)
        if s != 0:
            if s != last_sign:
                changes += 1
            last_sign = s
        seq_last = cur
        if k == n:
            break
        prev, cur = cur, (x - a[k]) * cur - b[k] * prev
    return changes, seq_last


def _root_bound(family, n):
    """Integer bounds enclosing every zero of ``pi_n`` (Gershgorin on the Jacobi matrix)."""
    a = [family.a(k) for k in range(n)]
    # sqrt(b) <= (1 + b)/2
    s = [Fraction(0)] + [(1 + family.b(k)) / 2 for k in range(1, n)] + [Fraction(0)]
    radius = max(s[k] + s[k + 1] for k in range(n))
    return math.floor(min(a) - radius) - 1, math.ceil(max(a) + radius) + 1


def find_zeros(family, n: int, *, bits=DEFAULT_BITS) -> list:
    """The ``n`` real zeros of ``pi_n``, ascending, as mpf at ``bits``.

    Zeros are isolated by bisection on the exact Sturm count of the
    recurrence sequence (real and simple because ``b(n) > 0``), confirmed by
    a sign change of ``pi_n`` at dyadic rational endpoints, and refined to
    width ``2**(-bits/2)``.
    """
    family = get_family(family)
    if n < 1:
        raise ValueError("n must be >= 1")
    coefs = _mpq_coefficients(family, n)
    lo, hi = _root_bound(family, n)
    width = gmpy2.mpq(1, 2 ** (bits // 2))

    def count(x):
        return _count_above(coefs, n, x)

    brackets = []
    stack = [(gmpy2.mpq(lo), gmpy2.mpq(hi), count(gmpy2.mpq(lo))[0], count(gmpy2.mpq(hi))[0])]
    while stack:
        left, right, c_left, c_right = stack.pop()
        inside = c_left - c_right
        if inside == 0:
            continue
        if inside == 1:
            brackets.append((left, right))
            continue
        mid = (left + right) / 2
        c_mid = count(mid)[0]
        stack.append((left, mid, c_left, c_mid))
        stack.append((mid, right, c_mid, c_right))
    brackets.sort()
    if len(brackets) != n:
        raise BracketError(f"isolated {len(brackets)} zeros of pi_{n}, expected {n}")

    ctx = context(bits)
    zeros = []
    for left, right in brackets:
        # the single zero lies in (left, right]
        f_right = count(right)[1]
        if f_right == 0:
            zeros.append(ctx.mpf(int(right.numerator)) / int(right.denominator))
            continue
        # the zero is simple and interior, so pi_n has the opposite sign just above left
        left_sign = -gmpy2.sign(f_right)
        f_left = count(left)[1]
        if f_left != 0 and gmpy2.sign(f_left) != left_sign:
            raise BracketError(f"no sign change of pi_{n} on [{left}, {right}]")
        while right - left > width:
            mid = (left + right) / 2
            f_mid = count(mid)[1]
            if f_mid == 0:
                left = right = mid
                break
            if gmpy2.sign(f_mid) == left_sign:
                left = mid
            else:
                right = mid
        centre = (left + right) / 2
        zeros.append(ctx.mpf(int(centre.numerator)) / int(centre.denominator))
    return zeros
