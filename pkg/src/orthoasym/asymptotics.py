"""Closed-form large-n approximants for the three families.

Every approximant returns a :class:`~orthoasym.numerics.SignedLog`: the
modulus is assembled as a logarithm, so factors such as ``(n/e)**(2n)``
never overflow.  Points are accepted in any form :meth:`Point.of` takes.

Hermite approximants are stated for ``pi_n(sqrt(2n) y)`` and the Ismail
ones for ``pi_n(n**2 y)``; the Legendre ones take ``x`` directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Callable, NamedTuple

from .numerics import DEFAULT_BITS, DomainError, SignedLog, arccos_principal, context, sqrt_cut, to_ctx
from .recurrence import Point, get_family

OUTER = "outer"
OSCILLATORY = "oscillatory"
REGIONS = (OUTER, OSCILLATORY)


@dataclass(frozen=True)
class Zones:
    """Validity zones.

    ``delta_min`` is the exclusion distance for outer formulas; oscillatory
    formulas accept points within ``rho`` of the interval shrunk by
    ``delta`` at both ends.
    """

    delta_min: float = 0.05
    delta: float = 0.1
    rho: float = 0.1


DEFAULT_ZONES = Zones()

# interval of oscillation in the natural variable of each family
_INTERVALS = {"legendre": (-1, 1), "hermite": (-1, 1), "ismail": (0, 1)}


def _dist_to_segment(z, lo, hi):
    ctx = z.context
    z = ctx.mpc(z)
    re = z.real
    nearest = min(max(re, ctx.mpf(lo)), ctx.mpf(hi))
    return abs(z - nearest)


def check_zone(family, region, point, zones=DEFAULT_ZONES, ctx=None):
    """Raise :class:`DomainError` unless ``point`` lies in the validity zone."""
    family = get_family(family).name
    ctx = ctx or context(DEFAULT_BITS)
    p = Point.of(point)
    z = p.to_ctx(ctx)
    lo, hi = _INTERVALS[family]
    if region == OUTER:
        if _dist_to_segment(z, lo, hi) < zones.delta_min:
            raise DomainError(
                f"{family} outer approximant needs distance >= {zones.delta_min} from [{lo}, {hi}]; got {p}"
            )
    elif region == OSCILLATORY:
        a, b = lo + zones.delta, hi - zones.delta
        if a > b or _dist_to_segment(z, a, b) > zones.rho:
            raise DomainError(
                f"{family} oscillatory approximant needs distance <= {zones.rho} from [{a}, {b}]; got {p}"
            )
        if p.is_real and not (lo < p.re < hi):
            raise DomainError(f"no turning-point formula: real point {p} outside ({lo}, {hi})")
    else:
        raise ValueError(f"region must be one of {REGIONS}, got {region!r}")
    return p


def _setup(family, region, point, zones, bits):
    ctx = context(bits)
    p = check_zone(family, region, point, zones, ctx)
    return ctx, p, ctx.mpc(p.to_ctx(ctx))


def _finish(value: SignedLog, p: Point):
    return value.realify() if p.is_real else value


def _n_log_n_over(ctx, n, scale):
    """``n * log(n / scale)`` with the ``n = 0`` limit."""
    if n == 0:
        return ctx.mpf(0)
    return n * ctx.log(ctx.mpf(n) / scale)


def legendre_outer(n, x, *, zones=DEFAULT_ZONES, bits=DEFAULT_BITS) -> SignedLog:
    """``((x+s)/2)**n * ((x+s)/(2s))**(1/2)`` with ``s = sqrt(x**2 - 1)``."""
    ctx, p, z = _setup("legendre", OUTER, x, zones, bits)
    s = sqrt_cut(z, ctx)
    L = n * ctx.log((z + s) / 2) + ctx.log((z + s) / (2 * s)) / 2
    return _finish(SignedLog.from_log(L, ctx), p)


def _legendre_fg(ctx, theta):
    s = ctx.sin(theta)
    return ctx.sqrt((1 + s) / s), ctx.sqrt((1 - s) / s)


def legendre_oscillatory(n, x, *, zones=DEFAULT_ZONES, bits=DEFAULT_BITS) -> SignedLog:
    """``2**-n [cos(n t) f + sin(n t) g]`` with ``t = arccos x``.

    ``f = ((1 + sin t)/sin t)**(1/2)`` and ``g = ((1 - sin t)/sin t)**(1/2)``.
    """
    ctx, p, z = _setup("legendre", OSCILLATORY, x, zones, bits)
    theta = arccos_principal(z, ctx)
    f, g = _legendre_fg(ctx, theta)
    bracket = ctx.cos(n * theta) * f + ctx.sin(n * theta) * g
    scale = SignedLog(1, -n * ctx.ln2)
    return _finish(scale * SignedLog.from_value(bracket, ctx), p)


def hermite_outer(n, y, *, zones=DEFAULT_ZONES, bits=DEFAULT_BITS) -> SignedLog:
    ctx, p, z = _setup("hermite", OUTER, y, zones, bits)
    s = sqrt_cut(z, ctx)
    L = (
        _n_log_n_over(ctx, n, 2 * ctx.e) / 2
        + n * (z * z - z * s + ctx.log(z + s))
        + ctx.log((z + s) / (2 * s)) / 2
    )
    return _finish(SignedLog.from_log(L, ctx), p)


def _hermite_phase_arg(ctx, n, theta):
    return n * (theta - ctx.sin(theta) * ctx.cos(theta)) + theta / 2


def _hermite_envelope_log(ctx, n, z):
    return _n_log_n_over(ctx, n, 2 * ctx.e) / 2 + n * z * z - ctx.log(1 - z * z) / 4


def hermite_oscillatory(n, y, *, zones=DEFAULT_ZONES, bits=DEFAULT_BITS) -> SignedLog:
    ctx, p, z = _setup("hermite", OSCILLATORY, y, zones, bits)
    theta = arccos_principal(z, ctx)
    arg = _hermite_phase_arg(ctx, n, theta)
    env = SignedLog.from_log(_hermite_envelope_log(ctx, n, z), ctx)
    return _finish(env * SignedLog.from_value(ctx.cos(arg) + ctx.sin(arg), ctx), p)


def ismail_outer(n, y, *, zones=DEFAULT_ZONES, bits=DEFAULT_BITS) -> SignedLog:
    ctx, p, z = _setup("ismail", OUTER, y, zones, bits)
    r = ctx.sqrt(z)
    L = (
        2 * _n_log_n_over(ctx, n, ctx.e)
        + n * ((r + 1) * ctx.log(r + 1) - (r - 1) * ctx.log(r - 1))
        + ctx.log(z / (z - 1)) / 2
    )
    return _finish(SignedLog.from_log(L, ctx), p)


def _ismail_envelope_log(ctx, n, z):
    r = ctx.sqrt(z)
    return (
        2 * _n_log_n_over(ctx, n, ctx.e)
        + n * r * ctx.log((1 + r) / (1 - r))
        + ctx.log(z) / 2
        + (n - ctx.mpf(0.5)) * ctx.log(1 - z)
    )


def _rational_sqrt(q: Fraction):
    num, den = isqrt(q.numerator), isqrt(q.denominator)
    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)
    return None


def _integer_sine_argument(n, p: Point):
    """True when ``n sqrt(y)`` is an integer for a real rational ``y``."""
    if not p.is_real or p.re < 0:
        return False
    r = _rational_sqrt(p.re)
    return r is not None and (n * r).denominator == 1


def ismail_oscillatory(n, y, *, zones=DEFAULT_ZONES, bits=DEFAULT_BITS) -> SignedLog:
    """``(-1)**(n-1) 2 sin(n pi r) (n/e)**(2n) ((1+r)/(1-r))**(n r) y**(1/2) (1-y)**(n-1/2)``, ``r = sqrt(y)``."""
    ctx, p, z = _setup("ismail", OSCILLATORY, y, zones, bits)
    if _integer_sine_argument(n, p):
        return SignedLog.zero(ctx)
    r = ctx.sqrt(z)
    trig = (-1) ** (n - 1) * 2 * ctx.sinpi(n * r)
    env = SignedLog.from_log(_ismail_envelope_log(ctx, n, z), ctx)
    return _finish(env * SignedLog.from_value(trig, ctx), p)


APPROXIMANTS = {
    ("legendre", OUTER): legendre_outer,
    ("legendre", OSCILLATORY): legendre_oscillatory,
    ("hermite", OUTER): hermite_outer,
    ("hermite", OSCILLATORY): hermite_oscillatory,
    ("ismail", OUTER): ismail_outer,
    ("ismail", OSCILLATORY): ismail_oscillatory,
}


def approximant(family, region, n, point, *, zones=DEFAULT_ZONES, bits=DEFAULT_BITS) -> SignedLog:
    """Dispatch to the approximant for ``(family, region)``."""
    key = (get_family(family).name, region)
    if key not in APPROXIMANTS:
        raise ValueError(f"region must be one of {REGIONS}, got {region!r}")
    return APPROXIMANTS[key](n, point, zones=zones, bits=bits)


def oscillatory_envelope(family, n, point, *, zones=DEFAULT_ZONES, bits=DEFAULT_BITS) -> SignedLog:
    """Peak modulus of an oscillatory approximant's trigonometric factor times its amplitude.

    For real points the trigonometric combination is replaced by its
    maximum over the phase: ``sqrt(f**2 + g**2)`` (Legendre), ``sqrt(2)``
    (Hermite), ``2`` (Ismail).  Complex points pick up a ``cosh`` of the
    imaginary part of the phase.
    """
    name = get_family(family).name
    ctx, p, z = _setup(name, OSCILLATORY, point, zones, bits)
    if name == "legendre":
        theta = arccos_principal(z, ctx)
        f, g = _legendre_fg(ctx, theta)
        peak = ctx.sqrt(abs(f) ** 2 + abs(g) ** 2) * ctx.cosh(n * theta.imag)
        return SignedLog(1, -n * ctx.ln2 + ctx.log(peak))
    if name == "hermite":
        theta = arccos_principal(z, ctx)
        arg = _hermite_phase_arg(ctx, n, theta)
        L = _hermite_envelope_log(ctx, n, z)
        return SignedLog(1, L.real + ctx.log(ctx.sqrt(2) * ctx.cosh(arg.imag)))
    r = ctx.sqrt(z)
    L = _ismail_envelope_log(ctx, n, z)
    return SignedLog(1, L.real + ctx.log(2 * ctx.cosh(n * ctx.pi * r.imag)))


# -- Legendre map --------------------------------------------------------


def legendre_w(x, ctx=None):
    """Limit ``(x + sqrt(x**2-1))/2`` of the Legendre ratios ``w_k(x)``."""
    ctx = ctx or getattr(x, "context", None) or context(DEFAULT_BITS)
    z = ctx.mpc(x)
    return (z + sqrt_cut(z, ctx)) / 2


def legendre_t(x, ctx=None):
    """``t = (x - sqrt(x**2-1))**2``; satisfies ``w**2 = 1/(4t)`` and ``x/w = 1 + t``."""
    ctx = ctx or getattr(x, "context", None) or context(DEFAULT_BITS)
    z = ctx.mpc(x)
    return (z - sqrt_cut(z, ctx)) ** 2


def qn_recurrence(n, t):
    """``Q_n(t)`` from ``Q_{k+1} = (1+t) Q_k - 4k^2 t/(4k^2-1) Q_{k-1}``, ``Q_0 = 1``, ``Q_1 = 1+t``.

    Exact for rational ``t``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    exact = isinstance(t, (int, Fraction))
    if exact:
        t = Fraction(t)
    prev, cur = 1, 1 + t
    if n == 0:
        return Fraction(1) if exact else prev
    for k in range(1, n):
        c = Fraction(4 * k * k, 4 * k * k - 1)
        if not exact:
            c = to_ctx(t.context, c) if hasattr(t, "context") else float(c)
        prev, cur = cur, (1 + t) * cur - c * t * prev
    return cur


def _pochhammer(x: Fraction, j: int) -> Fraction:
    out = Fraction(1)
    for i in range(j):
        out *= x + i
    return out


def qn_coefficients(n) -> list[Fraction]:
    """Coefficients of ``t**j`` in the closed-form sum for ``Q_n``."""
    half = Fraction(1, 2)
    coeffs = []
    factorial = Fraction(1)
    for j in range(n + 1):
        if j:
            factorial *= j
        num = _pochhammer(half, j) * _pochhammer(Fraction(n - j + 1), j)
        den = factorial * _pochhammer(Fraction(n - j) + half, j)
        coeffs.append(num / den)
    return coeffs


def qn_explicit(n, t):
    """``sum_j (1/2)_j (n-j+1)_j / (j! (n-j+1/2)_j) t**j``; exact for rational ``t``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    coeffs = qn_coefficients(n)
    if isinstance(t, (int, Fraction)):
        t = Fraction(t)
    else:
        ctx = getattr(t, "context", None)
        if ctx is not None:
            coeffs = [to_ctx(ctx, c) for c in coeffs]
        else:
            coeffs = [float(c) for c in coeffs]
    total = 0
    for c in reversed(coeffs):
        total = total * t + c
    return total


# -- phase functions and their local expansions --------------------------


class Phase(NamedTuple):
    """An analytic phase: value and first two derivatives as ``(ctx, y) -> number``."""

    value: Callable
    d1: Callable
    d2: Callable


HERMITE_PHASE = Phase(
    lambda ctx, y: ctx.acos(y) - y * ctx.sqrt(1 - y * y),
    lambda ctx, y: -2 * ctx.sqrt(1 - y * y),
    lambda ctx, y: 2 * y / ctx.sqrt(1 - y * y),
)

ISMAIL_PHASE = Phase(
    lambda ctx, y: ctx.pi * ctx.sqrt(y),
    lambda ctx, y: ctx.pi / (2 * ctx.sqrt(y)),
    lambda ctx, y: -ctx.pi / (4 * y * ctx.sqrt(y)),
)


def constant_phase(c) -> Phase:
    return Phase(lambda ctx, y: to_ctx(ctx, c), lambda ctx, y: ctx.mpf(0), lambda ctx, y: ctx.mpf(0))


SQRT_SCALING = "sqrt_scaling"
SQUARE_SCALING = "square_scaling"
_KIND_ALIASES = {"sqrt": SQRT_SCALING, "square": SQUARE_SCALING}


def normalize_kind(kind):
    kind = _KIND_ALIASES.get(kind, kind)
    if kind not in (SQRT_SCALING, SQUARE_SCALING):
        raise ValueError(f"kind must be sqrt or square, got {kind!r}")
    return kind


@dataclass(frozen=True)
class LocalExpansion:
    lam: object
    mu: object
    kind: str


def local_expansion(phase: Phase, kind, y, *, bits=DEFAULT_BITS) -> LocalExpansion:
    """First- and second-order phase shifts when degree and scaled argument move together.

    ``sqrt_scaling`` (argument ``sqrt(2n) y``):
    ``lam = phi - y phi'/2``, ``mu = -y phi'/8 + y**2 phi''/8``.
    ``square_scaling`` (argument ``n**2 y``):
    ``lam = phi - 2 y phi'``, ``mu = y phi' + 2 y**2 phi''``.
    """
    kind = normalize_kind(kind)
    ctx = context(bits)
    y = to_ctx(ctx, Point.of(y).re) if not hasattr(y, "context") else y
    v, d1, d2 = phase.value(ctx, y), phase.d1(ctx, y), phase.d2(ctx, y)
    if kind == SQRT_SCALING:
        return LocalExpansion(v - y * d1 / 2, -y * d1 / 8 + y * y * d2 / 8, kind)
    return LocalExpansion(v - 2 * y * d1, y * d1 + 2 * y * y * d2, kind)


@dataclass(frozen=True)
class PhaseData:
    """Auxiliary functions of one family at one point (``None`` where not defined)."""

    theta: object = None
    t: object = None
    w: object = None
    phi: object = None
    r: object = None


def phase_data(family, point, *, bits=DEFAULT_BITS) -> PhaseData:
    name = get_family(family).name
    ctx = context(bits)
    z = ctx.mpc(Point.of(point).to_ctx(ctx))
    if name == "legendre":
        theta = arccos_principal(z, ctx)
        off_cut = not (z.imag == 0 and -1 <= z.real <= 1)
        return PhaseData(
            theta=theta,
            t=legendre_t(z, ctx) if off_cut else None,
            w=legendre_w(z, ctx) if off_cut else None,
            phi=theta,
            r=ctx.mpc(1),
        )
    if name == "hermite":
        return PhaseData(
            theta=arccos_principal(z, ctx),
            phi=arccos_principal(z, ctx) - z * ctx.sqrt(1 - z * z),
            r=ctx.exp(z * z),
        )
    rt = ctx.sqrt(z)
    return PhaseData(phi=ctx.pi * rt, r=(1 - z) * ((1 + rt) / (1 - rt)) ** rt)
