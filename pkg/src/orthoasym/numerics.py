"""Precision-managed scalar arithmetic.

Real and complex values are mpmath ``mpf``/``mpc`` objects bound to a
fixed-precision context; the context a value belongs to is its working
precision.  Contexts are cached per bit count and never mutated, so values
can be shared between threads.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, TypeVar

import mpmath
from mpmath.ctx_mp_python import _mpc as MPC
from mpmath.ctx_mp_python import _mpf as MPF

DEFAULT_BITS = 256
MIN_BITS = 53
DEFAULT_MAX_BITS = 8192
GUARD_BITS = 64
MAX_BITS_ENV = "ORTHOASYM_MAX_BITS"

T = TypeVar("T")


class DomainError(ValueError):
    """Argument outside the domain (or validity zone) of an operation."""


class PrecisionError(ArithmeticError):
    """Double-run agreement not reached below the precision cap."""

    def __init__(self, message, bits=None):
        super().__init__(message)
        self.bits = bits


class QuadratureError(ArithmeticError):
    """Panel doubling did not converge."""


@lru_cache(maxsize=None)
def context(bits: int) -> mpmath.MPContext:
    """Return the shared mpmath context working at ``bits`` binary digits."""
    check_bits(bits)
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


def check_bits(bits, max_bits=None):
    if not isinstance(bits, int) or bits < MIN_BITS:
        raise ValueError(f"precision must be an integer >= {MIN_BITS} bits, got {bits!r}")
    if max_bits is not None and bits > max_bits:
        raise PrecisionError(f"requested {bits} bits exceeds the cap of {max_bits}", bits)
    return bits


def max_bits_from_env(environ=None) -> int:
    """Precision cap, overridable through ``ORTHOASYM_MAX_BITS``."""
    environ = os.environ if environ is None else environ
    raw = environ.get(MAX_BITS_ENV)
    if not raw:
        return DEFAULT_MAX_BITS
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{MAX_BITS_ENV} must be an integer, got {raw!r}") from None
    return check_bits(value)


def precision_of(value) -> int | None:
    ctx = getattr(value, "context", None)
    return getattr(ctx, "prec", None)


def to_ctx(ctx, value):
    """Convert ``value`` into ``ctx`` (rounding to its precision)."""
    if isinstance(value, Fraction):
        return ctx.mpf(value.numerator) / value.denominator
    if isinstance(value, (MPC, complex)):
        return ctx.mpc(value)
    if hasattr(value, "imag") and not isinstance(value, (int, float)) and value.imag != 0:
        return ctx.mpc(value)
    return ctx.mpf(value)


def is_real_value(value) -> bool:
    return not isinstance(value, (MPC, complex))


def sqrt_cut(x, ctx=None):
    """Square root of ``x**2 - 1`` with its branch cut on ``[-1, 1]``.

    Computed as ``sqrt(x - 1) * sqrt(x + 1)`` with principal roots, so the
    result behaves like ``x`` for large ``|x|`` in every direction.

    Raises
    ------
    DomainError
        If ``x`` lies on the cut, within ``2**(1 - prec)``.
    """
    ctx = ctx or getattr(x, "context", None) or context(DEFAULT_BITS)
    z = ctx.mpc(x)
    tol = ctx.ldexp(1, 1 - ctx.prec)
    if abs(z.imag) <= tol and -1 - tol <= z.real <= 1 + tol:
        raise DomainError(f"sqrt_cut undefined on the cut [-1, 1], got {x}")
    return ctx.sqrt(z - 1) * ctx.sqrt(z + 1)


def arccos_principal(x, ctx=None):
    """Arc cosine with ``0 <= Re(theta) <= pi`` matching :func:`sqrt_cut`.

    For ``Im x >= 0`` off ``[-1, 1]`` this is ``-i log(x + sqrt(x^2-1))``,
    so that ``sqrt(x^2 - 1) = i sin(theta)`` on the upper side of the cut;
    the lower half plane is obtained by conjugation.  Real ``x`` in
    ``[-1, 1]`` gives the real arc cosine.
    """
    ctx = ctx or getattr(x, "context", None) or context(DEFAULT_BITS)
    z = ctx.mpc(x)
    if z.imag == 0 and -1 <= z.real <= 1:
        return ctx.mpc(ctx.acos(z.real))
    tol = ctx.ldexp(1, 1 - ctx.prec)
    if abs(z.imag) <= tol and -1 - tol <= z.real <= 1 + tol:
        # both sides of the cut share the limit acos(Re x); nothing to choose
        return ctx.acos(z)
    if z.imag < 0:
        return ctx.conj(arccos_principal(ctx.conj(z), ctx))
    return -1j * ctx.log(z + sqrt_cut(z, ctx))


def _stirling_shift(bits):
    return max(16, bits)


def log_gamma(z, ctx=None):
    """Natural log of the gamma function for real ``z > 0``.

    The argument is shifted upward with ``Gamma(z+1) = z Gamma(z)`` until it
    reaches ``max(16, prec)``; the Stirling series is then summed until the
    next term falls below the working precision, which bounds the
    truncation error since the series alternates for real arguments.
    """
    ctx = ctx or getattr(z, "context", None) or context(DEFAULT_BITS)
    bits = ctx.prec
    work = context(bits + 32)
    x = to_ctx(work, z)
    if not x > 0:
        raise DomainError(f"log_gamma requires z > 0, got {z}")

    threshold = _stirling_shift(bits)
    shift = work.mpf(1)
    while x < threshold:
        shift *= x
        x += 1

    total = (x - work.mpf(0.5)) * work.log(x) - x + work.log(2 * work.pi) / 2
    eps = work.ldexp(1, -(bits + 24))
    x2 = x * x
    power = x
    k = 1
    while True:
        b = mpmath.bernfrac(2 * k)
        term = work.mpf(b[0]) / (b[1] * (2 * k) * (2 * k - 1)) / power
        if abs(term) <= eps * max(1, abs(total)):
            break
        total += term
        power *= x2
        k += 1
    return ctx.mpf(total - work.log(shift))


@dataclass(frozen=True)
class SignedLog:
    """A value stored as a phase and the natural log of its modulus.

    ``phase`` is an integer sign in ``{-1, 0, 1}`` for real values, or a
    unit-modulus ``mpc`` for complex ones.  A zero value has ``phase == 0``
    and a ``logmod`` of ``-inf``.
    """

    phase: Any
    logmod: Any

    @classmethod
    def zero(cls, ctx=None):
        ctx = ctx or context(DEFAULT_BITS)
        return cls(0, ctx.ninf)

    @classmethod
    def from_value(cls, value, ctx=None):
        """Wrap an ordinary number (int, Fraction, mpf, mpc)."""
        ctx = ctx or getattr(value, "context", None) or context(DEFAULT_BITS)
        if isinstance(value, (int, Fraction)):
            if value == 0:
                return cls.zero(ctx)
            sign = 1 if value > 0 else -1
            mag = abs(Fraction(value))
            logmod = ctx.log(mag.numerator) - ctx.log(mag.denominator)
            return cls(sign, logmod)
        v = to_ctx(ctx, value)
        if v == 0:
            return cls.zero(ctx)
        if isinstance(v, MPC):
            mod = abs(v)
            return cls(v / mod, ctx.log(mod))
        return cls(1 if v > 0 else -1, ctx.log(abs(v)))

    @classmethod
    def from_log(cls, log_value, ctx=None):
        """Build ``exp(log_value)`` for a real or complex logarithm."""
        ctx = ctx or getattr(log_value, "context", None) or context(DEFAULT_BITS)
        if isinstance(log_value, (MPC, complex)):
            L = ctx.mpc(log_value)
            if L.imag == 0:
                return cls(1, L.real)
            return cls(ctx.expj(L.imag), L.real)
        return cls(1, ctx.mpf(log_value))

    @property
    def is_zero(self):
        return isinstance(self.phase, int) and self.phase == 0

    @property
    def is_real(self):
        return isinstance(self.phase, int)

    @property
    def context(self):
        return getattr(self.logmod, "context", None) or context(DEFAULT_BITS)

    def __mul__(self, other):
        if not isinstance(other, SignedLog):
            other = SignedLog.from_value(other, self.context)
        if self.is_zero or other.is_zero:
            return SignedLog.zero(self.context)
        return SignedLog(self.phase * other.phase, self.logmod + other.logmod)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, SignedLog):
            other = SignedLog.from_value(other, self.context)
        if other.is_zero:
            raise ZeroDivisionError("division by a zero SignedLog")
        if self.is_zero:
            return self
        ctx = self.context
        if self.phase == other.phase:
            return SignedLog(1, self.logmod - other.logmod)
        inv = other.phase if other.is_real else ctx.conj(other.phase)
        return SignedLog(self.phase * inv, self.logmod - other.logmod)

    def __neg__(self):
        return SignedLog(-self.phase, self.logmod)

    def value(self, ctx=None):
        """The represented number (may be enormous; mpmath exponents are unbounded)."""
        ctx = ctx or self.context
        if self.is_zero:
            return ctx.mpf(0)
        return self.phase * ctx.exp(self.logmod)

    def log10_modulus(self):
        if self.is_zero:
            return self.context.ninf
        return self.logmod / self.context.ln10

    def angle(self):
        """Argument of the phase in ``(-pi, pi]`` (``0`` or ``pi`` for real values)."""
        ctx = self.context
        if self.is_real:
            return ctx.pi if self.phase < 0 else ctx.mpf(0)
        return ctx.arg(self.phase)

    def realify(self, tol=None):
        """Project a complex phase onto a real sign when it is real to ``tol``."""
        if self.is_real:
            return self
        ctx = self.context
        tol = ctx.ldexp(1, -ctx.prec // 2) if tol is None else tol
        if abs(self.phase.imag) <= tol:
            return SignedLog(1 if self.phase.real > 0 else -1, self.logmod)
        return self


def sl_rel_err(exact: SignedLog, approx: SignedLog):
    """Relative error ``|approx/exact - 1|`` evaluated in the log domain.

    With ``d`` the difference of log-moduli and ``rho`` the phase ratio,
    ``approx/exact - 1 = (rho - 1) + rho * expm1(d)``, which stays exact
    for magnitudes far beyond any fixed exponent range.
    """
    if exact.is_zero:
        raise ZeroDivisionError("relative error against an exact zero")
    ctx = exact.context
    if approx.is_zero:
        return ctx.mpf(1)
    ratio = approx / exact
    d = ratio.logmod
    rho = ratio.phase
    return abs((rho - 1) + rho * ctx.expm1(d))


def integrate(f, a, b, tol, ctx=None, *, max_doublings=24, inset=0, extrapolate=True):
    """Integrate ``f`` over ``[a, b]`` by composite trapezoid with panel doubling.

    Each doubling reuses the previous sum.  With ``extrapolate`` (default)
    the trapezoid sequence is Richardson-extrapolated (Romberg), which is
    what makes tolerances near the working precision reachable for smooth
    integrands; otherwise the raw trapezoid sequence is used.

    Parameters
    ----------
    f : callable
        Integrand, called with context numbers; may return complex values.
    a, b : number
        Interval endpoints.
    tol : number
        Stop once successive estimates differ by less than this.
    inset : number or True
        Shrink the interval by this amount at both ends.  ``True`` selects
        ``2**(-prec/2)``, for integrands singular at the endpoints.

    Raises
    ------
    QuadratureError
        If ``max_doublings`` doublings do not reach ``tol``.
    """
    ctx = ctx or context(DEFAULT_BITS)
    a = to_ctx(ctx, a)
    b = to_ctx(ctx, b)
    if inset is True:
        inset = ctx.ldexp(1, -(ctx.prec // 2))
    if inset:
        a, b = a + inset, b - inset
    tol = ctx.mpf(tol)
    h = b - a
    trap = h * (f(a) + f(b)) / 2
    row = [trap]
    previous = trap
    panels = 1
    for level in range(1, max_doublings + 1):
        h /= 2
        mid = ctx.fsum(f(a + (2 * i + 1) * h) for i in range(panels))
        trap = trap / 2 + h * mid
        panels *= 2
        if extrapolate:
            new_row = [trap]
            factor = ctx.mpf(1)
            for j in range(1, level + 1):
                factor *= 4
                new_row.append(new_row[j - 1] + (new_row[j - 1] - row[j - 1]) / (factor - 1))
            row = new_row
            estimate = row[-1]
        else:
            estimate = trap
        if level >= 2 and abs(estimate - previous) < tol:
            return estimate
        previous = estimate
    raise QuadratureError(f"no convergence to {tol} after {max_doublings} doublings")


def _close(lo, hi, rel):
    if isinstance(lo, SignedLog):
        if lo.is_zero or hi.is_zero:
            return lo.is_zero and hi.is_zero
        return sl_rel_err(hi, lo) <= rel
    if isinstance(lo, Fraction) or isinstance(lo, int):
        return lo == hi
    if isinstance(lo, (tuple, list)):
        return len(lo) == len(hi) and all(_close(u, v, rel) for u, v in zip(lo, hi))
    if lo is None or isinstance(lo, (str, bool)):
        return lo == hi
    scale = max(abs(lo), abs(hi))
    if scale == 0:
        return True
    return abs(lo - hi) <= rel * scale


def double_run(fn: Callable[[int], T], bits=DEFAULT_BITS, max_bits=None) -> tuple[T, int]:
    """Evaluate ``fn(bits)`` and ``fn(bits + 64)`` until they agree.

    Results agree when their relative difference is at most ``2**(16-bits)``
    (elementwise for tuples, via :func:`sl_rel_err` for SignedLogs).  On
    disagreement the precision doubles, clamped to ``max_bits``.  Returns
    the lower-precision result and the precision it was computed at.
    """
    max_bits = max_bits_from_env() if max_bits is None else max_bits
    check_bits(bits, max_bits)
    while True:
        lo = fn(bits)
        hi = fn(bits + GUARD_BITS)
        if _close(lo, hi, mpmath.mpf(2) ** (16 - bits)):
            return lo, bits
        if bits >= max_bits:
            raise PrecisionError(
                f"results at {bits} and {bits + GUARD_BITS} bits disagree; cap {max_bits} reached",
                bits,
            )
        bits = min(2 * bits, max_bits)


def log_ratio_to_float(value) -> float:
    """Round an mpf to a Python float (17 significant digits survive)."""
    if value == mpmath.inf:
        return math.inf
    if value == mpmath.ninf:
        return -math.inf
    return float(value)
