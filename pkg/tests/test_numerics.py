import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orthoasym.numerics import (
    DEFAULT_MAX_BITS,
    MAX_BITS_ENV,
    DomainError,
    PrecisionError,
    QuadratureError,
    SignedLog,
    arccos_principal,
    check_bits,
    context,
    double_run,
    integrate,
    log_gamma,
    max_bits_from_env,
    sl_rel_err,
    sqrt_cut,
)

CTX = context(256)
TOL = CTX.ldexp(1, 8 - 256)

finite = st.floats(min_value=-50, max_value=50, allow_nan=False, allow_infinity=False)


def off_cut(re, im):
    return not (abs(im) < 1e-60 and -1.0001 <= re <= 1.0001)


# -- contexts and precision ---------------------------------------------


def test_context_is_cached_and_fixed():
    assert context(256) is context(256)
    assert context(128).prec == 128
    assert context(256).prec == 256


def test_check_bits_rejects_low_and_capped():
    with pytest.raises(ValueError):
        check_bits(20)
    with pytest.raises(PrecisionError):
        check_bits(512, 256)


def test_max_bits_env_override():
    assert max_bits_from_env({}) == DEFAULT_MAX_BITS
    assert max_bits_from_env({MAX_BITS_ENV: "1024"}) == 1024
    with pytest.raises(ValueError):
        max_bits_from_env({MAX_BITS_ENV: "lots"})


def test_double_run_agrees_immediately_for_stable_fn():
    value, bits = double_run(lambda b: context(b).pi, 128, 1024)
    assert bits == 128
    assert abs(context(300).mpf(value) - context(300).pi) < context(300).ldexp(1, -120)


def test_double_run_escalates_then_agrees():
    # the value only stabilises at 200 bits and above
    def fn(b):
        ctx = context(b)
        return ctx.mpf(1) if b >= 200 else ctx.mpf(b)

    value, bits = double_run(fn, 64, 4096)
    assert bits == 256 and value == 1


def test_double_run_raises_at_cap():
    with pytest.raises(PrecisionError) as info:
        double_run(lambda b: context(b).mpf(b), 64, 256)
    assert info.value.bits == 256


# -- sqrt_cut ------------------------------------------------------------


@pytest.mark.parametrize("x, expected", [(2, math.sqrt(3)), (-2, -math.sqrt(3)), (1.5, 1.1180340)])
def test_sqrt_cut_examples(x, expected):
    assert abs(sqrt_cut(CTX.mpf(x), CTX) - expected) < 1e-7


@settings(max_examples=200, deadline=None)
@given(finite, finite)
def test_sqrt_cut_squares_back(re, im):
    if not off_cut(re, im):
        return
    x = CTX.mpc(re, im)
    s = sqrt_cut(x, CTX)
    assert abs(s * s - (x * x - 1)) <= TOL * max(1, abs(x * x - 1))


@settings(max_examples=200, deadline=None)
@given(finite, finite)
def test_sqrt_cut_is_odd(re, im):
    if not off_cut(re, im):
        return
    x = CTX.mpc(re, im)
    assert abs(sqrt_cut(-x, CTX) + sqrt_cut(x, CTX)) <= TOL * max(1, abs(x))


def test_sqrt_cut_grows_like_x():
    for x in (CTX.mpc(1e6, 3), CTX.mpc(-1e6, -3), CTX.mpc(2, 1e6)):
        assert abs(sqrt_cut(x, CTX) / x - 1) < 1e-10


@pytest.mark.parametrize("s", [-0.9, -0.3, 0.0, 0.5, 0.8])
def test_sqrt_cut_limits_on_the_cut(s):
    eps = CTX.mpf(10) ** -40
    upper = sqrt_cut(CTX.mpc(s, eps), CTX)
    lower = sqrt_cut(CTX.mpc(s, -eps), CTX)
    target = 1j * CTX.sqrt(1 - CTX.mpf(s) ** 2)
    assert abs(upper - target) < 1e-30
    assert abs(lower - CTX.conj(target)) < 1e-30


# -- arccos_principal ----------------------------------------------------


@pytest.mark.parametrize(
    "x, expected",
    [(0.5, complex(math.pi / 3)), (0, complex(math.pi / 2)), (2, complex(0, -1.3169579))],
)
def test_arccos_examples(x, expected):
    assert abs(complex(arccos_principal(CTX.mpf(x), CTX)) - expected) < 1e-7


@settings(max_examples=200, deadline=None)
@given(finite, finite)
def test_cos_of_arccos(re, im):
    x = CTX.mpc(re, im)
    a = arccos_principal(x, CTX)
    assert abs(CTX.cos(a) - x) <= TOL * max(1, abs(x)) * 4
    assert -TOL <= CTX.re(a) <= CTX.pi + TOL


def test_arccos_real_interval_is_real():
    a = arccos_principal(CTX.mpf(0.25), CTX)
    assert CTX.im(a) == 0
    assert abs(a - CTX.acos(CTX.mpf(0.25))) < 1e-70
    assert abs(a - 1.318116071652818) < 1e-15


# -- log_gamma -----------------------------------------------------------


@pytest.mark.parametrize(
    "z, expected",
    [(1, 0.0), (Fraction(1, 2), 0.5723649429247001), (10, 12.801827480081469)],
)
def test_log_gamma_examples(z, expected):
    assert abs(log_gamma(z, CTX) - expected) < 1e-12


@pytest.mark.parametrize("z", [Fraction(1, 3), Fraction(7, 2), 17, 100, Fraction(1025, 2), 5000])
def test_log_gamma_against_mpmath(z):
    with mpmath.workprec(300):
        ref = mpmath.loggamma(mpmath.mpf(z.numerator) / z.denominator if isinstance(z, Fraction) else z)
    assert abs(log_gamma(z, CTX) - ref) <= CTX.ldexp(1, -240) * max(1, abs(ref))


@settings(max_examples=60, deadline=None)
@given(st.fractions(min_value=Fraction(1, 10), max_value=200, max_denominator=50))
def test_log_gamma_functional_equation(z):
    lhs = log_gamma(z + 1, CTX) - log_gamma(z, CTX) - CTX.log(CTX.mpf(z.numerator) / z.denominator)
    assert abs(lhs) <= CTX.ldexp(1, -230)


def test_log_gamma_domain():
    with pytest.raises(DomainError):
        log_gamma(0, CTX)
    with pytest.raises(DomainError):
        log_gamma(-1.5, CTX)


# -- SignedLog -----------------------------------------------------------


def test_sl_rel_err_examples():
    two = SignedLog(1, CTX.log(2))
    assert abs(sl_rel_err(two, SignedLog(1, CTX.log(CTX.mpf("2.02")))) - CTX.mpf("0.01")) < 1e-60
    assert sl_rel_err(two, two) == 0
    assert abs(sl_rel_err(SignedLog(1, CTX.log(5)), SignedLog(-1, CTX.log(5))) - 2) < 1e-70


def test_sl_rel_err_zero_cases():
    one = SignedLog.from_value(1, CTX)
    assert sl_rel_err(one, SignedLog.zero(CTX)) == 1
    with pytest.raises(ZeroDivisionError):
        sl_rel_err(SignedLog.zero(CTX), one)


def test_sl_rel_err_beyond_fixed_exponents():
    big = SignedLog(1, CTX.mpf(10) ** 7)
    assert abs(sl_rel_err(big, SignedLog(1, big.logmod + CTX.mpf("1e-9"))) - CTX.mpf("1e-9")) < 1e-17


def test_from_value_roundtrip():
    for v in (Fraction(-22, 7), 3, CTX.mpf("0.125"), CTX.mpc(-1, 2)):
        s = SignedLog.from_value(v, CTX)
        assert abs(s.value(CTX) - (CTX.mpf(v.numerator) / v.denominator if isinstance(v, Fraction) else v)) < 1e-70


def test_from_log_complex():
    s = SignedLog.from_log(CTX.mpc(1, CTX.pi / 2), CTX)
    assert abs(s.value(CTX) - CTX.mpc(0, CTX.e)) < 1e-70
    assert s.realify() is s


def test_sqrt_cut_refuses_the_cut():
    with pytest.raises(DomainError):
        sqrt_cut(CTX.mpf("0.5"), CTX)


def test_arccos_continuous_across_interior_cut():
    for eps in (CTX.mpf(10) ** -300, -(CTX.mpf(10) ** -30)):
        a = arccos_principal(CTX.mpc("0.5", eps), CTX)
        assert abs(a - CTX.pi / 3) < 1e-29


def test_realify_projects():
    s = SignedLog(CTX.mpc(-1, CTX.mpf(10) ** -100), CTX.mpf(2))
    r = s.realify()
    assert r.phase == -1 and r.logmod == 2


logs = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
angles = st.floats(min_value=-3.1, max_value=3.1, allow_nan=False)


@settings(max_examples=100, deadline=None)
@given(logs, angles, logs, angles, logs, angles)
def test_signedlog_mul_assoc_comm(l1, a1, l2, a2, l3, a3):
    x, y, z = (SignedLog(CTX.expj(a), CTX.mpf(l)) for l, a in ((l1, a1), (l2, a2), (l3, a3)))
    assert sl_rel_err((x * y) * z, x * (y * z)) <= TOL * 1e6
    assert sl_rel_err(x * y, y * x) <= TOL
    assert sl_rel_err(x, x) == 0


def test_log10_and_angle():
    s = SignedLog.from_value(-1000, CTX)
    assert abs(s.log10_modulus() - 3) < 1e-70
    assert s.angle() == CTX.pi
    assert SignedLog.zero(CTX).log10_modulus() == CTX.ninf


# -- integrate -----------------------------------------------------------


def test_integrate_examples():
    assert abs(integrate(lambda t: t, 0, 1, CTX.mpf(10) ** -60, CTX) - CTX.mpf("0.5")) < 1e-60
    y = CTX.mpf(2)
    val = integrate(lambda t: 2 * t / (y - t * t), 0, 1, CTX.mpf(10) ** -40, CTX)
    assert abs(val - CTX.ln2) < 1e-30
    val = integrate(lambda t: 1 / (4 * (y * y - t)), 0, 1, CTX.mpf(10) ** -40, CTX)
    assert abs(val - CTX.log(CTX.mpf(4) / 3) / 4) < 1e-30
    assert abs(val - CTX.mpf("0.0719205")) < 1e-7


def test_integrate_against_mpmath_quad():
    f = lambda t: CTX.exp(-t) * CTX.cos(3 * t)  # noqa: E731
    with mpmath.workprec(256):
        ref = mpmath.quad(lambda t: mpmath.exp(-t) * mpmath.cos(3 * t), [0, 2])
    assert abs(integrate(f, 0, 2, CTX.mpf(10) ** -50, CTX) - ref) < 1e-45


def test_integrate_complex_integrand():
    y = CTX.mpc(2, 1)
    val = integrate(lambda t: 2 * t / (y - t * t), 0, 1, CTX.mpf(10) ** -40, CTX)
    assert abs(val - CTX.log(y / (y - 1))) < 1e-30


def test_integrate_gives_up():
    with pytest.raises(QuadratureError):
        integrate(lambda t: CTX.sqrt(t), 0, 1, CTX.mpf(10) ** -70, CTX, max_doublings=6)
