"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s``.
"""

import statistics
import time
from fractions import Fraction

import pytest

from orthoasym import verify as V
from orthoasym.recurrence import evaluate

SWEEP = [16, 32, 64, 128]


@pytest.fixture
def report(capsys):
    def emit(label, checks):
        ok = all(passed for _, passed in checks)
        detail = "; ".join(f"{text} [{'ok' if passed else 'FAIL'}]" for text, passed in checks)
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {label}: {detail}")
        return ok

    return emit


def decreasing(xs):
    return all(b < a for a, b in zip(xs, xs[1:]))


def test_c01_exact_identities(report):
    t0 = time.perf_counter()
    failures = V.exact_identity_suite(qn_max=40, classical_max=30, product_max=50)
    elapsed = time.perf_counter() - t0
    assert report(
        "criterion 1 exact identities",
        [(f"{len(failures)} mismatches", not failures), (f"{elapsed:.2f}s < 10s", elapsed < 10)],
    )


def test_c02_legendre_outer(report):
    t0 = time.perf_counter()
    s = V.convergence_sweep("legendre", "outer", 2, SWEEP, bits=256)
    elapsed = time.perf_counter() - t0
    errs = [float(e) for e in s.rel_errs]
    assert report(
        "criterion 2 legendre outer x=2",
        [
            (f"rel_err(64)={errs[2]:.3g} <= 0.01", errs[2] <= 0.01),
            (f"decreasing {[f'{e:.3g}' for e in errs]}", decreasing(errs)),
            (f"order {s.empirical_order:.3f} in [-1.3,-0.7]", -1.3 <= s.empirical_order <= -0.7),
            (f"{elapsed:.2f}s < 30s", elapsed < 30),
        ],
    )


def test_c03_legendre_oscillatory(report):
    ns = [6, 12, 24, 48, 96]
    errs = [float(V.compare("legendre", "oscillatory", n, 0.5).rel_err) for n in ns]
    exact6 = evaluate("legendre", 6, Fraction(1, 2))
    assert report(
        "criterion 3 legendre oscillatory x=0.5",
        [
            (f"decreasing {[f'{e:.3g}' for e in errs]}", decreasing(errs)),
            (f"rel_err(48)={errs[3]:.3g} <= 0.05", errs[3] <= 0.05),
            (f"rel_err(6)={errs[0]:.4g} within 20% of 0.024", abs(errs[0] - 0.024) <= 0.2 * 0.024),
            (f"pi_6(0.5)={float(exact6):.7f} equals the classical value", exact6 == V.monic_from_classical("legendre", 6, Fraction(1, 2))),
        ],
    )


def test_c04_hermite_ismail_outer(report):
    checks = []
    for fam in ("hermite", "ismail"):
        errs = [float(e) for e in V.convergence_sweep(fam, "outer", 2, SWEEP).rel_errs]
        checks.append((f"{fam} rel_err(64)={errs[2]:.3g} <= 0.02", errs[2] <= 0.02))
        checks.append((f"{fam} decreasing {[f'{e:.3g}' for e in errs]}", decreasing(errs)))
    exact5 = evaluate("ismail", 5, 50)
    r5 = float(V.compare("ismail", "outer", 5, 2).rel_err)
    checks.append((f"pi_5(50)={exact5}", exact5 == Fraction("157021352.125")))
    checks.append((f"ismail n=5 rel_err={r5:.3g} <= 0.05", r5 <= 0.05))
    assert report("criterion 4 hermite/ismail outer y=2", checks)


def _oscillatory_sweep(fam, y):
    try:
        s = V.convergence_sweep(fam, "oscillatory", y, SWEEP)
    except V.InsufficientDataError as exc:
        return f"{fam} y={y}: {exc}", False
    errs = [float(e) for e in s.rel_errs]
    return f"{fam} y={y} decreasing {[f'{e:.3g}' for e in errs]} skipped {s.skipped}", decreasing(errs)


def test_c05_oscillatory_sweeps(report):
    h4 = float(V.compare("hermite", "oscillatory", 4, 0.5).rel_err)
    i5 = float(V.compare("ismail", "oscillatory", 5, 0.25).rel_err)
    checks = [
        _oscillatory_sweep("hermite", 0.5),
        _oscillatory_sweep("ismail", 0.25),
        (f"hermite n=4 rel_err={h4:.4g} within 20% of 0.046", abs(h4 - 0.046) <= 0.2 * 0.046),
        (f"ismail n=5 rel_err={i5:.4g} within 20% of 0.045", abs(i5 - 0.045) <= 0.2 * 0.045),
    ]
    assert report("criterion 5 oscillatory sweeps with near-zero exclusion", checks)


def test_c05_supplement_ismail_odd_degrees(report):
    # at y = 1/4 the sine factor vanishes for every even n; odd degrees keep it at +-1
    s = V.convergence_sweep("ismail", "oscillatory", 0.25, [17, 33, 65, 129])
    errs = [float(e) for e in s.rel_errs]
    assert report(
        "criterion 5 supplement ismail y=0.25 odd n",
        [(f"decreasing {[f'{e:.3g}' for e in errs]} skipped {s.skipped}", decreasing(errs) and not s.skipped)],
    )


def test_c06_brackets(report):
    t0 = time.perf_counter()
    bad = []
    for n in (10, 50, 200):
        for y in (Fraction(11, 10), Fraction(3, 2), Fraction(2)):
            if not V.bracket_check_hermite(n, y).passed:
                bad.append(("hermite", n, y))
        for x in (-5, Fraction(3, 2) * n * n, 2 * n * n):
            if not V.bracket_check_ismail(n, x).passed:
                bad.append(("ismail", n, x))
    elapsed = time.perf_counter() - t0
    assert report(
        "criterion 6 bracket inequalities",
        [(f"18 grids, failures {bad}", not bad), (f"{elapsed:.2f}s < 10s", elapsed < 10)],
    )


def test_c07_quadrature(report):
    checks = V.quadrature_suite(bits=256, tol=1e-20)
    worst = max(float(c.diff) for c in checks)
    assert report(
        "criterion 7 quadrature identities",
        [(f"{sum(c.passed for c in checks)}/{len(checks)} pass, worst |lhs-rhs|={worst:.2e} <= 1e-20", all(c.passed for c in checks))],
    )


def test_c08_lemma(report):
    sq = V.lemma_residual_check("sqrt", 0.5, [64, 128, 256])
    ratios = {n: float(sq.ratios[n]) for n in (64, 128)}
    square = V.lemma_residual_check("square", 0.5, [64, 128, 256], bits=256)
    worst = max(float(r) for _, r in square.rows)
    assert report(
        "criterion 8 lemma residuals",
        [
            (f"sqrt reduction factors {ratios} in [3,5]", all(3 <= r <= 5 for r in ratios.values())),
            (f"square residual {worst:.2e} <= 2^(32-256)", worst <= 2.0 ** (32 - 256)),
        ],
    )


def test_c09_gamma_ratio(report):
    ns = range(8, 1025, 8)
    checks = []
    for which in ("legendre", "hermite"):
        t = V.gamma_ratio_check(which, ns)
        checks.append((f"{which} max {float(max(t.scaled)):.4g} <= 2 x {float(t.scaled[0]):.4g}", t.passed))
    assert report("criterion 9 gamma ratios", checks)


def test_c10_matching(report):
    pt = complex(0.5, 0.2)
    e50 = V.matching_check("legendre", 50, pt).mutual_rel_err
    e100 = V.matching_check("legendre", 100, pt).mutual_rel_err
    assert report(
        "criterion 10 legendre matching x=0.5+0.2i",
        [(f"err(100)={float(e100):.3g} < err(50)={float(e50):.3g}", e100 < e50)],
    )


def test_c11_zero_proximity(report):
    t0 = time.perf_counter()
    tables = {n: [float(r.deviation) for r in V.zero_proximity(n)] for n in (20, 40, 80)}
    elapsed = time.perf_counter() - t0
    medians = {n: statistics.median(d) for n, d in tables.items()}
    worst = max(tables[80])
    assert report(
        "criterion 11 ismail zero proximity",
        [
            (f"n=80 max deviation {worst:.3g} <= frozen {V.ZERO_DEVIATION_BOUND:g}", worst <= V.ZERO_DEVIATION_BOUND),
            (f"n=80 max deviation <= 0.25", worst <= 0.25),
            (
                f"medians {', '.join(f'{n}:{m:.3g}' for n, m in medians.items())} non-increasing",
                medians[20] >= medians[40] >= medians[80],
            ),
            (f"{elapsed:.2f}s < 120s", elapsed < 120),
        ],
    )
