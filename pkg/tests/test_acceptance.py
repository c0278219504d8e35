"""Acceptance suite: one PASS/FAIL line per criterion, at the stated tolerances.

Run with ``pytest -v -s tests/test_acceptance.py`` to see the lines live; they
are also echoed past pytest's capture so ``pytest -v | tee`` records them.
"""
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from poisson_newton.divisor import discrepancy_c0, locate_divisor
from poisson_newton.number_theory import (C0_ZETA_0, EULER_GAMMA, LOG_2, LOG_2PI, LOG_PI, PI, c0_chi0, digamma,
                                          selberg_remainder, w0_remainder, w0_series)
from poisson_newton.series import DirichletSeries, detect_functional_equation, evaluate
from poisson_newton.transforms import TestFunction
from poisson_newton.verifier import (power_sums_from_b, power_sums_recurrence, power_sums_roots, s4_closed_form,
                                     verify_classical_poisson, verify_explicit_formula, verify_poisson_newton,
                                     verify_selberg)

_divisors = {}


def lattice_divisor(lam, H=1e4):
    key = (lam, H)
    if key not in _divisors:
        _divisors[key] = locate_divisor(DirichletSeries.lattice(lam, (1,), (-1.0,)), H)
    return _divisors[key]


@pytest.fixture
def announce(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print("\nACCEPTANCE %d %-34s %s  %s" % (number, title, "PASS" if ok else "FAIL", detail))
        return ok
    return emit


def test_criterion_1_newton_identities(announce):
    rng = random.Random(20240601)
    start = time.perf_counter()
    exact_ok = roots_ok = s4_ok = True
    worst = 0.0
    for _ in range(100):
        degree = rng.randint(1, 8)
        poly = [1] + [rng.randint(-5, 5) for _ in range(degree)]
        from_b = power_sums_from_b(poly, 16)
        exact_ok &= from_b == power_sums_recurrence(poly, 16) and all(isinstance(v, Fraction) for v in from_b)
        sums, scales = power_sums_roots(poly, 16)
        for sb, sr, sc in zip(from_b, sums, scales):
            err = abs(complex(sb) - sr) / max(sc, abs(sr), 1e-300)
            worst = max(worst, err)
        e = [(-1) ** (i + 1) * a for i, a in enumerate(poly[1:])]
        s4_ok &= from_b[3] == s4_closed_form(e)
    roots_ok = worst <= 1e-9
    elapsed = time.perf_counter() - start
    ok = exact_ok and roots_ok and s4_ok and elapsed < 10
    announce(1, "Newton identities", ok, "exact=%s s4=%s roots_rel_max=%.2e time=%.2fs"
             % (exact_ok, s4_ok, worst, elapsed))
    assert ok


def test_criterion_2_classical_poisson(announce):
    phi = TestFunction("gaussian", 0.0, 1.0)
    start = time.perf_counter()
    rels = {}
    for lam in (1.0, 2.0, PI):
        rels[lam] = verify_classical_poisson(lam, phi, H=1e4, tolerance=1e-10, divisor=lattice_divisor(lam)).rel_err
    elapsed = time.perf_counter() - start
    ok = all(r <= 1e-10 for r in rels.values()) and elapsed < 30
    announce(2, "classical Poisson", ok, "rel_err=%s time=%.1fs"
             % (", ".join("%.2e" % r for r in rels.values()), elapsed))
    assert ok


def test_criterion_3_discrepancy_constant(announce):
    details, ok = [], True
    for lam in (1.0, 2.0, PI):
        s = DirichletSeries.lattice(lam, (1,), (-1.0,))
        d = lattice_divisor(lam)
        a = discrepancy_c0(s, d, s0=3.0)
        b = discrepancy_c0(s, d, s0=5.0 + 1.0j)
        err = abs(a.c0 - lam / 2)
        spread = abs(a.c0 - b.c0)
        ok &= err <= 1e-6 and spread <= a.tail_estimate + b.tail_estimate
        details.append("lam=%.4g err=%.1e spread=%.1e tails=%.1e" % (lam, err, spread, a.tail_estimate + b.tail_estimate))
    announce(3, "discrepancy constant c0", ok, "; ".join(details))
    assert ok


def test_criterion_4_two_frequency(announce):
    s = DirichletSeries((1.0, math.sqrt(2)), (0.5, 0.25))
    phi = TestFunction("bump", 2.75, 2.25)
    d = locate_divisor(s, 2000)
    residual = max(abs(evaluate(s, r)) / float(s.scale(r)) for r, _ in d.points)
    rels = [verify_poisson_newton(s, phi, H, T=5, divisor=d.truncate(H)).rel_err for H in (500, 1000, 2000)]
    located = residual < 1e-10 and d.height >= 2000
    matches = rels[-1] <= 1e-6
    halving = rels[1] <= rels[0] / 2 and rels[2] <= rels[1] / 2
    ok = located and matches and halving
    announce(4, "two-frequency Poisson-Newton", ok,
             "zeros=%d residual=%.1e rel_err(500,1000,2000)=%s halving=%s"
             % (len(d.points), residual, ", ".join("%.2e" % r for r in rels), halving))
    assert ok


def _fe_cases():
    rng = random.Random(5)
    cases = []
    for i in range(10):
        n = rng.randint(1, 5)
        base = rng.choice([0.5, 1.0, math.log(2), 1.7])
        scale = rng.choice([1.0, 2.0, 0.5])                # a_N = scale^N shifts the symmetry axis
        sign = 1 if n % 2 == 0 else rng.choice([1, -1])
        half = [rng.choice([-3, -2, -1, 1, 2, 3]) for _ in range((n + 1) // 2)]
        a = [1.0] + [0.0] * n
        for j in range(1, n):
            mirror = n - j
            a[j] = half[min(j, mirror) - 1] if j <= mirror else sign * a[mirror]
        a[n] = float(sign)
        # a_j scale^j keeps the palindrome after the axis shift
        coeffs = [a[j] * scale ** j for j in range(1, n + 1)]
        mults = [j for j in range(1, n + 1) if coeffs[j - 1] != 0]
        series = DirichletSeries.lattice(base, tuple(mults), tuple(coeffs[j - 1] for j in mults))
        cases.append((series, True, base * n / 2, sign))
    for _ in range(10):
        a1 = rng.uniform(0.1, 3) * rng.choice([1, -1])
        a2 = rng.uniform(0.1, 3) * rng.choice([1, -1])
        cases.append((DirichletSeries((1.0, 2.5), (a1, a2)), False, None, None))
    return cases


def test_criterion_5_functional_equation(announce):
    wrong = []
    for i, (series, has_fe, mu, c) in enumerate(_fe_cases()):
        info = detect_functional_equation(series)
        good = info.has_fe == has_fe and (not has_fe or (abs(info.mu - mu) < 1e-12 and info.c == c))
        if not good:
            wrong.append(i)
    ok = not wrong
    announce(5, "functional-equation detection", ok, "20 cases, misclassified=%s" % (wrong or "none"))
    assert ok


def test_criterion_6_constants(announce):
    d14 = abs(digamma(0.25) - (-PI / 2 - 3 * LOG_2 - EULER_GAMMA))
    cross = abs(c0_chi0(0.5) + (-LOG_PI / 2 - PI / 4 - EULER_GAMMA / 2 - 1.5 * LOG_2))
    zeta0 = C0_ZETA_0 == -LOG_2PI and abs(C0_ZETA_0 + math.log(2 * math.pi)) <= math.ulp(C0_ZETA_0)
    ok = d14 <= 1e-12 and cross <= 1e-12 and zeta0
    announce(6, "constants", ok, "digamma(1/4) err=%.1e c0 cross-identity=%.1e c0(zeta,0)=%r"
             % (d14, cross, C0_ZETA_0))
    assert ok


def test_criterion_7_explicit_formula(announce, zeta_zeros, primes_1e6):
    phi = TestFunction("gaussian", 0.0, 1.0)
    start = time.perf_counter()
    full = verify_explicit_formula(phi, zeta_zeros, 10 ** 6, primes_1e6, tolerance=1e-3)
    small = verify_explicit_formula(phi, zeta_zeros.head(100), 10 ** 6, primes_1e6, tolerance=1e-3)
    elapsed = time.perf_counter() - start
    rel = full.params["relative_residual"]
    decreasing = full.abs_err < small.abs_err
    ok = zeta_zeros.count >= 10 ** 4 and rel <= 1e-3 and decreasing and elapsed < 120
    announce(7, "explicit formula", ok, "N=%d rel_residual=%.2e residual(N=1e4)=%.3e residual(N=1e2)=%.3e "
             "strictly_smaller=%s time=%.1fs" % (zeta_zeros.count, rel, full.abs_err, small.abs_err, decreasing, elapsed))
    assert ok


def test_criterion_8_w0(announce):
    errs = [abs(w0_series(t, 50) - w0_remainder(t)) for t in (0.5, 1.0, 2.0)]
    ok = max(errs) <= 1e-12
    announce(8, "W0 closed form", ok, "max err=%.1e" % max(errs))
    assert ok


def test_criterion_9_selberg(announce, selberg_fixture):
    h, gammas, lengths, phi = selberg_fixture
    rep = verify_selberg(h, gammas, lengths, phi, tolerance=1e-10)
    bump = TestFunction("bump", 1.5, 0.5)
    base = selberg_remainder(2, bump)
    doubled = selberg_remainder(2, bump, tol=1e-15, panels=16)
    quad_err = abs(base - doubled) / abs(doubled)
    ok = rep.passed and quad_err <= 1e-10
    announce(9, "Selberg instance", ok, "fixture rel_err=%.1e remainder vs double resolution=%.1e"
             % (rep.rel_err, quad_err))
    assert ok
