import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from poisson_newton.errors import CoverageGap, FormatError, OrderError, PoleError
from poisson_newton.number_theory import (C0_ZETA_0, EULER_GAMMA, LOG_PI, ZeroTable, archimedean_side,
                                          c0_chi0, c0_zeta_half, digamma, explicit_formula_check,
                                          load_zeta_zeros, parse_zero_lines, pole_side, prime_powers,
                                          prime_side, selberg_remainder, sieve_primes, w0_remainder,
                                          w0_series, weil_psi, zero_side, zeta_atoms)
from poisson_newton.transforms import TestFunction

SQRT_2PI = math.sqrt(2 * math.pi)
LOG2 = math.log(2)


def naive_primes(n):
    return [p for p in range(2, n + 1) if all(p % q for q in range(2, int(p ** 0.5) + 1))]


def bool_sieve_count(n):
    mark = np.ones(n + 1, dtype=bool)
    mark[:2] = False
    for p in range(2, int(n ** 0.5) + 1):
        if mark[p]:
            mark[p * p::p] = False
    return int(mark.sum())


# -- primes -------------------------------------------------------------------

def test_sieve_examples():
    assert list(sieve_primes(10).primes) == [2, 3, 5, 7]
    assert len(sieve_primes(100).primes) == 25


def test_sieve_million(primes_1e6):
    assert len(primes_1e6.primes) == 78498 == bool_sieve_count(10 ** 6)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 5000), st.integers(6, 12))
def test_sieve_matches_trial_division(n, seg_bits):
    assert list(sieve_primes(n, segment=1 << seg_bits).primes) == naive_primes(n)


def test_prime_power_weights_small():
    logs, ks = prime_powers(sieve_primes(10), 3 * math.log(7) + 1e-9)
    got = sorted((round(math.exp(l)), int(k)) for l, k in zip(logs, ks))
    want = sorted((p, k) for p in (2, 3, 5, 7) for k in (1, 2, 3))
    assert [x for x in got if x[1] <= 3 and x[0] <= 7] == want
    for p in (2, 3, 5, 7):
        for k in (1, 2, 3):
            phi = TestFunction("bump", k * math.log(p), 0.01)
            assert prime_side(phi, 400, 0.5) == pytest.approx(math.log(p) * p ** (-k / 2), rel=1e-15)


def test_zeta_atom_weights():
    atoms = zeta_atoms(10, 2.5)
    assert atoms[0].frequency == pytest.approx(LOG2, rel=1e-15)
    assert atoms[0].weight == pytest.approx(-LOG2, rel=1e-15)


# -- zero tables --------------------------------------------------------------------

def test_parse_zero_lines_examples(tmp_path):
    assert parse_zero_lines(["14.134725142"]).gammas[0] == pytest.approx(14.134725142)
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    assert load_zeta_zeros(empty).count == 0
    with pytest.raises(OrderError):
        parse_zero_lines(["21.0", "14.1"])
    with pytest.raises(FormatError, match="line 3"):
        parse_zero_lines(["# header", "14.13", "abc"])
    table = parse_zero_lines(["# comment", "", "14.13", "14.13", "21.02"])
    assert table.count == 3  # a repeated line is a double zero


def test_shipped_zero_table(zeta_zeros):
    assert zeta_zeros.count == 10_000
    assert 14.13 < zeta_zeros.gammas[0] < 14.14
    assert np.all(np.diff(zeta_zeros.gammas) > 0)


# -- digamma and constants -------------------------------------------------------

def test_digamma_examples():
    assert digamma(1) == pytest.approx(-EULER_GAMMA, abs=1e-15)
    assert digamma(0.25) == pytest.approx(-math.pi / 2 - 3 * LOG2 - EULER_GAMMA, abs=1e-14)
    assert digamma(2) == pytest.approx(1 - EULER_GAMMA, abs=1e-15)
    with pytest.raises(PoleError):
        digamma(-3)


def test_digamma_recurrence_random():
    rng = np.random.default_rng(1)
    z = rng.uniform(0.1, 20, 100) + 1j * rng.uniform(-20, 20, 100)
    assert np.max(np.abs(digamma(z + 1) - digamma(z) - 1 / z)) < 1e-13


def test_digamma_against_scipy():
    rng = np.random.default_rng(2)
    z = rng.uniform(-30, 30, 200) + 1j * rng.uniform(-60, 60, 200)
    assert np.allclose(digamma(z), special.psi(z), rtol=1e-13, atol=1e-13)


def test_digamma_partial_sums():
    # psi(z) = -gamma + sum_{n >= 0} (1/(n+1) - 1/(n+z)), truncated at 10^6 terms
    n = np.arange(10 ** 6, dtype=float)
    partial = -EULER_GAMMA + math.fsum(1 / (n + 1) - 1 / (n + 0.25))
    assert abs(partial - digamma(0.25)) < 2e-6


def test_weil_psi():
    assert weil_psi(0.0) == pytest.approx(-LOG_PI + digamma(0.25).real, abs=1e-14)
    assert weil_psi(0.0) == pytest.approx(-5.3721834, abs=1e-7)
    for t in (1.0, 5.0, 20.0):
        assert weil_psi(-t) == weil_psi(t)
    assert abs(weil_psi(1e4) - (-LOG_PI + math.log(1e4 / 2))) < 1e-3


def test_c0_constants():
    assert c0_chi0(0.5).real == pytest.approx(2.6860917, abs=1e-7)
    assert abs(c0_chi0(0.5) + c0_zeta_half()) < 1e-12
    # correctly rounded -log(2 pi); libm's log may differ by one ulp
    assert C0_ZETA_0 == float("-1.83787706640934548356065947281123527")
    assert abs(C0_ZETA_0 + math.log(2 * math.pi)) <= math.ulp(C0_ZETA_0)


def test_w0():
    assert w0_remainder(1.0) == pytest.approx(-math.exp(0.5) + math.exp(-1.5) / (2 * math.sinh(1.0)), rel=1e-15)
    assert w0_remainder(1.0) == pytest.approx(-1.55377, abs=1e-4)
    assert abs(w0_remainder(40.0) + math.exp(20.0)) < 1e-20
    for t in (0.5, 1.0, 2.0):
        assert abs(w0_series(t) - w0_remainder(t)) < 1e-12


# -- sides of the explicit formula ---------------------------------------------

def test_prime_side_examples():
    phi = TestFunction("bump", LOG2, 0.1)
    assert prime_side(phi, 100, 0.5) == pytest.approx(LOG2 * 2 ** -0.5 * phi(LOG2), rel=1e-15)
    assert prime_side(TestFunction("bump", 0.35, 0.3), 100, 0.5) == 0
    phi = TestFunction("bump", 2 * LOG2, 0.05)
    assert prime_side(phi, 100, 0.0) == pytest.approx(LOG2 * phi(2 * LOG2), rel=1e-15)


def test_prime_side_beta_reweighting():
    logs, ks = prime_powers(sieve_primes(50), math.log(50))
    for l, k in zip(logs, ks):
        phi = TestFunction("bump", k * l, 1e-3)
        half, zero = prime_side(phi, 50, 0.5), prime_side(phi, 50, 0.0)
        assert half * math.exp(k * l / 2) == pytest.approx(zero, rel=1e-13)


def test_prime_side_coverage_gap():
    with pytest.raises(CoverageGap):
        prime_side(TestFunction("gaussian", 0.0, 1.0), 100, 0.5)


def test_zero_side_examples():
    phi = TestFunction("gaussian", 0.0, 0.5)
    assert zero_side(ZeroTable(np.array([])), phi).value == 0
    g = 14.134725141734693790
    got = zero_side(ZeroTable(np.array([g])), phi).value
    assert got == pytest.approx(2 * 0.5 * SQRT_2PI * math.exp(-0.125 * g * g), rel=1e-12)


@pytest.mark.parametrize("w", [0.05, 0.1, 0.3])
def test_zero_side_tail_bounds_doubling(zeta_zeros, w):
    phi = TestFunction("gaussian", 0.0, w)
    for n in (100, 1000):
        a = zero_side(zeta_zeros.head(n), phi)
        b = zero_side(zeta_zeros.head(2 * n), phi)
        assert abs(a.value - b.value) <= a.tail_estimate


@pytest.mark.parametrize("w", [0.5, 1.0, 2.0])
def test_pole_side_gaussian(w):
    phi = TestFunction("gaussian", 0.0, w)
    assert pole_side(phi) == pytest.approx(2 * w * SQRT_2PI * math.exp(w * w / 8), rel=1e-14)


@pytest.mark.parametrize("phi", [TestFunction("gaussian", 0.0, 1.0), TestFunction("gaussian", 0.0, 0.2),
                                 TestFunction("bump", 0.0, 1.5)])
def test_archimedean_even_is_real(phi):
    assert abs(archimedean_side(phi).imag) < 1e-12


@pytest.mark.parametrize("phi", [TestFunction("gaussian", 0.0, 1.0), TestFunction("gaussian", 0.0, 0.1),
                                 TestFunction("gaussian", 0.7, 0.5), TestFunction("bump", 0.0, 1.0)])
def test_archimedean_against_dense_quadrature(phi):
    def integrand(t):
        return weil_psi(t) * (complex(phi.fourier_hat(t)) + complex(phi.fourier_hat(-t))).real

    reach = 40.0 / phi.width if phi.kind == "gaussian" else 400.0
    edges = np.linspace(0.0, reach, 401)
    oracle = math.fsum(integrate.quad(integrand, a, b, limit=200, epsabs=1e-14, epsrel=1e-13)[0]
                       for a, b in zip(edges, edges[1:])) / (2 * math.pi)
    assert archimedean_side(phi).real == pytest.approx(oracle, abs=1e-8 * max(1.0, abs(oracle)))


def test_explicit_formula_full_table(zeta_zeros, primes_1e6):
    rep = explicit_formula_check(TestFunction("gaussian", 0.0, 1.0), zeta_zeros, 10 ** 6, primes_1e6)
    assert rep.residual <= 1e-3 * rep.scale
    assert rep.residual == pytest.approx(rep.recomputed_residual(), abs=0.0)
    assert rep.truncations["N"] == 10_000 and rep.truncations["X"] == 10 ** 6


def test_explicit_formula_widening_helps(zeta_zeros):
    # without zeros the residual is the missing zero side, which shrinks as phi widens
    primes = sieve_primes(10 ** 4)
    narrow = explicit_formula_check(TestFunction("gaussian", 0.0, 0.5), zeta_zeros.head(0), 10 ** 4, primes)
    wide = explicit_formula_check(TestFunction("gaussian", 0.0, 1.0), zeta_zeros.head(0), 10 ** 4, primes)
    assert wide.relative_residual < narrow.relative_residual


def test_explicit_formula_smoke_large_residual(zeta_zeros):
    rep = explicit_formula_check(TestFunction("gaussian", 0.0, 1.0), zeta_zeros.head(0), 2)
    assert rep.residual == pytest.approx(abs(rep.pole_side + rep.archimedean_side - rep.prime_side), rel=1e-15)
    assert rep.residual > 0.1


@pytest.mark.parametrize("w,n_small,n_large", [(0.02, 100, 1000), (0.03, 100, 1000)])
def test_explicit_formula_decade_convergence_narrow(zeta_zeros, primes_1e6, w, n_small, n_large):
    # narrow gaussians keep the zero side above roundoff across the table
    phi = TestFunction("gaussian", 0.0, w)
    small = explicit_formula_check(phi, zeta_zeros.head(n_small), 10 ** 6, primes_1e6)
    large = explicit_formula_check(phi, zeta_zeros.head(n_large), 10 ** 6, primes_1e6)
    assert large.residual < small.residual


# -- Selberg ------------------------------------------------------------------

def test_selberg_remainder_against_dense_quadrature():
    phi = TestFunction("bump", 1.5, 0.5)
    got = selberg_remainder(2, phi)
    kernel = lambda t: math.cosh(t / 2) / math.sinh(t / 2) ** 2 * phi(t)
    edges = np.linspace(1.0, 2.0, 65)
    oracle = -0.5 * math.fsum(integrate.quad(kernel, a, b, epsabs=0, epsrel=1e-13, limit=200)[0]
                              for a, b in zip(edges, edges[1:]))
    assert got == pytest.approx(oracle, rel=1e-10)
    assert selberg_remainder(2, phi, tol=1e-15, panels=16) == pytest.approx(got, rel=1e-10)


def test_selberg_remainder_needs_gap_at_zero():
    with pytest.raises(ValueError):
        selberg_remainder(2, TestFunction("bump", 0.0, 1.0))
