"""End-to-end checks of the Poisson-Newton formula and its special cases.

Every check produces a VerificationReport.  A tolerance miss is a report with
``passed = False``; only malformed input or numerical breakdown raises.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .divisor import Divisor, discrepancy_c0, locate_divisor, structure_at_zero
from .errors import RootSolveFailure
from .number_theory import (PrimeTable, ZeroTable, explicit_formula_check, selberg_atom_sum,
                            selberg_remainder, selberg_spectral_sum, sieve_primes)
from .series import DirichletSeries, atom_measure, b_coefficient, enumerate_multi_indices
from .transforms import TestFunction, atom_pairing, delta_zero_terms, divisor_pairing

DEFAULT_TOLERANCE = 1e-6


@dataclass
class VerificationReport:
    scenario: str
    lhs: complex
    rhs: complex
    params: dict = field(default_factory=dict)
    tolerance: float = DEFAULT_TOLERANCE
    abs_err: float = field(init=False)
    rel_err: float = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self):
        self.lhs = complex(self.lhs)
        self.rhs = complex(self.rhs)
        self.abs_err = abs(self.lhs - self.rhs)
        self.rel_err = self.abs_err / max(abs(self.lhs), abs(self.rhs), 1e-300)
        self.passed = bool(self.rel_err <= self.tolerance)

    def to_dict(self):
        return {"scenario": self.scenario, "lhs": [self.lhs.real, self.lhs.imag],
                "rhs": [self.rhs.real, self.rhs.imag], "abs_err": self.abs_err, "rel_err": self.rel_err,
                "tolerance": self.tolerance, "pass": self.passed, "params": _jsonable(self.params)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _reach(phi: TestFunction, symmetric: bool) -> float:
    lo, hi = phi.support
    return max(abs(lo), abs(hi)) if symmetric else hi


# -- generic Poisson-Newton ----------------------------------------------------

def verify_poisson_newton(series: DirichletSeries, phi: TestFunction, H: float, T: Optional[float] = None,
                          beta: float = 0.0, symmetric: bool = False, c0: Optional[complex] = None,
                          tolerance: float = DEFAULT_TOLERANCE, divisor: Optional[Divisor] = None,
                          scenario: str = "poisson-newton") -> VerificationReport:
    """Divisor-side exponential sum against the atom sum, paired with phi.

    One-sided mode pairs on (0, inf).  Symmetric mode pairs on R; the exponential
    sum over the divisor then needs the delta_0 weight 2 sum n_rho / (rho - beta),
    truncated at the same height, to become the Newton-Cramer distribution, and
    the frequency side gains 2 c0(beta) phi(0).
    """
    if divisor is None:
        divisor = locate_divisor(series, H)
    T = _reach(phi, symmetric) if T is None else float(T)
    atoms = atom_measure(series, T)
    right = atom_pairing(atoms, phi, beta, symmetric, cutoff=T)
    left = divisor_pairing(divisor, phi, beta, symmetric)
    lhs, rhs = left.value, right.value
    params = {"H": H, "T": T, "beta": beta, "symmetric": symmetric, "test": phi.spec(),
              "divisor_points": len(divisor.points), "atoms": len(atoms),
              "divisor_tail": left.tail_estimate, "residual_bound": divisor.residual_bound}
    if symmetric:
        c0_tail = 0.0
        if c0 is None:
            dc = discrepancy_c0(series, divisor, sigma=beta)
            c0, c0_tail = dc.c0, dc.tail_estimate
            params["c0_source"] = "divisor"
        else:
            params["c0_source"] = "supplied"
        # the naive sum's terms behave like -2 phi(0) / (rho - beta) at large height;
        # the same truncation of the structure sum cancels that slow tail exactly
        structure, s_tail = structure_at_zero(divisor, beta, extrapolate=False)
        phi0 = phi.derivative(0, 0.0)
        lhs += 2 * phi0 * structure
        rhs += delta_zero_terms(c0, phi)
        params.update({"c0": complex(c0), "c0_tail": c0_tail, "structure_at_zero": structure,
                       "structure_tail": s_tail})
    return VerificationReport(scenario, lhs, rhs, params, tolerance)


def verify_classical_poisson(lam: float, phi: TestFunction, H: float = 1e4, tolerance: float = 1e-10,
                             divisor: Optional[Divisor] = None) -> VerificationReport:
    """Symmetric check on 1 - exp(-lam s) with the closed-form c0 = lam / 2."""
    series = DirichletSeries.lattice(lam, (1,), (-1.0,))
    report = verify_poisson_newton(series, phi, H, symmetric=True, c0=lam / 2, tolerance=tolerance,
                                   divisor=divisor, scenario="classical-poisson")
    report.params["lambda"] = lam
    return report


# -- Newton identities -----------------------------------------------------------

def _is_exact(values):
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in values)


def power_sums_from_b(poly_coeffs: Sequence, m_max: int):
    """S_m = m * sum of b_k over k with k_1 + 2 k_2 + ... + n k_n = m, for m = 1..m_max.

    The monic polynomial z^n + a_1 z^{n-1} + ... + a_n corresponds to the series
    1 + a_1 e^{-lam s} + ... + a_n e^{-n lam s}; zero coefficients are kept so the
    lattice weights stay 1..n.
    """
    a = list(poly_coeffs)[1:]
    exact = _is_exact(a)
    weights = list(range(1, len(a) + 1))
    by_m = {m: [] for m in range(1, m_max + 1)}
    for k in enumerate_multi_indices(weights, m_max):
        if any(kj and aj == 0 for kj, aj in zip(k, a)):
            continue
        m = sum(w * kj for w, kj in zip(weights, k))
        by_m[m].append(b_coefficient(k, a, exact=exact))
    out = []
    for m in range(1, m_max + 1):
        if exact:
            out.append(m * sum(by_m[m], Fraction(0)))
        else:
            out.append(m * complex(math.fsum(v.real for v in map(complex, by_m[m])),
                                   math.fsum(v.imag for v in map(complex, by_m[m]))))
    return out


def power_sums_recurrence(poly_coeffs: Sequence, m_max: int):
    """Newton's recurrence with e_i = (-1)^i a_i; exact for integer or rational input."""
    a = list(poly_coeffs)[1:]
    exact = _is_exact(a)
    zero = Fraction(0) if exact else 0j
    e = [(-1) ** (i + 1) * a[i] for i in range(len(a))]  # e[i] is e_{i+1}
    s = []
    for m in range(1, m_max + 1):
        total = zero
        for i in range(1, m):
            if i <= len(e):
                total += (-1) ** (i - 1) * e[i - 1] * s[m - i - 1]
        if m <= len(e):
            total += (-1) ** (m - 1) * m * e[m - 1]
        s.append(total)
    return s


def power_sums_roots(poly_coeffs: Sequence, m_max: int):
    """Power sums of numerically computed roots, with sum |alpha|^m as the error scale."""
    coeffs = np.array([complex(c) for c in poly_coeffs])
    try:
        roots = np.roots(coeffs)
    except np.linalg.LinAlgError as exc:
        raise RootSolveFailure("root solve failed: %s" % exc) from None
    if roots.size != len(coeffs) - 1 or not np.all(np.isfinite(roots)):
        raise RootSolveFailure("root solve returned %d finite roots for degree %d"
                               % (np.isfinite(roots).sum(), len(coeffs) - 1))
    sums, scales = [], []
    for m in range(1, m_max + 1):
        pw = roots ** m
        sums.append(complex(math.fsum(pw.real), math.fsum(pw.imag)))
        scales.append(float(np.sum(np.abs(roots) ** m)))
    return sums, scales


def s4_closed_form(e: Sequence):
    """S_4 written in the elementary symmetric values e_1..e_4 (missing ones are 0)."""
    e = list(e) + [0] * 4
    e1, e2, e3, e4 = e[:4]
    return e1 ** 4 - 4 * e2 * e1 ** 2 + 4 * e3 * e1 + 2 * e2 ** 2 - 4 * e4


def verify_newton_identities(poly_coeffs: Sequence, lam: float = 1.0, m_max: int = 8,
                             tolerance: float = 1e-9, check_roots: bool = True) -> list:
    """One report per m comparing the b_k composition sum with Newton's recurrence.

    The frequency base lam only rescales the lattice and drops out of S_m; it is
    recorded for completeness.  Roots from a companion solve are an independent
    floating oracle; disagreement beyond ``tolerance`` on the sum |alpha|^m scale
    raises RootSolveFailure.
    """
    poly = list(poly_coeffs)
    if len(poly) < 2 or poly[0] != 1:
        raise ValueError("poly: need a monic polynomial of degree >= 1")
    from_b = power_sums_from_b(poly, m_max)
    from_rec = power_sums_recurrence(poly, m_max)
    roots = scales = None
    if check_roots:
        roots, scales = power_sums_roots(poly, m_max)
    reports = []
    for m in range(1, m_max + 1):
        params = {"m": m, "lambda": lam, "degree": len(poly) - 1, "exact": _is_exact(poly[1:]),
                  "S_b": from_b[m - 1], "S_recurrence": from_rec[m - 1]}
        if check_roots:
            err = abs(complex(from_b[m - 1]) - roots[m - 1]) / max(scales[m - 1], abs(roots[m - 1]), 1e-300)
            params.update({"S_roots": roots[m - 1], "roots_rel_err": err})
            if err > tolerance:
                raise RootSolveFailure("roots give S_%d = %r against %r (scaled error %.3g)"
                                       % (m, roots[m - 1], from_b[m - 1], err))
        lhs, rhs = from_b[m - 1], from_rec[m - 1]
        if params["exact"]:
            params["exact_difference"] = lhs - rhs
        reports.append(VerificationReport("newton-identity", complex(lhs), complex(rhs), params, tolerance))
    return reports


# -- zeta and Selberg ---------------------------------------------------------

def verify_explicit_formula(phi: TestFunction, zeros: ZeroTable, X: int, primes: Optional[PrimeTable] = None,
                            tolerance: float = 1e-3) -> VerificationReport:
    """Zero sum plus prime side against pole plus archimedean side."""
    rep = explicit_formula_check(phi, zeros, X, primes)
    params = dict(rep.to_dict())
    params["test"] = phi.spec()
    return VerificationReport("explicit-formula", rep.zero_side + rep.prime_side,
                              rep.pole_side + rep.archimedean_side, params, tolerance)


def verify_explicit_doubling(phi: TestFunction, zeros: ZeroTable, N: int, X: int,
                             primes: Optional[PrimeTable] = None, tolerance: float = 1e-3) -> list:
    """Reports at N and 2N zeros for the same X; the second records the residual ratio."""
    if 2 * N > zeros.count:
        raise ValueError("need %d zeros for the doubling study, table has %d" % (2 * N, zeros.count))
    primes = primes or sieve_primes(X)
    first = verify_explicit_formula(phi, zeros.head(N), X, primes, tolerance)
    second = verify_explicit_formula(phi, zeros.head(2 * N), X, primes, tolerance)
    ratio = second.abs_err / first.abs_err if first.abs_err else math.nan
    second.params["residual_ratio"] = ratio
    second.params["previous_N"] = N
    return [first, second]


def verify_selberg(h: int, gammas: Sequence, lengths: Sequence, phi: TestFunction,
                   tolerance: float = 1e-10) -> VerificationReport:
    """(1/2) sum over +-gamma of phi_hat against the remainder plus length atoms."""
    spectral = selberg_spectral_sum(gammas, phi)
    remainder = selberg_remainder(h, phi)
    atoms = selberg_atom_sum(lengths, phi)
    params = {"genus": h, "eigen_count": spectral.truncation["N"], "length_count": len(lengths),
              "remainder": remainder, "atom_sum": atoms, "spectral_tail": spectral.tail_estimate,
              "test": phi.spec(), "insufficient_data": not len(gammas) or not len(lengths)}
    return VerificationReport("selberg", spectral.value, remainder + atoms, params, tolerance)
