"""Finite Dirichlet series f(s) = 1 + sum_n a_n exp(-lambda_n s).

The log-expansion coefficients b_k of -log f are produced combinatorially
from the multinomial formula, never through a numerical logarithm, so there
is no branch ambiguity.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import ExplosionGuard, NearZeroDenominator, SeriesSpecError
from .summation import csum

DEFAULT_ENTRY_BUDGET = 10_000_000
MERGE_RTOL = 1e-12
LATTICE_RTOL = 1e-9


@dataclass(frozen=True)
class DirichletSeries:
    frequencies: tuple
    coefficients: tuple
    rational_base: Optional[float] = None
    multipliers: Optional[tuple] = None

    def __post_init__(self):
        freqs = [float(x) for x in self.frequencies]
        coeffs = [complex(c) for c in self.coefficients]
        if len(freqs) != len(coeffs):
            raise SeriesSpecError("coefficients: length %d does not match frequencies (%d)"
                                  % (len(coeffs), len(freqs)))
        mults = None
        if self.multipliers is not None:
            mults = [int(m) for m in self.multipliers]
            if len(mults) != len(freqs):
                raise SeriesSpecError("multipliers: length does not match frequencies")
        base = None if self.rational_base is None else float(self.rational_base)
        if base is not None:
            if not base > 0:
                raise SeriesSpecError("rational_base: must be positive")
            if mults is None:
                mults = []
                for lam in freqs:
                    q = lam / base
                    m = round(q)
                    if m < 1 or abs(q - m) > LATTICE_RTOL * max(1.0, q):
                        raise SeriesSpecError("frequencies: %r is not an integer multiple of "
                                              "rational_base %r" % (lam, base))
                    mults.append(m)
            else:
                for lam, m in zip(freqs, mults):
                    if m < 1 or abs(lam - m * base) > LATTICE_RTOL * max(1.0, lam):
                        raise SeriesSpecError("multipliers: %d * %r != frequency %r" % (m, base, lam))
        elif mults is not None:
            raise SeriesSpecError("multipliers: given without rational_base")

        keep = [i for i, c in enumerate(coeffs) if c != 0]
        freqs = [freqs[i] for i in keep]
        coeffs = [coeffs[i] for i in keep]
        if mults is not None:
            mults = [mults[i] for i in keep]
        if not freqs:
            raise SeriesSpecError("coefficients: all zero, series is constant")
        if any(not (lam > 0) or not math.isfinite(lam) for lam in freqs):
            raise SeriesSpecError("frequencies: must be finite and positive")
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise SeriesSpecError("frequencies: must be strictly increasing")
        object.__setattr__(self, "frequencies", tuple(freqs))
        object.__setattr__(self, "coefficients", tuple(coeffs))
        object.__setattr__(self, "rational_base", base)
        object.__setattr__(self, "multipliers", None if mults is None else tuple(mults))

    @classmethod
    def lattice(cls, base, multipliers, coefficients):
        """Series whose frequencies are integer multiples of ``base``."""
        return cls(tuple(base * m for m in multipliers), coefficients, base, tuple(multipliers))

    @classmethod
    def from_polynomial(cls, poly_coeffs, lam=1.0):
        """f(s) = exp(-lam n s) P(exp(lam s)) for monic P = z^n + a_1 z^{n-1} + ... + a_n."""
        poly = list(poly_coeffs)
        if not poly or poly[0] != 1:
            raise SeriesSpecError("poly: leading coefficient must be 1")
        n = len(poly) - 1
        return cls.lattice(lam, range(1, n + 1), poly[1:])

    @property
    def size(self):
        return len(self.frequencies)

    def __call__(self, s):
        return evaluate(self, s)

    def values(self, s):
        """Vectorized f(s) and f'(s) over an array of points (no compensation)."""
        s = np.asarray(s, dtype=complex)
        lam = np.asarray(self.frequencies)
        a = np.asarray(self.coefficients)
        # far-left Newton excursions overflow to inf/nan; callers treat that as divergence
        with np.errstate(over="ignore", invalid="ignore"):
            e = np.exp(-np.multiply.outer(s, lam))
            f = 1.0 + e @ a
            df = -(e @ (lam * a))
        return f, df

    def scale(self, s):
        """1 + sum |a_n| exp(-lambda_n Re s): the natural size of f near s."""
        x = np.real(np.asarray(s, dtype=complex))
        lam = np.asarray(self.frequencies)
        with np.errstate(over="ignore"):
            return 1.0 + np.exp(-np.multiply.outer(x, lam)) @ np.abs(self.coefficients)


def evaluate(series: DirichletSeries, s: complex) -> complex:
    s = complex(s)
    terms = [1.0] + [a * cmath.exp(-lam * s) for lam, a in zip(series.frequencies, series.coefficients)]
    return csum(terms)


def log_derivative(series: DirichletSeries, s: complex, floor: float = 1e-13) -> complex:
    s = complex(s)
    f = evaluate(series, s)
    scale = float(series.scale(s))
    if abs(f) < floor * scale:
        raise NearZeroDenominator("|f(%r)| = %.3g is below %.3g; s is on the divisor"
                                  % (s, abs(f), floor * scale))
    df = csum([-lam * a * cmath.exp(-lam * s) for lam, a in zip(series.frequencies, series.coefficients)])
    return df / f


def abscissa(series: DirichletSeries) -> float:
    """Finite-range limsup of log(|a_1| + ... + |a_n|) / lambda_n."""
    best = -math.inf
    running = 0.0
    for lam, a in zip(series.frequencies, series.coefficients):
        running += abs(a)
        best = max(best, math.log(running) / lam)
    return best


def is_real_analytic(series: DirichletSeries) -> bool:
    return all(a.imag == 0 for a in series.coefficients)


def conjugate(series: DirichletSeries) -> DirichletSeries:
    return DirichletSeries(series.frequencies, tuple(a.conjugate() for a in series.coefficients),
                           series.rational_base, series.multipliers)


# -- log expansion ---------------------------------------------------------

def multinomial(k: Sequence[int]) -> int:
    """||k||! / prod k_j! as an exact integer."""
    total = 0
    out = 1
    for kj in k:
        total += kj
        out *= math.comb(total, kj)
    return out


def b_coefficient(k: Sequence[int], coeffs: Sequence, exact: bool = False):
    """b_k = (-1)^K / K * K! / prod k_j! * prod a_j^k_j, K = ||k||.

    With ``exact=True`` and integer/Fraction coefficients the result is a
    Fraction.
    """
    total = sum(k)
    if total < 1:
        raise ValueError("multi-index must have ||k|| >= 1")
    sign = -1 if total % 2 else 1
    if exact:
        value = Fraction(sign * multinomial(k), total)
    else:
        value = sign * multinomial(k) / total
    for kj, aj in zip(k, coeffs):
        if kj:
            value = value * aj ** kj
    return value


def enumerate_multi_indices(weights: Sequence, limit, budget: int = DEFAULT_ENTRY_BUDGET,
                            slack: float = 0.0):
    """All k >= 0, ||k|| >= 1, with sum_j weights_j k_j <= limit.

    Depth-first bounded knapsack over the weights from the largest down.
    Integer weights and limit give exact arithmetic.
    """
    n = len(weights)
    order = sorted(range(n), key=lambda j: weights[j], reverse=True)
    out = []
    counts = [0] * n

    def visit(pos, remaining):
        if pos == n:
            if any(counts):
                if len(out) >= budget:
                    raise ExplosionGuard("more than %d multi-indices below cutoff %r" % (budget, limit))
                out.append(tuple(counts))
            return
        j = order[pos]
        w = weights[j]
        kmax = int(math.floor((remaining + slack) / w)) if w > 0 else 0
        for kj in range(kmax + 1):
            counts[j] = kj
            visit(pos + 1, remaining - kj * w)
        counts[j] = 0

    visit(0, limit)
    return out


@dataclass(frozen=True)
class LogEntry:
    multi_index: tuple
    b: complex
    frequency: float
    lattice_key: Optional[int] = None

    def support(self):
        return {j: kj for j, kj in enumerate(self.multi_index) if kj}


@dataclass(frozen=True)
class LogExpansion:
    entries: tuple
    cutoff: float


def _frequency_of(series, k):
    if series.multipliers is not None:
        key = sum(m * kj for m, kj in zip(series.multipliers, k))
        return series.rational_base * key, key
    return math.fsum(lam * kj for lam, kj in zip(series.frequencies, k)), None


def log_expansion(series: DirichletSeries, T: float, budget: int = DEFAULT_ENTRY_BUDGET) -> LogExpansion:
    if not T > 0:
        raise ValueError("cutoff T must be positive")
    if series.multipliers is not None:
        limit = int(math.floor(T / series.rational_base * (1 + 1e-12)))
        indices = enumerate_multi_indices(series.multipliers, limit, budget)
    else:
        indices = enumerate_multi_indices(series.frequencies, T, budget, slack=1e-12 * max(1.0, T))
    entries = []
    for k in indices:
        freq, key = _frequency_of(series, k)
        entries.append(LogEntry(k, complex(b_coefficient(k, series.coefficients)), freq, key))
    entries.sort(key=lambda e: (e.frequency, e.multi_index))
    return LogExpansion(tuple(entries), float(T))


@dataclass(frozen=True)
class FrequencyAtom:
    frequency: float
    weight: complex
    contributing_count: int


def merge_atoms(entries) -> list:
    """Group log-expansion entries by frequency; weight = sum <lambda,k> b_k."""
    entries = sorted(entries, key=lambda e: (e.frequency, e.multi_index))
    groups = []
    for e in entries:
        if groups:
            head = groups[-1][0]
            if e.lattice_key is not None and head.lattice_key is not None:
                same = e.lattice_key == head.lattice_key
            else:
                same = abs(e.frequency - head.frequency) < MERGE_RTOL * max(1.0, head.frequency)
            if same:
                groups[-1].append(e)
                continue
        groups.append([e])
    atoms = []
    for g in groups:
        weight = csum([e.frequency * e.b for e in g])
        atoms.append(FrequencyAtom(g[0].frequency, weight, len(g)))
    return atoms


def atom_measure(series: DirichletSeries, T: float, budget: int = DEFAULT_ENTRY_BUDGET) -> list:
    return merge_atoms(log_expansion(series, T, budget).entries)


# -- functional equation ----------------------------------------------------

@dataclass(frozen=True)
class FunctionalEquationInfo:
    has_fe: bool
    mu: float
    c: Optional[int]
    axis_note: str
    sigma_star: Optional[float] = None


def detect_functional_equation(series: DirichletSeries, tol: float = 1e-9) -> FunctionalEquationInfo:
    """Finite-series functional-equation test.

    After translating s -> s + sigma* so that the last coefficient has
    modulus one, the extended sequences (0, lambda_1..lambda_N) and
    (1, a_1..a_N) must be symmetric about mu = lambda_N / 2 and
    palindromic up to a sign c.
    """
    lam = (0.0,) + series.frequencies
    a = (1 + 0j,) + series.coefficients
    n = series.size
    lam_n = lam[-1]
    mu = lam_n / 2
    for i in range(n + 1):
        if abs(lam[n - i] - (lam_n - lam[i])) > tol * max(1.0, lam_n):
            return FunctionalEquationInfo(False, mu, None, "frequencies not symmetric about mu")
    sigma_star = math.log(abs(a[-1])) / lam_n
    normed = [ai * math.exp(-li * sigma_star) for ai, li in zip(a, lam)]
    for c in (1, -1):
        if c == -1 and n % 2 == 0:
            break
        if all(abs(normed[n - i] - c * normed[i]) <= tol * max(1.0, abs(normed[i])) for i in range(n + 1)):
            note = "symmetric about Re s = %.12g" % sigma_star
            return FunctionalEquationInfo(True, mu, c, note, sigma_star)
    return FunctionalEquationInfo(False, mu, None, "coefficients not palindromic up to sign")
