"""The Riemann zeta instance: primes, zero tables, digamma, and the explicit formula.

Zeta itself is never evaluated.  Its divisor enters through an ingested
table of ordinates gamma (zeros 1/2 + i gamma), and its frequency side is the
prime-power lattice k log p with b = -1/k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import CoverageGap, FormatError, OrderError, PoleError, QuadratureStall, TailTooLarge
from .series import FrequencyAtom
from .summation import csum, rsum
from .transforms import PairingResult, TestFunction

# 30+ significant digits; float() keeps the correctly rounded double
EULER_GAMMA = float("0.577215664901532860606512090082402431")
LOG_2 = float("0.693147180559945309417232121458176568")
LOG_PI = float("1.14472988584940017414342735135305871")
LOG_2PI = float("1.83787706640934548356065947281123527")
PI = float("3.14159265358979323846264338327950288")

C0_ZETA_0 = -LOG_2PI
FIRST_ZETA_ORDINATE = 14.134725141734693790

_BERNOULLI = [Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30), Fraction(5, 66),
              Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510), Fraction(43867, 798),
              Fraction(-174611, 330)]
# coefficients B_2k / (2k) of z^{-2k} in the digamma asymptotic series
_ASYMPTOTIC = np.array([float(b / (2 * (k + 1))) for k, b in enumerate(_BERNOULLI)])
_GL_NODES, _GL_WEIGHTS = leggauss(48)


# -- primes -------------------------------------------------------------------

@dataclass(frozen=True)
class PrimeTable:
    primes: np.ndarray
    limit: int

    def __len__(self):
        return int(self.primes.size)


def _small_sieve(n):
    mark = np.ones(n + 1, dtype=bool)
    mark[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if mark[p]:
            mark[p * p::p] = False
    return np.flatnonzero(mark)


def sieve_primes(X: int, segment: int = 1 << 18) -> PrimeTable:
    """All primes <= X, sieving fixed-size segments against the primes up to sqrt(X)."""
    X = int(X)
    if X < 2:
        raise ValueError("prime limit must be at least 2")
    base = _small_sieve(math.isqrt(X))
    chunks = []
    for lo in range(0, X + 1, segment):
        hi = min(lo + segment, X + 1)
        mark = np.ones(hi - lo, dtype=bool)
        if lo < 2:
            mark[:2 - lo] = False
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, -(-lo // p) * p)
            mark[start - lo::p] = False
        chunks.append(np.flatnonzero(mark) + lo)
    return PrimeTable(np.concatenate(chunks).astype(np.int64), X)


def prime_powers(primes: PrimeTable, reach: float):
    """(log p, k) for every prime power with k log p <= reach, ordered by frequency."""
    logp = np.log(primes.primes.astype(float))
    logs, ks = [], []
    k = 1
    while True:
        sel = logp[k * logp <= reach]
        if sel.size == 0:
            break
        logs.append(sel)
        ks.append(np.full(sel.size, k))
        k += 1
    if not logs:
        return np.empty(0), np.empty(0, dtype=int)
    logs, ks = np.concatenate(logs), np.concatenate(ks)
    order = np.argsort(ks * logs, kind="stable")
    return logs[order], ks[order]


def zeta_atoms(X: int, reach: float = None, primes: PrimeTable = None) -> list:
    """Frequency atoms of zeta: weight -log p at k log p (b = -1/k)."""
    primes = primes or sieve_primes(X)
    reach = math.log(primes.limit) if reach is None else reach
    logs, ks = prime_powers(primes, reach)
    return [FrequencyAtom(float(k * lp), -float(lp), 1) for lp, k in zip(logs, ks)]


# -- zero tables --------------------------------------------------------------

@dataclass(frozen=True)
class ZeroTable:
    gammas: np.ndarray
    source_path: str = ""

    @property
    def count(self):
        return int(self.gammas.size)

    def head(self, n):
        return ZeroTable(self.gammas[:n], self.source_path)


def parse_zero_lines(lines, source="<lines>") -> ZeroTable:
    values = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        try:
            g = float(text.split()[0])
        except ValueError:
            raise FormatError("%s line %d: not a number: %r" % (source, lineno, text)) from None
        if not (g > 0 and math.isfinite(g)):
            raise FormatError("%s line %d: ordinate must be positive and finite" % (source, lineno))
        if values and g < values[-1]:
            raise OrderError("%s line %d: %r follows %r" % (source, lineno, g, values[-1]))
        values.append(g)
    return ZeroTable(np.array(values, dtype=float), str(source))


def load_zeta_zeros(path) -> ZeroTable:
    """One ordinate per line, ascending; '#' lines are comments; repeats mean multiplicity."""
    path = Path(path)
    with path.open() as fh:
        return parse_zero_lines(fh, str(path))


# -- digamma and constants ----------------------------------------------------

def digamma(z):
    """psi(z) for complex z: upward recurrence to Re z >= 10, then the Bernoulli series."""
    arr = np.asarray(z, dtype=complex)
    flat = arr.ravel()
    near = np.abs(flat - np.round(flat.real)) < 1e-13 * np.maximum(1.0, np.abs(flat))
    if np.any(near & (np.round(flat.real) <= 0)):
        raise PoleError("digamma has a pole at non-positive integers")
    shifts = np.maximum(0, np.ceil(10.0 - flat.real)).astype(int)
    w = flat + shifts
    acc = np.zeros_like(flat)
    for k in range(int(shifts.max(initial=0))):
        live = shifts > k
        acc[live] += 1.0 / (flat[live] + k)
    inv2 = 1.0 / (w * w)
    series = np.zeros_like(flat)
    for c in _ASYMPTOTIC[::-1]:
        series = (series + c) * inv2
    out = np.log(w) - 0.5 / w - series - acc
    out = out.reshape(arr.shape)
    return complex(out) if out.ndim == 0 else out


def weil_psi(t):
    """-log pi + Re psi(1/4 + i t / 2)."""
    t = np.asarray(t, dtype=float)
    out = -LOG_PI + np.real(np.asarray(digamma(0.25 + 0.5j * t)))
    return float(out) if out.ndim == 0 else out


def _weil_psi_asymptotic(t):
    # -log pi + Re[log z - 1/(2z) - 1/(12 z^2)], z = 1/4 + it/2; error O(t^-4)
    z = 0.25 + 0.5j * np.asarray(t, dtype=float)
    return -LOG_PI + np.real(np.log(z) - 0.5 / z - 1.0 / (12.0 * z * z))


def c0_chi0(sigma: complex) -> complex:
    """Discrepancy constant of pi^{-s/2} Gamma(s/2) at sigma: log(pi)/2 - psi(sigma/2)/2."""
    sigma = complex(sigma)
    half = sigma / 2
    if abs(half - round(half.real)) < 1e-13 and round(half.real) <= 0:
        raise PoleError("sigma = %r lies on the trivial divisor -2N" % sigma)
    return 0.5 * LOG_PI - 0.5 * digamma(half)


def c0_zeta_half() -> float:
    """c0(zeta, 1/2) in the closed form -log(pi)/2 - pi/4 - gamma/2 - (3/2) log 2."""
    return -0.5 * LOG_PI - 0.25 * PI - 0.5 * EULER_GAMMA - 1.5 * LOG_2


def w0_remainder(t: float) -> float:
    """-e^{|t|/2} + e^{-3|t|/2} / (2 sinh |t|): pole plus trivial zeros of zeta at beta = 1/2."""
    a = abs(float(t))
    if a == 0:
        raise PoleError("the trivial-divisor sum is singular at t = 0")
    return -math.exp(0.5 * a) + math.exp(-1.5 * a) / (2.0 * math.sinh(a))


def w0_series(t: float, terms: int = 50) -> float:
    """Same quantity summed term by term: -e^{|t|/2} + e^{-|t|/2} sum_{n>=1} e^{-2n|t|}."""
    a = abs(float(t))
    if a == 0:
        raise PoleError("the trivial-divisor sum is singular at t = 0")
    return -math.exp(0.5 * a) + math.exp(-0.5 * a) * math.fsum(math.exp(-2 * n * a) for n in range(1, terms + 1))


# -- the three sides of the explicit formula ---------------------------------

def prime_side(phi: TestFunction, X: int, beta: float = 0.5, primes: PrimeTable = None,
               tol: float = 1e-12) -> complex:
    """sum over p <= X, k >= 1 of log p * p^{-k beta} * (phi(k log p) + phi(-k log p))."""
    primes = primes or sieve_primes(X)
    lo, hi = phi.support
    reach = max(abs(lo), abs(hi))
    log_x = math.log(primes.limit)
    if reach > log_x:
        # mass the table cannot see; bounded by the prime number theorem density
        missing = _prime_tail_bound(phi, beta, log_x, reach)
        if missing > tol:
            raise CoverageGap("phi reaches %.4g but log X = %.4g (missed mass ~%.3g)" % (reach, log_x, missing))
    logs, ks = prime_powers(primes, min(reach, log_x))
    freq = ks * logs
    vals = logs * np.exp(-beta * freq) * (phi(freq) + phi(-freq))
    return complex(rsum(vals))


def _prime_tail_bound(phi, beta, start, stop, n=4096):
    # prime powers have density ~ 1 in t = log(p^k) after weighting by log p, i.e. e^t dt
    t = np.linspace(start, stop, n)
    g = np.exp((1 - beta) * t) * (np.abs(phi(t)) + np.abs(phi(-t)))
    return float(np.trapezoid(g, t)) if hasattr(np, "trapezoid") else float(np.trapz(g, t))


def zero_side(zeros: ZeroTable, phi: TestFunction, tol: float = None) -> PairingResult:
    """sum over the table of phi_hat(gamma) + phi_hat(-gamma), with a density-based tail."""
    g = zeros.gammas
    if g.size:
        vals = phi.fourier_hat(g) + phi.fourier_hat(-g)
        value = csum(vals)
        start = float(g[-1])
        noise = 8 * np.finfo(float).eps * float(np.sum(np.abs(vals)))
    else:
        value, start, noise = 0j, FIRST_ZETA_ORDINATE, 0.0
    tail = _zero_tail(phi, start) + noise
    if tol is not None and tail > tol:
        raise TailTooLarge("zero-side tail %.3g exceeds %.3g; supply more zeros" % (tail, tol))
    return PairingResult(value, {"N": zeros.count}, float(tail))


def _zero_tail(phi, start, block=1024, x_max=1e7):
    """int_start^inf N'(x) (|phi_hat(x)| + |phi_hat(-x)|) dx with N'(x) = log(x / 2 pi) / 2 pi."""
    h = min(0.25, math.pi / (8 * (abs(phi.center) + phi.width + 1)))
    total = 0.0
    a = start
    while a < x_max:
        x = a + h * np.arange(block + 1)
        dens = np.log(np.maximum(x, 2 * math.pi) / (2 * math.pi)) / (2 * math.pi)
        y = dens * (np.abs(phi.fourier_hat(x)) + np.abs(phi.fourier_hat(-x)))
        part = float(h * (np.sum(y) - 0.5 * (y[0] + y[-1])))
        total += part
        if part <= 1e-6 * total or part < 1e-300:
            return total
        a = float(x[-1])
        h *= 2  # envelopes are monotone far out; coarsen geometrically
    return total


def pole_side(phi: TestFunction) -> complex:
    """phi_hat(i/2) + phi_hat(-i/2): the pole at 1 and the symmetric point 0 shifted to 1/2."""
    return complex(phi.fourier_hat(0.5j) + phi.fourier_hat(-0.5j))


def archimedean_side(phi: TestFunction, switch: float = 1e3, tol: float = 1e-15) -> complex:
    """(1/2 pi) int_R Psi(t) phi_hat(t) dt.

    Psi is even, so the integral folds onto (0, inf) against phi_hat(t) + phi_hat(-t).
    Beyond ``switch`` the logarithmic asymptotic of Psi replaces the digamma.
    """
    # 48 Gauss nodes per two oscillations of phi_hat is far beyond what is needed
    panel = min(8.0, 4 * math.pi / (abs(phi.center) + phi.width))
    total = 0j
    a = 0.0
    span = max(16.0, 16.0 / phi.width)
    # phase rounding in x t puts phi_hat's own noise near 1e-14 of its mass;
    # once a block is down there, further blocks add only noise
    floor = 1e-13 * abs(phi.mass())
    prev_peak = math.inf
    while a < 1e8:
        b = a + span
        part, size, peak = _psi_block(phi, a, b, panel, switch)
        total += part
        plateau = peak > 0.5 * prev_peak and peak < 1e-10 * abs(phi.mass())
        prev_peak = peak
        if size <= tol * max(1.0, abs(total)) or peak <= floor or plateau:
            return total / (2 * math.pi)
        a = b
        span *= 2
    raise QuadratureStall("Psi integral did not settle before t = 1e8")


def _psi_block(phi, a, b, panel, switch):
    n = max(1, int(math.ceil((b - a) / panel)))
    edges = np.linspace(a, b, n + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    psi = np.where(t <= switch, 0.0, _weil_psi_asymptotic(t))
    inner = t <= switch
    if np.any(inner):
        psi[inner] = weil_psi(t[inner])
    hat = phi.fourier_hat(t) + phi.fourier_hat(-t)
    integrand = psi * hat * w
    return csum(integrand), float(np.sum(np.abs(integrand))), float(np.max(np.abs(hat)))


@dataclass(frozen=True)
class ExplicitFormulaReport:
    zero_side: complex
    archimedean_side: complex
    prime_side: complex
    pole_side: complex
    residual: float
    truncations: dict = field(default_factory=dict)

    @property
    def scale(self):
        return max(abs(self.zero_side), abs(self.archimedean_side), abs(self.prime_side), abs(self.pole_side))

    @property
    def relative_residual(self):
        return self.residual / max(self.scale, 1e-300)

    def recomputed_residual(self):
        return abs(self.zero_side - (self.pole_side + self.archimedean_side - self.prime_side))

    def to_dict(self):
        pair = lambda z: [z.real, z.imag]
        return {"zero_side": pair(self.zero_side), "archimedean_side": pair(self.archimedean_side),
                "prime_side": pair(self.prime_side), "pole_side": pair(self.pole_side),
                "residual": self.residual, "relative_residual": self.relative_residual,
                "truncations": dict(self.truncations)}


def explicit_formula_check(phi: TestFunction, zeros: ZeroTable, X: int,
                           primes: PrimeTable = None) -> ExplicitFormulaReport:
    """sum_gamma phi_hat(gamma) against pole + Psi integral - prime powers (beta = 1/2)."""
    primes = primes or sieve_primes(X)
    zs = zero_side(zeros, phi)
    pole = pole_side(phi)
    arch = archimedean_side(phi)
    prime = prime_side(phi, X, 0.5, primes=primes, tol=math.inf)
    residual = abs(zs.value - (pole + arch - prime))
    return ExplicitFormulaReport(zs.value, arch, prime, pole, residual,
                                 {"N": zeros.count, "X": primes.limit, "zero_tail": zs.tail_estimate,
                                  "quadrature_tol": 1e-15})


# -- Selberg-type instances ---------------------------------------------------

def selberg_kernel(t):
    """cosh(t/2) / sinh(t/2)^2, the trivial-zero density for genus-h surfaces (times h - 1)."""
    t = np.asarray(t, dtype=float)
    return np.cosh(0.5 * t) / np.sinh(0.5 * t) ** 2


def selberg_remainder(h: int, phi: TestFunction, tol: float = 1e-14, panels: int = 8) -> float:
    """-(1/2)(h - 1) int cosh(t/2)/sinh(t/2)^2 phi(t) dt for phi vanishing near 0."""
    lo, hi = phi.support
    if lo <= 0.0 <= hi:
        raise ValueError("phi must be supported away from t = 0 for the remainder pairing")
    integral = _gl_integral(lambda t: selberg_kernel(t) * phi(t), lo, hi, tol, panels)
    return -0.5 * (h - 1) * integral


def _gl_integral(fn, lo, hi, tol, panels=8, max_panels=1 << 14):
    prev = None
    while panels <= max_panels:
        edges = np.linspace(lo, hi, panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        t = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
        w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
        val = rsum(fn(t) * w)
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        prev = val
        panels *= 2
    raise QuadratureStall("remainder quadrature did not converge on [%g, %g]" % (lo, hi))


def selberg_atom_sum(lengths, phi: TestFunction) -> float:
    """sum over primitive lengths tau and l != 0 of tau / (4 sinh(tau |l| / 2)) phi(tau l)."""
    lo, hi = phi.support
    reach = max(abs(lo), abs(hi))
    terms = []
    for tau in lengths:
        tau = float(tau)
        if not tau > 0:
            raise ValueError("lengths must be positive")
        for l in range(1, int(reach // tau) + 1):
            x = tau * l
            terms.append(tau / (4 * math.sinh(0.5 * x)) * (float(phi(x)) + float(phi(-x))))
    return math.fsum(terms)


def selberg_spectral_sum(gammas, phi: TestFunction) -> PairingResult:
    """(1/2) sum over +-gamma of phi_hat(gamma), the pairing of (1/2) sum e^{i gamma t}."""
    g = np.asarray(list(gammas), dtype=complex)
    if g.size == 0:
        return PairingResult(0j, {"N": 0}, 0.0)
    vals = 0.5 * (phi.fourier_hat(g) + phi.fourier_hat(-g))
    key = np.abs(g.real)
    last = csum(vals[key > key.max() / 2]) if key.max() > 0 else 0j
    tail = abs(last) + 8 * np.finfo(float).eps * float(np.sum(np.abs(vals)))
    return PairingResult(csum(vals), {"N": int(g.size)}, float(tail))
