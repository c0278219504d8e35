"""Test functions and the two pairings that realize both sides of the formula.

Fourier convention: phi_hat(x) = int phi(t) exp(-i x t) dt.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.hermite_e import hermeval
from numpy.polynomial.legendre import leggauss
from scipy.special import wofz

from .errors import CoverageGap, QuadratureStall, TailTooLarge
from .summation import csum

SQRT2 = math.sqrt(2.0)
SQRT_2PI = math.sqrt(2.0 * math.pi)
# gaussian effective support: phi < 1e-18 beyond center +- GAUSS_REACH * width
GAUSS_REACH = math.sqrt(2.0 * math.log(1e18))
_GL_NODES, _GL_WEIGHTS = leggauss(48)


@dataclass(frozen=True)
class TestFunction:
    kind: str
    center: float
    width: float

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        if self.kind not in ("gaussian", "bump"):
            raise ValueError("unknown test function kind %r" % self.kind)
        if not self.width > 0:
            raise ValueError("width must be positive")
        object.__setattr__(self, "center", float(self.center))
        object.__setattr__(self, "width", float(self.width))

    @classmethod
    def parse(cls, spec: str) -> "TestFunction":
        """Parse "gaussian:center=C,width=W" or "bump:center=C,width=W"."""
        try:
            kind, _, rest = spec.partition(":")
            params = dict(item.split("=", 1) for item in rest.split(",") if item)
            return cls(kind.strip(), float(params["center"]), float(params["width"]))
        except (KeyError, ValueError) as exc:
            raise ValueError("bad test-function spec %r: %s" % (spec, exc)) from None

    def spec(self):
        return "%s:center=%r,width=%r" % (self.kind, self.center, self.width)

    @property
    def support(self):
        reach = GAUSS_REACH * self.width if self.kind == "gaussian" else self.width
        return (self.center - reach, self.center + reach)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        u = (t - self.center) / self.width
        if self.kind == "gaussian":
            out = np.exp(-0.5 * u * u)
        else:
            inside = np.abs(u) < 1.0
            out = np.zeros_like(u)
            ui = u[inside]
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - ui * ui))
        return out if out.ndim else float(out)

    def derivative(self, order: int, t: float) -> float:
        if order == 0:
            return float(self(t))
        if self.kind == "gaussian":
            u = (t - self.center) / self.width
            coef = np.zeros(order + 1)
            coef[order] = 1.0
            return float((-1) ** order * hermeval(u, coef) * math.exp(-0.5 * u * u) / self.width ** order)
        return _richardson_derivative(self, order, t)

    def fourier_hat(self, z):
        """phi_hat at real or complex z (scalar or array)."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "gaussian":
            w, c = self.width, self.center
            return w * SQRT_2PI * np.exp(-1j * z * c - 0.5 * w * w * z * z)
        if z.size and not np.any(z.imag):
            return _bump_hat_real(self, z.real)
        # phi_hat(z) = int phi(t) e^{(-iz) t} dt
        return self.exp_integral(-1j * z, self.support[0], self.support[1])

    # -- integrals of phi(t) e^{zt} -------------------------------------

    def exp_integral(self, z, lo=None, hi=None, tol=1e-14):
        """int_lo^hi phi(t) exp(z t) dt for an array of complex z."""
        z = np.asarray(z, dtype=complex)
        slo, shi = self.support
        lo = slo if lo is None else max(lo, slo)
        hi = shi if hi is None else min(hi, shi)
        if hi <= lo:
            return np.zeros_like(z)
        if self.kind == "gaussian":
            return _gauss_exp_integral(self, z, lo, hi)
        return _bump_exp_integral(self, z, lo, hi, tol)

    def half_line_integral(self, z):
        """int_0^inf phi(t) exp(z t) dt."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "gaussian":
            return _gauss_half_line(self.center, self.width, z)
        return self.exp_integral(z, 0.0, None)

    def symmetric_integral(self, z):
        """int_R phi(t) exp(z |t|) dt = int_0^inf (phi(t) + phi(-t)) exp(z t) dt."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "gaussian":
            return _gauss_half_line(self.center, self.width, z) + _gauss_half_line(-self.center, self.width, z)
        lo, hi = self.support
        right = self.exp_integral(z, 0.0, None)
        # reflected part: int_{-inf}^0 phi(t) e^{-zt} dt
        left = self.exp_integral(-z, None, 0.0)
        return right + left

    def mass(self):
        return complex(self.fourier_hat(0.0))


def _gauss_half_line(c, w, z):
    """int_0^inf exp(-(t-c)^2 / 2w^2) exp(z t) dt via the Faddeeva function."""
    zeta = -1j * (c + w * w * z) / (w * SQRT2)
    pref = w * math.sqrt(math.pi / 2.0)
    out = np.empty_like(zeta)
    upper = zeta.imag >= 0
    out[upper] = pref * math.exp(-c * c / (2 * w * w)) * wofz(zeta[upper])
    if np.any(~upper):
        # w(zeta) = 2 exp(-zeta^2) - w(-zeta): full line minus the negative half line
        zl = z[~upper]
        full = w * SQRT_2PI * np.exp(zl * c + 0.5 * w * w * zl * zl)
        out[~upper] = full - pref * math.exp(-c * c / (2 * w * w)) * wofz(-zeta[~upper])
    return out


def _gauss_exp_integral(phi, z, lo, hi):
    # closed forms cover the whole line and half lines split at 0
    slo, shi = phi.support
    c, w = phi.center, phi.width
    if lo <= slo and hi >= shi:
        return w * SQRT_2PI * np.exp(z * c + 0.5 * w * w * z * z)
    if lo == 0.0 and hi >= shi:
        return _gauss_half_line(c, w, z)
    if hi == 0.0 and lo <= slo:
        # int_{-inf}^0 phi(t) e^{zt} dt = int_0^inf phi(-t) e^{-zt} dt
        return _gauss_half_line(-c, w, -z)
    return _panel_quadrature(phi, z, lo, hi, 1e-14)


def _bump_exp_integral(phi, z, lo, hi, tol):
    slo, shi = phi.support
    if lo <= slo and hi >= shi:
        return _trapezoid(phi, z, tol)
    return _panel_quadrature(phi, z, lo, hi, tol)


def _bump_hat_real(phi, x):
    """phi_hat on the real axis by a trapezoid rule sized from the aliasing bound.

    The rule with spacing h returns sum_k phi_hat(x + 2 pi k / h); the bump
    transform decays like exp(-sqrt(2 width |y|)), so images beyond
    |y| = 1800 / width sit below 1e-18 of the peak.
    """
    lo, hi = phi.support
    xmax = float(np.max(np.abs(x)))
    m = int(math.ceil((hi - lo) * (xmax + 1800.0 / phi.width) / (2 * math.pi))) + 64
    m = 1 << (m - 1).bit_length()
    t = np.linspace(lo, hi, m + 1)[1:-1]
    wts = phi(t) * ((hi - lo) / m)
    # nodes measured from the center keep the phase x u small and accurate
    x = np.asarray(x, dtype=float)
    return np.exp(-1j * x * phi.center) * _chunked(-1j * x.astype(complex), t - phi.center, wts)


def _chunked(z, nodes, weights):
    """sum_j weights_j exp(z nodes_j) for each z, in row chunks to bound memory."""
    out = np.empty(z.shape, dtype=complex)
    flat = z.ravel()
    res = out.ravel()
    step = max(1, 2_000_000 // max(1, nodes.size))
    for i in range(0, flat.size, step):
        res[i:i + step] = np.exp(np.multiply.outer(flat[i:i + step], nodes)) @ weights
    return res.reshape(z.shape)


def _scale_of(phi, z, lo, hi):
    # size of the integrand envelope, for relative stopping
    return (hi - lo) * np.exp(np.maximum(z.real * lo, z.real * hi))


def _trapezoid(phi, z, tol, m_max=2 ** 20):
    """Trapezoid rule over the full bump support; spectrally accurate."""
    lo, hi = phi.support
    zmax = float(np.max(np.abs(z.imag))) if z.size else 0.0
    m = max(64, int(4 * (hi - lo) * zmax / math.pi))
    m = 1 << (m - 1).bit_length()
    prev = None
    while m <= m_max:
        t = np.linspace(lo, hi, m + 1)[1:-1]
        wts = phi(t) * ((hi - lo) / m)
        val = _chunked(z, t, wts)
        if prev is not None:
            err = np.abs(val - prev)
            if np.all(err <= tol * np.maximum(1.0, _scale_of(phi, z, lo, hi))):
                return val
        prev = val
        m *= 2
    raise QuadratureStall("bump quadrature did not converge")


def _panel_quadrature(phi, z, lo, hi, tol, max_panels=2 ** 14):
    """Composite Gauss-Legendre with panel doubling."""
    zmax = float(np.max(np.abs(z.imag))) if z.size else 0.0
    panels = max(2, int((hi - lo) * zmax / (2 * math.pi)) + 1)
    prev = None
    while panels <= max_panels:
        edges = np.linspace(lo, hi, panels + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        t = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
        wts = (half[:, None] * _GL_WEIGHTS[None, :]).ravel() * phi(t)
        val = _chunked(z, t, wts)
        if prev is not None:
            err = np.abs(val - prev)
            if np.all(err <= tol * np.maximum(1.0, _scale_of(phi, z, lo, hi))):
                return val
        prev = val
        panels *= 2
    raise QuadratureStall("panel quadrature did not converge on [%g, %g]" % (lo, hi))


def _richardson_derivative(phi, order, t, tol=1e-9):
    """Central differences with a halving step cascade until two agreements."""
    coeffs = {1: ([1, -1], [1, -1]), 2: ([1, -2, 1], [1, 0, -1])}
    if order not in coeffs:
        raise NotImplementedError("bump derivatives are provided up to order 2")

    def central(h):
        if order == 1:
            return (phi(t + h) - phi(t - h)) / (2 * h)
        return (phi(t + h) - 2 * phi(t) + phi(t - h)) / (h * h)

    h = 1e-2 * phi.width
    prev = None
    agreements = 0
    while h > 1e-6 * phi.width:
        # one Richardson step removes the h^2 term
        d = (4 * central(h / 2) - central(h)) / 3
        if prev is not None and abs(d - prev) <= tol * max(1.0, abs(d)):
            agreements += 1
            if agreements == 2:
                return float(d)
        else:
            agreements = 0
        prev = d
        h /= 2
    return float(prev)


# -- pairings ---------------------------------------------------------------

@dataclass(frozen=True)
class PairingResult:
    value: complex
    truncation: dict
    tail_estimate: float

    def to_dict(self):
        return {"value": [self.value.real, self.value.imag], "truncation": dict(self.truncation),
                "tail_estimate": self.tail_estimate}


def _ordered(points):
    """Ascending |Im rho|, conjugate partners adjacent."""
    return sorted(points, key=lambda p: (abs(p[0].imag), p[0].imag, p[0].real))


def divisor_pairing(divisor, phi: TestFunction, beta: float = 0.0, symmetric: bool = False,
                    tol: float = None) -> PairingResult:
    """sum_rho n_rho int phi(t) exp((rho - beta) t) dt over t > 0, or with |t| when symmetric."""
    pts = _ordered(divisor.points)
    if not symmetric and phi.support[0] <= 0.0:
        raise ValueError("one-sided pairing needs supp phi inside (0, inf); got %r" % (phi.support,))
    if not pts:
        return PairingResult(0j, {"H": divisor.height}, 0.0)
    rho = np.array([p[0] for p in pts])
    mult = np.array([p[1] for p in pts], dtype=float)
    z = rho - beta
    vals = phi.symmetric_integral(z) if symmetric else phi.half_line_integral(z)
    contrib = mult * vals
    value = csum(contrib)
    # the last octave of heights bounds what the next doubling can add
    key = np.abs(rho.imag)
    kmax = key.max()
    last = csum(contrib[key > kmax / 2]) if kmax > 0 else 0j
    tail = abs(last) + 8 * np.finfo(float).eps * float(np.sum(np.abs(contrib)))
    if tol is not None and tail > tol:
        raise TailTooLarge("divisor pairing tail %.3g exceeds %.3g; raise H" % (tail, tol))
    return PairingResult(value, {"H": divisor.height, "points": len(pts)}, float(tail))


def atom_pairing(atoms, phi: TestFunction, beta: float = 0.0, symmetric: bool = False,
                 cutoff: float = None) -> PairingResult:
    """sum_atoms weight exp(-freq beta) (phi(freq) [+ phi(-freq)])."""
    lo, hi = phi.support
    reach = max(abs(lo), abs(hi)) if symmetric else hi
    if cutoff is not None and reach > cutoff:
        raise CoverageGap("test function reaches %.6g but atoms stop at %.6g" % (reach, cutoff))
    if not atoms:
        return PairingResult(0j, {"T": cutoff}, 0.0)
    freq = np.array([a.frequency for a in atoms])
    weight = np.array([a.weight for a in atoms])
    vals = phi(freq) + (phi(-freq) if symmetric else 0.0)
    contrib = weight * np.exp(-freq * beta) * vals
    return PairingResult(csum(contrib), {"T": cutoff, "atoms": len(atoms)}, 0.0)


def delta_zero_terms(c0: complex, phi: TestFunction, derivatives=()) -> complex:
    """2 sum_l c_{2l} phi^{(2l)}(0); ``derivatives`` holds c_2, c_4, ... when present."""
    total = 2 * complex(c0) * phi.derivative(0, 0.0)
    for l, c in enumerate(derivatives, start=1):
        total += 2 * complex(c) * phi.derivative(2 * l, 0.0)
    return total
