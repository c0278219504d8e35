"""Zeros of finite Dirichlet series and the constant term of the discrepancy polynomial.

A finite series is entire, so its divisor is a set of zeros confined to a
vertical strip.  Zeros are counted with the argument principle on
rectangles, isolated by subdivision and polished by damped Newton steps.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import ContourTooClose, NonIntegerWinding, RefinementStall, TailTooLarge
from .series import DirichletSeries, evaluate, log_derivative
from .summation import csum, worker_count

# deterministic dilation factors used when a contour passes too close to a zero
DILATIONS = (1.0, 1 + 1e-3, 1 + 2.3e-3, 1 + 4.1e-3, 1 + 6.7e-3, 1 + 1.03e-2, 1 + 1.51e-2)
# split positions tried in order when subdividing a cell
SPLIT_FRACTIONS = (0.5137, 0.4621, 0.5583, 0.4179, 0.6011, 0.3737, 0.6452, 0.3301)


@dataclass(frozen=True)
class Rectangle:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("degenerate rectangle %r" % (self,))

    @property
    def width(self):
        return self.re_max - self.re_min

    @property
    def height(self):
        return self.im_max - self.im_min

    @property
    def diameter(self):
        return math.hypot(self.width, self.height)

    @property
    def center(self):
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    def contains(self, z, pad=0.0):
        return (self.re_min - pad <= z.real <= self.re_max + pad
                and self.im_min - pad <= z.imag <= self.im_max + pad)

    def dilate(self, factor):
        c = self.center
        hw, hh = 0.5 * self.width * factor, 0.5 * self.height * factor
        return Rectangle(c.real - hw, c.real + hw, c.imag - hh, c.imag + hh)

    def corners(self):
        return (complex(self.re_min, self.im_min), complex(self.re_max, self.im_min),
                complex(self.re_max, self.im_max), complex(self.re_min, self.im_max))


@dataclass(frozen=True)
class Divisor:
    points: tuple  # of (rho, multiplicity)
    window: Rectangle
    residual_bound: float = 0.0

    def __post_init__(self):
        pts = tuple((complex(r), int(m)) for r, m in self.points)
        if any(m == 0 for _, m in pts):
            raise ValueError("multiplicities must be nonzero")
        object.__setattr__(self, "points", tuple(sorted(pts, key=lambda p: (p[0].imag, p[0].real))))

    @classmethod
    def from_points(cls, points, window=None, residual_bound=0.0):
        """Divisor from (rho, mult) pairs; the window defaults to the padded bounding box."""
        pts = [(complex(r), int(m)) for r, m in points]
        if window is None:
            re = [r.real for r, _ in pts] or [0.0]
            h = max([abs(r.imag) for r, _ in pts] or [0.0])
            window = Rectangle(min(re) - 1.0, max(re) + 1.0, -h - 1.0, h + 1.0)
        return cls(tuple(pts), window, residual_bound)

    @property
    def total_multiplicity(self):
        return sum(m for _, m in self.points)

    @property
    def height(self):
        return max(abs(self.window.im_min), abs(self.window.im_max))

    @property
    def sigma_1(self):
        return max(r.real for r, _ in self.points) if self.points else -math.inf

    def __add__(self, other):
        merged = {}
        for r, m in self.points + other.points:
            merged[r] = merged.get(r, 0) + m
        w = Rectangle(min(self.window.re_min, other.window.re_min), max(self.window.re_max, other.window.re_max),
                      min(self.window.im_min, other.window.im_min), max(self.window.im_max, other.window.im_max))
        return Divisor(tuple((r, m) for r, m in merged.items() if m), w,
                       max(self.residual_bound, other.residual_bound))

    def truncate(self, H):
        """Points with |Im rho| <= H."""
        w = self.window
        w = Rectangle(w.re_min, w.re_max, max(w.im_min, -H), min(w.im_max, H))
        return Divisor(tuple(p for p in self.points if abs(p[0].imag) <= H), w, self.residual_bound)


# -- argument principle -----------------------------------------------------

def _edge_points(rect, n):
    """Closed contour sampled with n intervals per edge; returns points and edge weights."""
    cs = rect.corners()
    pts, wts = [], []
    u = np.linspace(0.0, 1.0, n + 1)
    w = np.full(n + 1, 1.0 / n)
    w[0] = w[-1] = 0.5 / n
    for a, b in zip(cs, cs[1:] + cs[:1]):
        pts.append(a + (b - a) * u)
        wts.append((b - a) * w)
    return np.concatenate(pts), np.concatenate(wts)


def _check_clearance(series, a, b, clearance, samples):
    """Raise ContourTooClose if a zero seems to lie within ``clearance`` of segment [a, b]."""
    s = a + (b - a) * np.linspace(0.0, 1.0, samples)
    f, df = series.values(s)
    with np.errstate(divide="ignore", invalid="ignore"):
        dist = np.abs(f) / np.abs(df)
    tiny = np.abs(f) <= 1e-14 * series.scale(s)
    if np.any(tiny) or np.nanmin(dist) < clearance:
        raise ContourTooClose("zero within %.3g of segment %r-%r" % (clearance, a, b))


def _winding(series, rect, n_start=None, n_max=2 ** 18):
    """(count, first moment) of zeros in rect by trapezoid rule on f'/f."""
    lam_max = series.frequencies[-1]
    longest = max(rect.width, rect.height)
    n = n_start or max(32, int(8 * longest * lam_max / (2 * math.pi)) + 1)
    n = 1 << max(5, (n - 1).bit_length())
    prev = None
    while n <= n_max:
        s, w = _edge_points(rect, n)
        f, df = series.values(s)
        g = df / f
        total = complex(np.sum(g * w)) / (2j * math.pi)
        moment = complex(np.sum(s * g * w)) / (2j * math.pi)
        val = total.real
        ok = abs(val - round(val)) < 0.25 and abs(total.imag) < 0.25
        if ok and prev is not None and round(prev) == round(val) and abs(val - prev) < 0.25:
            return int(round(val)), moment
        prev = val if ok else None
        n *= 2
    raise NonIntegerWinding("winding number did not settle on %r" % (rect,))


def count_zeros(series: DirichletSeries, rect: Rectangle, clearance_frac: float = 1e-2) -> int:
    """Number of zeros (with multiplicity) inside rect; dilates rect if a zero sits on it."""
    last = None
    for factor in DILATIONS:
        r = rect.dilate(factor) if factor != 1.0 else rect
        try:
            _guard_rect(series, r, clearance_frac)
        except ContourTooClose as exc:
            last = exc
            continue
        return _winding(series, r)[0]
    raise ContourTooClose("no clear contour near %r (%s)" % (rect, last))


def _guard_rect(series, rect, clearance_frac):
    clearance = clearance_frac * min(rect.width, rect.height)
    cs = rect.corners()
    for a, b in zip(cs, cs[1:] + cs[:1]):
        samples = min(200_000, max(64, int(4 * abs(b - a) / clearance)))
        _check_clearance(series, a, b, clearance, samples)


# -- strip bounds -----------------------------------------------------------

def strip_bounds(series: DirichletSeries):
    """(x_left, x_right) such that every zero has x_left <= Re rho <= x_right.

    Right: sum |a_n| e^{-lambda_n x} < 1 forbids zeros.  Left: the last term
    dominates all others once |a_N| e^{-lambda_N x} > 1 + sum_{n<N} |a_n| e^{-lambda_n x}.
    """
    lam = np.asarray(series.frequencies)
    mod = np.abs(series.coefficients)

    def right(x):
        return float(np.sum(mod * np.exp(-lam * x))) - 1.0

    def left(x):
        # multiplied through by e^{lambda_N x}; increasing in x
        return math.exp(lam[-1] * x) + float(np.sum(mod[:-1] * np.exp((lam[-1] - lam[:-1]) * x))) - mod[-1]

    def bracket(fn, lo, hi):
        while fn(lo) * fn(hi) > 0:
            lo, hi = lo - 2 * (hi - lo), hi + 2 * (hi - lo)
        return brentq(fn, lo, hi, xtol=1e-14, rtol=1e-14)

    x_r = bracket(right, -1.0, 1.0)
    x_l = bracket(left, -1.0, 1.0)
    return min(x_l, x_r), x_r


# -- refinement -------------------------------------------------------------

def evaluation_floor(series, z):
    """Relative size of rounding in f(z): exp(-lambda z) carries a phase error ~ eps lambda |z|."""
    return 4 * np.finfo(float).eps * max(1.0, series.frequencies[-1] * abs(complex(z)))


def newton_refine(series, z0, multiplicity=1, max_iter=100, rtol=1e-12):
    """Damped Newton on f; the target residual never drops below the evaluation floor."""
    z = complex(z0)
    f, df = series.values(np.array([z]))
    f, df = complex(f[0]), complex(df[0])
    for _ in range(max_iter):
        scale = float(series.scale(z))
        if abs(f) < max(rtol * 1e-2, evaluation_floor(series, z)) * scale:
            return z
        if df == 0:
            raise RefinementStall("vanishing derivative at %r" % z)
        step = multiplicity * f / df
        t = 1.0
        for _ in range(40):
            zn = z - t * step
            fn_, dfn = series.values(np.array([zn]))
            fn_, dfn = complex(fn_[0]), complex(dfn[0])
            if abs(fn_) < abs(f) or abs(t * step) < 1e-15 * (1 + abs(z)):
                break
            t *= 0.5
        else:
            break
        moved = abs(zn - z)
        z, f, df = zn, fn_, dfn
        if moved < 4e-16 * (1 + abs(z)):
            break
    if abs(f) < max(rtol, evaluation_floor(series, z)) * float(series.scale(z)):
        return z
    raise RefinementStall("Newton did not converge from %r (|f| = %.3g)" % (z0, abs(f)))


def _split(series, rect, clearance_frac):
    """Split rect across its longer side along a line clear of zeros."""
    vertical_cut = rect.width >= rect.height
    for frac in SPLIT_FRACTIONS:
        if vertical_cut:
            x = rect.re_min + frac * rect.width
            a, b = complex(x, rect.im_min), complex(x, rect.im_max)
            parts = (Rectangle(rect.re_min, x, rect.im_min, rect.im_max),
                     Rectangle(x, rect.re_max, rect.im_min, rect.im_max))
        else:
            y = rect.im_min + frac * rect.height
            a, b = complex(rect.re_min, y), complex(rect.re_max, y)
            parts = (Rectangle(rect.re_min, rect.re_max, rect.im_min, y),
                     Rectangle(rect.re_min, rect.re_max, y, rect.im_max))
        clearance = 0.5 * clearance_frac * min(rect.width, rect.height)
        try:
            _check_clearance(series, a, b, clearance, max(64, int(4 * abs(b - a) / clearance)))
        except ContourTooClose:
            continue
        return parts
    raise ContourTooClose("could not find a clear split line in %r" % (rect,))


def _isolate(series, rect, count, moment, clearance_frac, min_cell, depth=0):
    """Zeros in a cell already known to hold ``count`` of them."""
    if count == 0:
        return []
    if count == 1 or rect.diameter < min_cell:
        guess = moment / count
        if not rect.contains(guess):
            guess = rect.center
        try:
            z = newton_refine(series, guess, multiplicity=count)
        except RefinementStall:
            z = None
        if z is not None and rect.contains(z, pad=1e-9 * (1 + abs(z))):
            return [(z, count)]
        if rect.diameter < min_cell:
            raise RefinementStall("cluster of %d zeros in %r did not refine" % (count, rect))
    if depth > 200:
        raise RefinementStall("subdivision too deep at %r" % (rect,))
    out = []
    parts = _split(series, rect, clearance_frac)
    results = [_winding(series, p) for p in parts]
    if sum(c for c, _ in results) != count:
        raise NonIntegerWinding("child counts %r do not add up to %d in %r"
                                % ([c for c, _ in results], count, rect))
    for p, (c, m) in zip(parts, results):
        out.extend(_isolate(series, p, c, m, clearance_frac, min_cell, depth + 1))
    return out


def _clear_height(series, x0, x1, y, direction, clearance):
    """Shift a horizontal line at height y until it is clear of zeros."""
    step = clearance * 3
    for i in range(64):
        yy = y + direction * i * step
        try:
            _check_clearance(series, complex(x0, yy), complex(x1, yy), clearance,
                             max(64, int(4 * (x1 - x0) / clearance)))
            return yy
        except ContourTooClose:
            continue
    raise ContourTooClose("no clear horizontal line near Im s = %g" % y)


def locate_divisor(series: DirichletSeries, H: float, margin: Optional[float] = None,
                   clearance_frac: float = 1e-2, min_cell: float = 1e-6) -> Divisor:
    """All zeros with |Im rho| <= H (the top and bottom edges may move outward slightly)."""
    if not H > 0:
        raise ValueError("height H must be positive")
    x_l, x_r = strip_bounds(series)
    width = x_r - x_l
    if margin is None:
        margin = max(0.25, 0.05 * width)
    x0, x1 = x_l - margin, x_r + margin
    slab = math.pi / series.frequencies[-1]
    clearance = clearance_frac * min(slab, x1 - x0)
    lo = _clear_height(series, x0, x1, -H, -1, clearance)
    hi = _clear_height(series, x0, x1, H, +1, clearance)
    nslab = max(1, int(math.ceil((hi - lo) / slab)))
    cuts = [lo]
    for j in range(1, nslab):
        cuts.append(_clear_height(series, x0, x1, lo + j * (hi - lo) / nslab, +1, clearance))
    cuts.append(hi)
    cells = [Rectangle(x0, x1, a, b) for a, b in zip(cuts, cuts[1:]) if b > a]

    def work(cell):
        c, m = _winding(series, cell)
        return _isolate(series, cell, c, m, clearance_frac, min_cell)

    nw = worker_count()
    if nw > 1:
        with ThreadPoolExecutor(nw) as pool:
            found = [p for chunk in pool.map(work, cells) for p in chunk]
    else:
        found = [p for cell in cells for p in work(cell)]
    residual = 0.0
    for z, _ in found:
        residual = max(residual, abs(evaluate(series, z)) / float(series.scale(z)))
    return Divisor(tuple(found), Rectangle(x0, x1, lo, hi), residual)


# -- discrepancy constant ---------------------------------------------------

@dataclass(frozen=True)
class DiscrepancyConstant:
    sigma: complex
    c0: complex
    d: int
    truncation_height: float
    tail_estimate: float
    raw_c0: complex = 0j
    s0: complex = 0j


def extrapolated_sum(keys, terms):
    """Sum with a 1/K tail correction measured from the last decade.

    If partial sums behave like S - C/K, then S(K) - S(K/10) = 9 C / K.
    Returns (extrapolated value, |correction|, raw partial sum).
    """
    keys = np.asarray(keys, dtype=float)
    terms = np.asarray(terms, dtype=complex)
    if terms.size == 0:
        return 0j, 0.0, 0j
    kmax = float(np.max(keys))
    full = csum(terms)
    head = csum(terms[keys <= kmax / 10])
    corr = (full - head) / 9
    return full + corr, abs(corr), full


def _near(z, w, tol=1e-9):
    return abs(z - w) <= tol * (1 + abs(w))


def discrepancy_c0(series: DirichletSeries, divisor: Divisor, sigma: complex = 0j,
                   s0: Optional[complex] = None, d: int = 2, tol: Optional[float] = None) -> DiscrepancyConstant:
    """c_0(sigma) = G(s0) - f'(s0)/f(s0) for genus one, with a measured 1/H tail."""
    sigma = complex(sigma)
    if s0 is None:
        s0 = complex(max(divisor.sigma_1, sigma.real) + 1.0, 0.0)
    s0 = complex(s0)
    n_sigma = 0
    keys, terms = [], []
    for rho, n in divisor.points:
        if _near(rho, sigma):
            n_sigma += n
            continue
        keys.append(abs(rho))
        terms.append(n * ((s0 - sigma) / (rho - sigma)) ** (d - 1) / (s0 - rho))
    tail_sum, tail, raw = extrapolated_sum(keys, terms)
    head = (n_sigma / (s0 - sigma) if n_sigma else 0j) - log_derivative(series, s0)
    out = DiscrepancyConstant(sigma, head + tail_sum, d, divisor.height, tail, head + raw, s0)
    if tol is not None and tail > tol:
        raise TailTooLarge("c0 tail %.3g exceeds %.3g; raise the divisor height" % (tail, tol))
    return out


def structure_at_zero(divisor: Divisor, sigma: complex = 0j, extrapolate: bool = True):
    """lim sum_{rho != sigma} n_rho / (rho - sigma) under symmetric truncation.

    This is the delta_0 weight that separates the Newton-Cramer distribution
    W_sigma from the naive exponential sum on each side of 0.  With
    ``extrapolate=False`` the plain truncated sum is returned, which is what
    must be added term by term to an equally truncated exponential sum.
    """
    sigma = complex(sigma)
    keys, terms = [], []
    for rho, n in divisor.points:
        if _near(rho, sigma):
            continue
        keys.append(abs(rho))
        terms.append(n / (rho - sigma))
    value, tail, raw = extrapolated_sum(keys, terms)
    return (value, tail) if extrapolate else (raw, tail)


def c0_shift(c0_at_0: complex, divisor: Divisor, sigma: complex, tol: Optional[float] = None):
    """c_0(sigma) from c_0(0) for convergence exponent 2.

    c_0(sigma) = c_0(0) - n_0/sigma - n_sigma/sigma + sum n_rho sigma / (rho (rho - sigma)),
    which is minus the Q' difference (c_0 is the constant of -Q').
    Returns (value, tail_estimate).
    """
    sigma = complex(sigma)
    if sigma == 0:
        return complex(c0_at_0), 0.0
    n_0 = n_sigma = 0
    keys, terms = [], []
    for rho, n in divisor.points:
        if _near(rho, 0j):
            n_0 += n
        elif _near(rho, sigma):
            n_sigma += n
        else:
            keys.append(abs(rho))
            terms.append(n * sigma / (rho * (rho - sigma)))
    total, tail, _ = extrapolated_sum(keys, terms)
    value = complex(c0_at_0) - n_0 / sigma - n_sigma / sigma + total
    if tol is not None and tail > tol:
        raise TailTooLarge("shift tail %.3g exceeds %.3g" % (tail, tol))
    return value, tail
