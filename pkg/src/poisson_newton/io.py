"""File formats: series and Selberg instances as JSON, divisors as JSON or CSV, atoms as CSV.

Floats are written with ``repr`` so a dump read back reproduces the exact
binary values.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

from .divisor import Divisor, Rectangle
from .errors import FormatError, SeriesSpecError
from .series import DirichletSeries

WINDOW_KEYS = ("re_min", "re_max", "im_min", "im_max")


def _load_json(path):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError("%s: invalid JSON at line %d: %s" % (path, exc.lineno, exc.msg)) from None


def _real(value, field_name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SeriesSpecError("%s: expected a number, got %r" % (field_name, value))
    value = float(value)
    if not math.isfinite(value):
        raise SeriesSpecError("%s: must be finite" % field_name)
    return value


def _complex(value, field_name):
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise SeriesSpecError("%s: expected [re, im], got %r" % (field_name, value))
        return complex(_real(value[0], field_name), _real(value[1], field_name))
    return complex(_real(value, field_name), 0.0)


# -- series -----------------------------------------------------------------------

def series_from_dict(data) -> DirichletSeries:
    """Series from {"frequencies", "coefficients", optional "rational_base", "multipliers"}."""
    if not isinstance(data, dict):
        raise SeriesSpecError("series: expected a JSON object")
    for key in ("frequencies", "coefficients"):
        if key not in data:
            raise SeriesSpecError("%s: missing" % key)
        if not isinstance(data[key], list):
            raise SeriesSpecError("%s: expected a list" % key)
    freqs = [_real(v, "frequencies[%d]" % i) for i, v in enumerate(data["frequencies"])]
    coeffs = [_complex(v, "coefficients[%d]" % i) for i, v in enumerate(data["coefficients"])]
    base = data.get("rational_base")
    if base is not None:
        base = _real(base, "rational_base")
    mults = data.get("multipliers")
    if mults is not None:
        if not isinstance(mults, list) or not all(isinstance(m, int) and not isinstance(m, bool) for m in mults):
            raise SeriesSpecError("multipliers: expected a list of integers")
    return DirichletSeries(tuple(freqs), tuple(coeffs), base, None if mults is None else tuple(mults))


def series_to_dict(series: DirichletSeries) -> dict:
    out = {"frequencies": list(series.frequencies),
           "coefficients": [[c.real, c.imag] for c in series.coefficients]}
    if series.rational_base is not None:
        out["rational_base"] = series.rational_base
        out["multipliers"] = list(series.multipliers)
    return out


def load_series(path) -> DirichletSeries:
    return series_from_dict(_load_json(path))


def dump_series(series: DirichletSeries, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(series_to_dict(series), fh, indent=2)


# -- divisors -----------------------------------------------------------------

def divisor_to_dict(divisor: Divisor) -> dict:
    w = divisor.window
    return {"window": {k: getattr(w, k) for k in WINDOW_KEYS},
            "points": [{"re": r.real, "im": r.imag, "mult": m} for r, m in divisor.points]}


def divisor_from_dict(data) -> Divisor:
    if not isinstance(data, dict) or not isinstance(data.get("points"), list):
        raise FormatError("divisor: expected an object with a 'points' list")
    points = []
    for i, p in enumerate(data["points"]):
        try:
            points.append((complex(float(p["re"]), float(p["im"])), int(p["mult"])))
        except (KeyError, TypeError, ValueError):
            raise FormatError("points[%d]: expected {re, im, mult}" % i) from None
    window = data.get("window")
    if window is not None:
        try:
            window = Rectangle(*(float(window[k]) for k in WINDOW_KEYS))
        except (KeyError, TypeError, ValueError):
            raise FormatError("window: expected %s" % ", ".join(WINDOW_KEYS)) from None
    return Divisor.from_points(points, window)


def load_divisor_json(path) -> Divisor:
    return divisor_from_dict(_load_json(path))


def dump_divisor_json(divisor: Divisor, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(divisor_to_dict(divisor), fh, indent=2)


def write_divisor_csv(divisor: Divisor, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(("re", "im", "mult"))
    for r, m in divisor.points:
        w.writerow((repr(r.real), repr(r.imag), m))


def read_divisor_csv(fh, window=None) -> Divisor:
    rows = csv.reader(fh)
    header = next(rows, None)
    if header is None or [h.strip() for h in header] != ["re", "im", "mult"]:
        raise FormatError("line 1: expected header re,im,mult")
    points = []
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        try:
            re_, im_, mult = row
            points.append((complex(float(re_), float(im_)), int(mult)))
        except ValueError:
            raise FormatError("line %d: expected re,im,mult, got %r" % (lineno, row)) from None
    return Divisor.from_points(points, window)


# -- atoms --------------------------------------------------------------------

def write_atoms_csv(atoms, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(("frequency", "weight_re", "weight_im"))
    for a in atoms:
        w.writerow((repr(a.frequency), repr(a.weight.real), repr(a.weight.imag)))


# -- Selberg instances ------------------------------------------------------------

@dataclass(frozen=True)
class SelbergInstance:
    genus: int
    eigen_gammas: tuple
    lengths: tuple


def load_selberg(path) -> SelbergInstance:
    """Instance from {"genus": h, "eigen_gammas": [...], "lengths": [...]}."""
    data = _load_json(path)
    if not isinstance(data, dict):
        raise FormatError("selberg: expected a JSON object")
    genus = data.get("genus")
    if isinstance(genus, bool) or not isinstance(genus, int) or genus < 2:
        raise FormatError("genus: expected an integer >= 2, got %r" % (genus,))
    out = {}
    for key in ("eigen_gammas", "lengths"):
        vals = data.get(key)
        if not isinstance(vals, list):
            raise FormatError("%s: expected a list" % key)
        try:
            out[key] = tuple(float(v) for v in vals)
        except (TypeError, ValueError):
            raise FormatError("%s: expected numbers" % key) from None
    if any(not v > 0 for v in out["lengths"]):
        raise FormatError("lengths: must be positive")
    return SelbergInstance(genus, out["eigen_gammas"], out["lengths"])


def dump_selberg(instance: SelbergInstance, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"genus": instance.genus, "eigen_gammas": list(instance.eigen_gammas),
                   "lengths": list(instance.lengths)}, fh, indent=2)
