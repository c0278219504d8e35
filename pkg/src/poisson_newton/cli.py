"""Command-line front end: one subcommand per scenario, JSON reports, CSV plot dumps.

Exit codes: 0 when every report passes, 1 on a tolerance failure, 2 on a usage
error, 3 on a data error (unreadable or malformed input, numerical breakdown).
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

from . import __version__
from .divisor import locate_divisor
from .errors import PoissonNewtonError
from .io import load_selberg, load_series, write_atoms_csv, write_divisor_csv
from .number_theory import load_zeta_zeros, sieve_primes
from .series import atom_measure, detect_functional_equation
from .transforms import TestFunction
from .verifier import (_jsonable, verify_classical_poisson, verify_explicit_formula,
                       verify_newton_identities, verify_poisson_newton, verify_selberg)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    scenario: str
    inputs: dict = field(default_factory=dict)
    H: Optional[float] = None
    T: Optional[float] = None
    N: Optional[int] = None
    X: Optional[int] = None
    test: Optional[str] = None
    tolerance: Optional[float] = None
    out: Optional[str] = None
    fmt: str = "json"

    def __post_init__(self):
        for name in ("H", "T", "N", "X"):
            v = getattr(self, name)
            if v is not None and not (v > 0 and math.isfinite(v)):
                raise UsageError("--%s must be positive, got %r" % (name, v))
        if self.tolerance is not None and not 0 < self.tolerance < 1:
            raise UsageError("--tol must lie in (0, 1), got %r" % self.tolerance)
        if self.fmt not in ("json",):
            raise UsageError("unsupported output format %r" % self.fmt)

    def test_function(self, default=None) -> TestFunction:
        spec = self.test or default
        if spec is None:
            raise UsageError("--test is required")
        try:
            return TestFunction.parse(spec)
        except ValueError as exc:
            raise UsageError(str(exc)) from None


def _build_parser():
    p = argparse.ArgumentParser(prog="pnf", description="Poisson-Newton formula checks for Dirichlet series.")
    p.add_argument("--version", action="version", version="%(prog)s " + __version__)
    p.add_argument("--threads", type=int, help="parallelism cap (overrides PNF_THREADS)")
    sub = p.add_subparsers(dest="scenario", required=True)

    def common(sp, tol=True):
        sp.add_argument("--out", help="write the JSON report here instead of stdout")
        if tol:
            sp.add_argument("--tol", type=float, help="relative pass threshold")

    sp = sub.add_parser("analyze", help="locate the divisor and the atoms; dump CSV for plotting")
    sp.add_argument("--series", required=True)
    sp.add_argument("--H", type=float, default=200.0)
    sp.add_argument("--T", type=float, default=10.0)
    sp.add_argument("--divisor-csv", help="divisor dump (re, im, mult)")
    sp.add_argument("--atoms-csv", help="atom dump (frequency, weight_re, weight_im)")
    common(sp, tol=False)

    sp = sub.add_parser("verify-pn", help="Poisson-Newton check for a series file")
    sp.add_argument("--series", required=True)
    sp.add_argument("--test", required=True)
    sp.add_argument("--H", type=float, default=2000.0)
    sp.add_argument("--T", type=float)
    sp.add_argument("--beta", type=float, default=0.0)
    sp.add_argument("--symmetric", action="store_true")
    common(sp)

    sp = sub.add_parser("verify-poisson", help="classical Poisson summation as f = 1 - exp(-lambda s)")
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--test", default="gaussian:center=0,width=1")
    sp.add_argument("--H", type=float, default=1e4)
    common(sp)

    sp = sub.add_parser("verify-newton", help="Newton identities for a monic polynomial")
    sp.add_argument("--poly", required=True, help="comma-separated coefficients, leading 1 first")
    sp.add_argument("--mmax", type=int, default=8)
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    common(sp)

    sp = sub.add_parser("verify-explicit", help="explicit formula with a zeta zero table")
    sp.add_argument("--zeros", required=True)
    sp.add_argument("--primes", type=int, required=True, help="prime-power cutoff X")
    sp.add_argument("--N", type=int, help="use only the first N zeros")
    sp.add_argument("--test", default="gaussian:center=0,width=1")
    common(sp)

    sp = sub.add_parser("verify-selberg", help="Selberg-type instance file")
    sp.add_argument("--instance", required=True)
    sp.add_argument("--test", required=True)
    common(sp)

    sp = sub.add_parser("detect-fe", help="functional-equation detection for a series file")
    sp.add_argument("--series", required=True)
    common(sp, tol=False)
    return p


def _parse_poly(text):
    vals = []
    for item in text.split(","):
        item = item.strip()
        try:
            vals.append(int(item))
        except ValueError:
            try:
                vals.append(complex(item.replace(" ", "")))
            except ValueError:
                raise UsageError("--poly: cannot read coefficient %r" % item) from None
            if vals[-1].imag == 0:
                vals[-1] = vals[-1].real
    if len(vals) < 2 or vals[0] != 1:
        raise UsageError("--poly: need a monic polynomial of degree >= 1 (leading coefficient 1)")
    return vals


def _config(args):
    inputs = {k: getattr(args, k) for k in ("series", "zeros", "instance") if getattr(args, k, None)}
    return RunConfig(args.scenario, inputs, getattr(args, "H", None), getattr(args, "T", None),
                     getattr(args, "N", None), getattr(args, "primes", None), getattr(args, "test", None),
                     getattr(args, "tol", None), getattr(args, "out", None))


def _tol(cfg, default):
    return default if cfg.tolerance is None else cfg.tolerance


def _run(args, cfg):
    """Returns (payload, all_passed)."""
    sc = cfg.scenario
    if sc == "analyze":
        series = load_series(cfg.inputs["series"])
        divisor = locate_divisor(series, cfg.H)
        atoms = atom_measure(series, cfg.T)
        if args.divisor_csv:
            with open(args.divisor_csv, "w", newline="", encoding="utf-8") as fh:
                write_divisor_csv(divisor, fh)
        if args.atoms_csv:
            with open(args.atoms_csv, "w", newline="", encoding="utf-8") as fh:
                write_atoms_csv(atoms, fh)
        payload = {"scenario": "analyze", "H": cfg.H, "T": cfg.T, "divisor_points": len(divisor.points),
                   "total_multiplicity": divisor.total_multiplicity, "residual_bound": divisor.residual_bound,
                   "atoms": len(atoms), "divisor_csv": args.divisor_csv, "atoms_csv": args.atoms_csv}
        return payload, True
    if sc == "detect-fe":
        info = detect_functional_equation(load_series(cfg.inputs["series"]))
        return {"scenario": "detect-fe", "has_fe": info.has_fe, "mu": info.mu, "c": info.c,
                "sigma_star": info.sigma_star, "note": info.axis_note}, True

    if sc == "verify-pn":
        reports = [verify_poisson_newton(load_series(cfg.inputs["series"]), cfg.test_function(), cfg.H, cfg.T,
                                         beta=args.beta, symmetric=args.symmetric,
                                         tolerance=_tol(cfg, 1e-6))]
    elif sc == "verify-poisson":
        if not args.lam > 0:
            raise UsageError("--lambda must be positive")
        reports = [verify_classical_poisson(args.lam, cfg.test_function(), cfg.H, tolerance=_tol(cfg, 1e-10))]
    elif sc == "verify-newton":
        if args.mmax < 1:
            raise UsageError("--mmax must be at least 1")
        reports = verify_newton_identities(_parse_poly(args.poly), args.lam, args.mmax, tolerance=_tol(cfg, 1e-9))
    elif sc == "verify-explicit":
        zeros = load_zeta_zeros(cfg.inputs["zeros"])
        if cfg.N is not None:
            zeros = zeros.head(cfg.N)
        reports = [verify_explicit_formula(cfg.test_function(), zeros, cfg.X, sieve_primes(cfg.X),
                                           tolerance=_tol(cfg, 1e-3))]
    elif sc == "verify-selberg":
        inst = load_selberg(cfg.inputs["instance"])
        phi = cfg.test_function()
        lo, hi = phi.support
        if lo <= 0 <= hi:
            raise UsageError("--test must vanish near 0 for the Selberg pairing")
        reports = [verify_selberg(inst.genus, inst.eigen_gammas, inst.lengths, phi, tolerance=_tol(cfg, 1e-10))]
    else:  # argparse restricts the choices
        raise UsageError("unknown scenario %r" % sc)
    return [r.to_dict() for r in reports], all(r.passed for r in reports)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if args.threads is not None:
        if args.threads < 1:
            print("pnf: error: --threads must be at least 1", file=sys.stderr)
            return EXIT_USAGE
        os.environ["PNF_THREADS"] = str(args.threads)
    try:
        cfg = _config(args)
        payload, ok = _run(args, cfg)
        text = json.dumps(_jsonable(payload), indent=2)
        if cfg.out:
            with open(cfg.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        else:
            print(text)
    except UsageError as exc:
        print("pnf: error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except (PoissonNewtonError, OSError, ValueError) as exc:
        print("pnf: data error: %s" % exc, file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
