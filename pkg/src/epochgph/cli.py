"""Command-line interface.

Subcommands: simulate, periodogram, estimate, kernel, predict-mse, montecarlo.
Machine-readable output goes to stdout (or ``--out``), diagnostics to stderr.
Exit status is 0 on success, 2 on usage errors and 1 on runtime failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__
from .estimator import REGRESSORS, BandwidthRule, estimate
from .model import ArfimaModel, f_star
from .montecarlo import McConfig, emit_table, run_mc
from .simulate import DEFAULT_BURN_IN, SimConfig, simulate_fractional
from .spectral import EpochLayout, averaged_periodogram
from .theory import (KernelQuery, QuadratureError, finite_n_dft_covariance, limit_kernel_D,
                     mse_prediction, normalized_dft_covariance)

SCHEMA_VERSION = 1


class CliError(Exception):
    """Runtime failure reported with exit status 1."""


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _write(text: str, path=None):
    fh, close = _open_out(path)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


def _emit_json(obj: dict, path=None):
    payload = {"schema_version": SCHEMA_VERSION}
    payload.update(obj)
    _write(json.dumps(payload, indent=2) + "\n", path)


def read_series(path) -> np.ndarray:
    """Read the ``x`` column of a ``t,x`` CSV file (``-`` for stdin)."""
    fh = sys.stdin if path in (None, "-") else open(path, newline="")
    try:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "x" not in reader.fieldnames:
            raise CliError("input CSV must have a header with an 'x' column (expected 't,x')")
        try:
            values = [float(row["x"]) for row in reader]
        except (TypeError, ValueError) as exc:
            raise CliError(f"malformed value in input CSV: {exc}") from None
    finally:
        if fh is not sys.stdin:
            fh.close()
    return np.array(values, dtype=float)


def format_series(x) -> str:
    lines = ["t,x"]
    lines += [f"{t},{float(v)!r}" for t, v in enumerate(x, start=1)]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def _model(args) -> ArfimaModel:
    try:
        return ArfimaModel(args.d, args.phi, args.sigma2)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def cmd_simulate(args):
    config = SimConfig(_model(args), args.n, args.seed, args.burn_in)
    _write(format_series(simulate_fractional(config)), args.out)


def cmd_periodogram(args):
    x = read_series(args.input)
    layout = EpochLayout(x.size, args.epochs)
    ibar = averaged_periodogram(x, layout)
    lines = ["k,omega,ibar"]
    lines += [f"{k},{w!r},{v!r}" for k, (w, v) in
              enumerate(zip(ibar.frequencies.tolist(), ibar.ordinates.tolist()), start=1)]
    _write("\n".join(lines) + "\n", args.out)


def cmd_estimate(args):
    x = read_series(args.input)
    layout = EpochLayout(x.size, args.epochs)
    model = _model(args) if args.bandwidth.kind == "optimal" else None
    report = estimate(averaged_periodogram(x, layout), args.bandwidth, model,
                      level=args.level, regressor=args.regressor)
    out = {"N": layout.total_length, "n": layout.epoch_length,
           "bandwidth": str(args.bandwidth)}
    out.update(report.to_dict())
    _emit_json(out, args.out)


def cmd_kernel(args):
    query = KernelQuery(args.d, args.j, args.k, args.ell)
    which = args.which
    if which in ("d1", "d2"):
        value = limit_kernel_D(query, 1 if which == "d1" else 2)
        extra = {}
    else:
        model = ArfimaModel(args.d, args.phi, args.sigma2)
        covariance = normalized_dft_covariance if args.normalized else finite_n_dft_covariance
        value = covariance(model, which, args.j, args.k, args.ell,
                           conjugated=not args.unconjugated)
        extra = {"n": which, "conjugated": not args.unconjugated,
                 "normalized": args.normalized, "f_star0": f_star(model, 0.0)}
        which = "finite"
    _emit_json({"which": which, "d": args.d, "j": args.j, "k": args.k, "ell": args.ell,
                **extra, "real": value.real, "imag": value.imag}, args.out)


def cmd_predict_mse(args):
    pred = mse_prediction(_model(args), args.n, args.g, args.m)
    _emit_json({"n": args.n, "g": args.g, **pred.to_dict()}, args.out)


def cmd_montecarlo(args):
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config {args.config}: {exc}") from None
    entries = raw if isinstance(raw, list) else [raw]
    try:
        configs = [McConfig.from_dict(entry) for entry in entries]
    except (KeyError, TypeError) as exc:
        raise CliError(f"invalid config: missing or malformed field {exc}") from None
    summaries = []
    for config in configs:
        print(f"running N={config.total_length} g={list(config.epoch_counts)} "
              f"R={config.replications}", file=sys.stderr)
        summaries.extend(run_mc(config, workers=args.workers))
    _write(emit_table(summaries, args.format), args.out)


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _bandwidth(text: str) -> BandwidthRule:
    try:
        return BandwidthRule.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _which(text: str):
    if text in ("d1", "d2"):
        return text
    head, _, arg = text.partition(":")
    if head == "finite" and arg.isdigit() and int(arg) >= 4:
        return int(arg)
    raise argparse.ArgumentTypeError(f"expected d1, d2 or finite:N (N >= 4), got {text!r}")


def _model_flags(p, need_d=True, phi_default=0.0, phi_help="AR(1) coefficient (default 0)"):
    p.add_argument("--d", type=float, required=need_d, default=0.0,
                   help="memory parameter in (-1/2, 1/2)")
    p.add_argument("--phi", type=float, default=phi_default, help=phi_help)
    p.add_argument("--sigma2", type=float, default=1.0, help="innovation variance (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epochgph", allow_abbrev=False,
        description="Epoch-averaged log-periodogram estimation of the memory parameter d.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("simulate", allow_abbrev=False,
                       help="simulate a fractional noise / ARFIMA(1,d,0) path as CSV t,x")
    p.add_argument("--n", type=int, required=True, help="series length N")
    _model_flags(p)
    p.add_argument("--seed", type=int, required=True, help="random seed (64-bit unsigned)")
    p.add_argument("--burn-in", type=int, default=DEFAULT_BURN_IN,
                   help=f"AR burn-in steps when phi != 0 (default {DEFAULT_BURN_IN})")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("periodogram", allow_abbrev=False,
                       help="averaged periodogram of a t,x CSV as k,omega,ibar")
    p.add_argument("--epochs", type=int, default=1, help="number of epochs g (default 1)")
    p.add_argument("--input", default="-", help="input CSV with columns t,x (default stdin)")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_periodogram)

    p = sub.add_parser("estimate", allow_abbrev=False,
                       help="estimate d from a t,x CSV; prints JSON")
    p.add_argument("--epochs", type=int, default=1, help="number of epochs g (default 1)")
    p.add_argument("--bandwidth", type=_bandwidth, required=True,
                   help="optimal | pow:A | half | root-total | fixed:M")
    _model_flags(p, need_d=False, phi_default=None,
                 phi_help="AR(1) coefficient; required with --bandwidth optimal")
    p.add_argument("--level", type=float, default=0.95, help="confidence level (default 0.95)")
    p.add_argument("--regressor", choices=REGRESSORS, default="sin",
                   help="regressor: sin = -2 log|2 sin(w/2)| (default), log = -2 log(w)")
    p.add_argument("--input", default="-", help="input CSV with columns t,x (default stdin)")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("kernel", allow_abbrev=False,
                       help="limit kernels D1/D2 or the finite-n DFT covariance; prints JSON")
    p.add_argument("--d", type=float, required=True, help="memory parameter in (-1/2, 1/2)")
    p.add_argument("--j", type=int, required=True, help="first frequency index (>= 1)")
    p.add_argument("--k", type=int, required=True, help="second frequency index (>= j)")
    p.add_argument("--ell", type=int, default=0, help="epoch offset (default 0)")
    p.add_argument("--which", type=_which, required=True, help="d1 | d2 | finite:N")
    p.add_argument("--phi", type=float, default=0.0, help="AR(1) coefficient for finite:N")
    p.add_argument("--sigma2", type=float, default=1.0, help="innovation variance for finite:N")
    p.add_argument("--unconjugated", action="store_true",
                   help="finite:N only: E[d_0(w_j) d_l(w_k)] instead of E[d_0(w_j) conj d_l(w_k)]")
    p.add_argument("--normalized", action="store_true",
                   help="finite:N only: multiply by w_j^d w_k^d")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("predict-mse", allow_abbrev=False,
                       help="leading-order bias/variance/MSE and optimal bandwidth; prints JSON")
    _model_flags(p)
    p.add_argument("--n", type=int, required=True, help="epoch length n")
    p.add_argument("--g", type=int, default=1, help="number of epochs g (default 1)")
    p.add_argument("--m", type=int, help="bandwidth (default: optimal)")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_predict_mse)

    p = sub.add_parser("montecarlo", allow_abbrev=False,
                       help="run a Monte Carlo study from a JSON config; prints a table")
    p.add_argument("--config", required=True, help="JSON config file (object or list of objects)")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="output format (default csv)")
    p.add_argument("--workers", type=int, default=1, help="worker threads (default 1)")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_montecarlo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "estimate" and args.bandwidth.kind == "optimal":
        if args.phi is None:
            parser.error("--bandwidth optimal requires --phi (the model's AR coefficient)")
    try:
        args.func(args)
    except (CliError, ValueError, ArithmeticError, QuadratureError, OSError, IndexError) as exc:
        print(f"epochgph {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
