"""Command-line entry point: ``rdlab <subcommand> [options]``.

Scan-type subcommands write JSON lines (a header record carrying the resolved
configuration, then one record per result); report-type subcommands write a
single JSON document. Exit status is 0 on success, 1 on usage or resource
errors and 2 when a ``--check`` (or ``verify-all``) criterion fails.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import __version__, buchstab, fourier, markov, primes, verify
from .digitset import DigitSystem, kappa_constants
from .errors import BudgetExhausted, ConvergenceError, ResourceError, UnsupportedConfiguration

SCHEMA = "rdlab/1"
EXIT_OK, EXIT_USAGE, EXIT_CHECK = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _intlike(text: str) -> int:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if v != int(v):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(v)


def _real(text: str) -> float:
    """Accept ``1.5`` as well as ``235/154``."""
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}")


def _triple(text: str) -> tuple[float, float, float]:
    parts = [_real(p) for p in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated numbers")
    return tuple(parts)


def _int_list(text: str) -> list[int]:
    return [_intlike(p) for p in text.split(",")]


def _ds(text: str) -> DigitSystem:
    try:
        return DigitSystem.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _jsonable(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, DigitSystem):
        return str(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _dumps(obj) -> str:
    return json.dumps(obj, default=_jsonable, sort_keys=True, allow_nan=False)


class Output:
    """Collects records and renders them in the requested format."""

    def __init__(self, args, stream):
        self.stream = stream
        self.format = args.format
        self.config = {k: v for k, v in vars(args).items() if k != "handler"}
        self.reproducible = args.reproducible

    def header(self) -> dict:
        h = {"schema": SCHEMA, "version": __version__, "config": self.config}
        if not self.reproducible:
            h["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
        return h

    def lines(self, records: list[dict]) -> None:
        if self.format == "json":
            self.stream.write(_dumps(self.header()) + "\n")
            for r in records:
                self.stream.write(_dumps(r) + "\n")
        elif self.format == "csv":
            self.stream.write("# " + _dumps(self.header()) + "\n")
            cols = []
            for r in records:
                cols += [c for c in r if c not in cols]
            buf = io.StringIO()
            w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
            w.writeheader()
            for r in records:
                w.writerow({c: (_dumps(v) if isinstance(v, (dict, list)) else v) for c, v in r.items()})
            self.stream.write(buf.getvalue())
        else:
            self.stream.write("# " + _dumps(self.header()) + "\n")
            for r in records:
                self.stream.write("  ".join(f"{k}={_fmt(v)}" for k, v in r.items()) + "\n")

    def document(self, result: dict) -> None:
        if self.format == "json":
            doc = self.header()
            doc["result"] = result
            self.stream.write(_dumps(doc) + "\n")
        else:
            self.lines([result])


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, (dict, list)):
        return _dumps(v)
    return str(v)


# ---------------------------------------------------------------------------
# subcommand handlers; each returns an exit code


def _pinned_bound(t: float):
    if math.isclose(t, 1.0):
        return markov.LAMBDA_L1_BOUND
    if math.isclose(t, markov.MOMENT_T):
        return markov.LAMBDA_MOMENT_BOUND
    return None


def cmd_eigen(args, out: Output) -> int:
    digits = range(10) if args.a0 == "all" else [int(args.a0)]
    records = []
    for a0 in digits:
        r = markov.eigenvalue(a0, args.j, args.t, args.tol, args.window)
        records.append(r.as_record() | {"window": args.window})
    bound = _pinned_bound(args.t)
    worst = max(r["certified_upper"] for r in records)
    passed = None if bound is None else worst < bound
    records.append({"op": "eigen-summary", "max_lambda": worst, "paper_bound": bound, "pass": passed})
    out.lines(records)
    if args.check and passed is not True:
        return EXIT_CHECK
    return EXIT_OK


def cmd_moments(args, out: Output) -> int:
    out.document(fourier.moment_sum(args.ds, args.k, args.t).as_record())
    return EXIT_OK


def cmd_l1(args, out: Output) -> int:
    out.document(fourier.l1_sum(args.ds, args.k).as_record())
    return EXIT_OK


def cmd_fourier(args, out: Output) -> int:
    ds, k = args.ds, args.k
    if args.scan:
        F = fourier.scan(ds, k, args.eta)
        out.lines([{"a": a, "F": float(v)} for a, v in enumerate(F)])
        return EXIT_OK
    theta = fourier.Angle(k if args.scale is None else args.scale, args.a, args.eta, ds.base)
    rec = {
        "op": "fourier",
        "digit_system": str(ds),
        "k": k,
        "params": {"a": theta.numerator, "scale": theta.scale_exponent, "eta": args.eta},
        "value": fourier.f_product(ds, k, theta),
        "empirical_exponent": None,
        "samples": None,
        "definition": "F_{q^k}(a/q^scale + eta) by the digit product formula",
    }
    if args.direct:
        rec["direct"] = fourier.f_direct(ds, k, theta)
    out.document(rec)
    return EXIT_OK


def cmd_exceptional(args, out: Output) -> int:
    r = fourier.exceptional_set(args.ds, args.k, args.threshold)
    out.document({
        "op": "exceptional",
        "digit_system": str(args.ds),
        "k": args.k,
        "params": {"threshold_exponent": args.threshold},
        "value": r.size,
        "empirical_exponent": r.empirical_exponent,
        "samples": args.ds.base**args.k,
        "definition": "#{a<Y: F_Y(a/Y) >= Y^-threshold}, exponent = log(size)/log(Y)",
    })
    return EXIT_OK


def cmd_largesieve(args, out: Output) -> int:
    reports = [fourier.large_sieve_sum(args.ds, args.k, Q, args.beta, args.eta_samples) for Q in args.q]
    records = [r.as_record() for r in reports]
    if len(reports) >= 2:
        slope = fourier.empirical_slope(np.log([r.Q for r in reports]), np.log([r.value for r in reports]))
        records.append({"op": "largesieve-summary", "empirical_exponent": slope, "Q": args.q})
    out.lines(records)
    return EXIT_OK


def cmd_omega(args, out: Output) -> int:
    om = buchstab.build_omega(args.u_max, args.h)
    value = om(args.u)
    if args.format == "text":
        out.stream.write(f"{value:.10f}\n")
    else:
        out.document({"op": "omega", "u": args.u, "omega": value, "h": args.h})
    return EXIT_OK


def cmd_integrals(args, out: Output) -> int:
    rep = buchstab.verify_margin(args.theta, args.budget, args.seed, quadrature=not args.no_quadrature)
    out.document(rep.as_record())
    if args.check and not rep.passed:
        return EXIT_CHECK
    return EXIT_OK


def cmd_primes(args, out: Output) -> int:
    out.document(primes.prime_ratio_report(args.ds, args.x).as_record())
    return EXIT_OK


def cmd_typei(args, out: Output) -> int:
    out.document(primes.type_i_discrepancy(args.ds, args.x, args.q).as_record())
    return EXIT_OK


def cmd_expsum(args, out: Output) -> int:
    theta = fourier.Angle(args.scale, args.a, args.eta)
    out.document({
        "op": "expsum",
        "X": args.x,
        "params": {"a": theta.numerator, "scale": args.scale, "eta": args.eta},
        "value": primes.prime_exp_sum(args.x, theta),
        "pi_X": primes.prime_pi(args.x),
        "definition": "|sum_{p<X} e(p theta)|, theta = a/10^scale + eta",
    })
    return EXIT_OK


def cmd_baseq(args, out: Output) -> int:
    r = fourier.base_q_l1_factor(args.q, args.s, args.interval, args.eps)
    out.document({
        "op": "baseq",
        "q": args.q,
        "s": args.s,
        "interval_mode": args.interval,
        "value": r.value,
        "exponent": r.exponent,
        "within_threshold": r.within_threshold,
        "definition": "per-digit l1 factor; exponent = log(factor)/log(q) vs 23/80 + eps",
    })
    return EXIT_OK


def cmd_verify_all(args, out: Output) -> int:
    checks = verify.run_all(args.budget, args.seed)
    if args.format == "text":
        out.stream.write("# " + _dumps(out.header()) + "\n")
        for c in checks:
            out.stream.write(c.line() + "\n")
        n = sum(c.passed for c in checks)
        out.stream.write(f"{n}/{len(checks)} criteria passed\n")
    else:
        out.lines([{"criterion": c.number, "name": c.name, "pass": c.passed, "details": c.details} for c in checks])
    return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=_intlike, default=42)
    common.add_argument("--format", choices=("json", "csv", "text"), default=None)
    common.add_argument("--threads", type=_intlike, default=None, help="worker cap (default: all cores)")
    common.add_argument("--reproducible", action="store_true", help="omit the timestamp from the header")

    p = _Parser(prog="rdlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def add(name, handler, help_, default_format="json"):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(handler=handler, default_format=default_format)
        return sp

    sp = add("eigen", cmd_eigen, "Perron root of the transition matrix")
    sp.add_argument("--j", type=_intlike, default=4)
    sp.add_argument("--t", type=_real, default=1.0)
    sp.add_argument("--a0", default="all")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--window", choices=fourier.WINDOWS, default="forward")
    sp.add_argument("--check", action="store_true")

    for name, handler, help_ in (("moments", cmd_moments, "t-th moment of F over a/Y"), ("l1", cmd_l1, "l1 sum of F over a/Y")):
        sp = add(name, handler, help_)
        sp.add_argument("--ds", type=_ds, default=DigitSystem.decimal(7))
        sp.add_argument("--k", type=_intlike, default=6)
        if name == "moments":
            sp.add_argument("--t", type=_real, default=markov.MOMENT_T)

    sp = add("fourier", cmd_fourier, "evaluate F at one frequency or scan all a/Y")
    sp.add_argument("--ds", type=_ds, default=DigitSystem.decimal(7))
    sp.add_argument("--k", type=_intlike, default=3)
    sp.add_argument("--a", type=_intlike, default=0)
    sp.add_argument("--scale", type=_intlike, default=None, help="frequency is a/q^scale (default: k)")
    sp.add_argument("--eta", type=float, default=0.0)
    sp.add_argument("--direct", action="store_true", help="also evaluate the direct sum")
    sp.add_argument("--scan", action="store_true")

    sp = add("exceptional", cmd_exceptional, "size of the large-value set")
    sp.add_argument("--ds", type=_ds, default=DigitSystem.decimal(7))
    sp.add_argument("--k", type=_intlike, default=6)
    sp.add_argument("--threshold", type=_real, default=23 / 80)

    sp = add("largesieve", cmd_largesieve, "sampled large-sieve sums")
    sp.add_argument("--ds", type=_ds, default=DigitSystem.decimal(7))
    sp.add_argument("--k", type=_intlike, default=6)
    sp.add_argument("--q", type=_int_list, default=[10, 30, 100])
    sp.add_argument("--beta", type=float, default=0.0)
    sp.add_argument("--eta-samples", type=_intlike, default=33)

    sp = add("omega", cmd_omega, "Buchstab's function at one point", default_format="text")
    sp.add_argument("--u", type=float, required=True)
    sp.add_argument("--u-max", type=float, default=20.0)
    sp.add_argument("--h", type=float, default=1e-4)

    sp = add("integrals", cmd_integrals, "the seven sieve-loss integrals")
    sp.add_argument("--theta", type=_triple, default=buchstab.DEFAULT_THETA)
    sp.add_argument("--budget", type=_intlike, default=2 * 10**7)
    sp.add_argument("--no-quadrature", action="store_true")
    sp.add_argument("--check", action="store_true")

    sp = add("primes", cmd_primes, "prime count and ratio inside the set")
    sp.add_argument("--ds", type=_ds, default=DigitSystem.decimal(7))
    sp.add_argument("--x", type=_intlike, default=10**7)

    sp = add("typei", cmd_typei, "Type I progression discrepancy")
    sp.add_argument("--ds", type=_ds, default=DigitSystem.decimal(7))
    sp.add_argument("--x", type=_intlike, default=10**6)
    sp.add_argument("--q", type=_intlike, default=10**3)

    sp = add("expsum", cmd_expsum, "exponential sum over primes")
    sp.add_argument("--x", type=_intlike, default=10**6)
    sp.add_argument("--a", type=_intlike, default=0)
    sp.add_argument("--scale", type=_intlike, default=0, help="frequency is a/10^scale + eta")
    sp.add_argument("--eta", type=float, default=0.0)

    sp = add("baseq", cmd_baseq, "large-base l1 factor")
    sp.add_argument("--q", type=_intlike, required=True)
    sp.add_argument("--s", type=_intlike, required=True)
    sp.add_argument("--interval", action="store_true")
    sp.add_argument("--eps", type=float, default=1e-3)

    sp = add("verify-all", cmd_verify_all, "run every acceptance criterion", default_format="text")
    sp.add_argument("--budget", type=_intlike, default=2 * 10**7)
    return p


def main(argv=None, stream=None) -> int:
    stream = stream or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"rdlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format is None:
        args.format = args.default_format
    del args.default_format
    fourier.set_threads(args.threads)
    handler = args.handler
    try:
        return handler(args, Output(args, stream))
    except (ResourceError, UnsupportedConfiguration, BudgetExhausted, ConvergenceError, ValueError) as exc:
        print(f"rdlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
