"""Command-line front end.

Exit codes: 0 when ``mu`` is verified as a multiple eigenvalue of the
constructed (or supplied) polynomial, 2 when verification or the construction
fails, 1 on input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .analysis import MODES, analyze
from .errors import InvalidInput, PolydistError, ProblemFormatError
from .pencil import sample_curve
from .perturbation import verify_multiple
from .problem import dumps, load_problem, report_dict, verification_dict

EXIT_OK, EXIT_INPUT, EXIT_FAILED = 0, 1, 2
CURVE_HEADER = ("gamma", "s_2n_minus_1", "s_2n_minus_2")


def _fmt(x: float) -> str:
    return format(x, ".15e")


def parse_mu(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}")


def _emit(text: str, path):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ProblemFormatError("--out", f"cannot write {path}: {exc.strerror}") from None


def _input_error(exc: PolydistError) -> int:
    sys.stderr.write(dumps({"error": exc.to_dict()}))
    return EXIT_INPUT


def cmd_analyze(args) -> int:
    spec = load_problem(args.file)
    if spec.mu is None:
        raise ProblemFormatError("mu", "missing")
    opts = spec.options
    overrides = {
        k: v
        for k, v in (
            ("gamma_max", args.gamma_max),
            ("grid", args.grid),
            ("gamma_tol", args.gamma_tol),
            ("coalescence_rtol", args.coalescence_rtol),
        )
        if v is not None
    }
    if overrides:
        opts = replace(opts, **overrides)
    mode = args.mode or spec.mode
    result = analyze(spec.P, spec.mu, spec.weights, mode, opts, verify_tol=args.tol)
    _emit(dumps(report_dict(result)), args.report)
    return EXIT_OK if result.succeeded else EXIT_FAILED


def curve_csv(samples) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CURVE_HEADER)
    for c in samples:
        writer.writerow([_fmt(c.gamma), _fmt(c.s_lo), _fmt(c.s_hi)])
    return buf.getvalue()


def cmd_curve(args) -> int:
    spec = load_problem(args.file)
    if spec.mu is None:
        raise ProblemFormatError("mu", "missing")
    try:
        samples = sample_curve(spec.P, spec.mu, args.gamma_lo, args.gamma_hi, args.samples)
    except InvalidInput as exc:
        raise ProblemFormatError("--gamma-lo/--gamma-hi/--samples", str(exc)) from None
    _emit(curve_csv(samples), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = load_problem(args.file)
    mu = args.mu if args.mu is not None else spec.mu
    if mu is None:
        raise ProblemFormatError("--mu", "missing (not given on the command line or in the file)")
    v = verify_multiple(spec.P, mu, tol=args.tol, reference=spec.reference)
    out = {"mu": [mu.real, mu.imag], "verification": verification_dict(v)}
    _emit(dumps(out), args.report)
    return EXIT_OK if v.is_multiple else EXIT_FAILED


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors, not verification failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="polydist",
        description="Distance from a matrix polynomial to polynomials with a prescribed "
        "multiple eigenvalue, with an explicit perturbation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run the full construction on a problem file")
    p.add_argument("file")
    p.add_argument("--mode", choices=MODES + ("force-single-pair", "force-corrected"))
    p.add_argument("--report", help="write the JSON report here (default: stdout)")
    p.add_argument("--gamma-max", type=float)
    p.add_argument("--grid", type=int)
    p.add_argument("--gamma-tol", type=float)
    p.add_argument("--coalescence-rtol", type=float)
    p.add_argument("--tol", type=float, default=1e-8, help="verification tolerance")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("curve", help="sample s_(2n-1) and s_(2n-2) over gamma as CSV")
    p.add_argument("file")
    p.add_argument("--gamma-lo", type=float, default=0.0)
    p.add_argument("--gamma-hi", type=float, default=10.0)
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("verify", help="check that mu is a multiple eigenvalue of a polynomial")
    p.add_argument("file", help="problem file holding Q, or an analyze report")
    p.add_argument("--mu", type=parse_mu)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--report", help="write the JSON result here (default: stdout)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidInput as exc:
        return _input_error(exc)


if __name__ == "__main__":
    sys.exit(main())
