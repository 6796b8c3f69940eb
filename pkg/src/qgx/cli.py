"""``qgx`` command line: run verification suites, export constants, normal-form expressions."""

from __future__ import annotations

import argparse
import json
import re
import sys

from . import __version__
from .dsl import ParseError, format_elem, parse_expr
from .ncalg import FuelExhausted, normal_form
from .report import CheckResult
from .rtensor import IndexedTensor, RBundle
from .suites import SUITES, Config, Session, classical_limit, default_fuel, run_suite

CONSTANTS = ("sigma", "sigmaTilde", "C", "CTilde", "D", "R", "Rtilde")
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _positive(name: str, low: int = 1, high: int | None = None):
    def conv(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer") from None
        if v < low or (high is not None and v > high):
            bound = f"in {low}..{high}" if high is not None else f">= {low}"
            raise argparse.ArgumentTypeError(f"{name} must be {bound}")
        return v

    return conv


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=_positive("n"), default=2, help="matrix dimension (default 2)")
    p.add_argument("--degree", type=_positive("degree"), default=3, help="pairing-depth bound (default 3)")
    p.add_argument("--grade-cap", type=_positive("grade cap", 1, 3), default=3, help="wedge-grade cap, 1..3 (default 3)")
    p.add_argument("--fuel", type=_positive("fuel"), default=None, help="rewrite-step bound (default $QGX_FUEL or 10^6)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--r-file", default=None, help="JSON R-matrix replacing the built-in one")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qgx", description="Exact differential calculus on GL_q(n).")
    parser.add_argument("--version", action="version", version=f"qgx {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", help="run a verification suite")
    c.add_argument("suite", choices=SUITES + ("all", "classical"))
    _common(c)
    k = sub.add_parser("constants", help="print a constant tensor as JSON")
    k.add_argument("which", choices=CONSTANTS)
    _common(k)
    nf = sub.add_parser("nf", help="print the normal form of an expression")
    nf.add_argument("expr")
    _common(nf)
    return parser


def _config(args) -> Config:
    return Config(
        n=args.n,
        degree=args.degree,
        grade_cap=args.grade_cap,
        fuel=args.fuel if args.fuel is not None else default_fuel(),
        output_format=args.format,
        r_file=args.r_file,
    )


def _report(command: str, cfg: Config, suite: str, results: list[CheckResult]) -> str:
    passed = all(r.passed for r in results)
    if cfg.output_format == "json":
        obj = {
            "command": command,
            "suite": suite,
            "n": cfg.n,
            "degree": cfg.degree,
            "gradeCap": cfg.grade_cap,
            "passed": passed,
            "results": [r.to_obj() for r in results],
        }
        return json.dumps(obj, indent=1, sort_keys=True)
    lines = [r.to_text() for r in results]
    lines.append(f"{suite}: {'all checks passed' if passed else 'FAILED'} ({sum(r.passed for r in results)}/{len(results)})")
    return "\n".join(lines)


def cmd_check(suite: str, cfg: Config, out=None) -> int:
    out = out or sys.stdout
    session = Session(cfg)
    if suite == "classical":
        try:
            results = classical_limit(session.bundle, session.engine, session.constants)
        except (ArithmeticError, RuntimeError, ValueError) as exc:
            results = [CheckResult("classical setup", False, None, f"{type(exc).__name__}: {exc}")]
    else:
        results = run_suite(suite, session)
    print(_report("check", cfg, suite, results), file=out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def constant_tensor(which: str, session: Session) -> IndexedTensor:
    if which == "R":
        return session.R
    b: RBundle = session.bundle
    if which == "Rtilde":
        return b.Rtilde
    if which == "D":
        return b.D
    sc = session.constants
    return {"sigma": sc.sigma, "sigmaTilde": sc.sigma_tilde, "C": sc.C, "CTilde": sc.C_tilde}[which]


def cmd_constants(which: str, cfg: Config, out=None) -> int:
    out = out or sys.stdout
    t = constant_tensor(which, Session(cfg))
    print(t.to_json(), file=out)
    return EXIT_OK


def cmd_normal_form(expr: str, cfg: Config, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    session = Session(cfg)
    n = cfg.n
    try:
        e = parse_expr(expr, n, forms=lambda: session.forms)
    except ParseError as exc:
        print(f"parse error: {exc}", file=err)
        print(f"  {expr}\n  {' ' * exc.pos}^", file=err)
        return EXIT_USAGE
    middle = "X" if "X" in _middle_letters(expr) else "Y"
    if {"X", "Y"} <= _middle_letters(expr):
        print("an expression cannot mix Y and X letters", file=err)
        return EXIT_USAGE
    rules = session.x_rules if middle == "X" else session.y_rules
    try:
        result = normal_form(e, rules, fuel=cfg.fuel)
    except FuelExhausted as exc:
        print(f"fuel exhausted: {exc}", file=err)
        return EXIT_FAIL
    print(format_elem(result, n, middle), file=out)
    return EXIT_OK


def _middle_letters(expr: str) -> set[str]:
    return set(re.findall(r"(?<![A-Za-z_])([XY])\s*\[", expr))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        if args.command == "check":
            return cmd_check(args.suite, cfg)
        if args.command == "constants":
            return cmd_constants(args.which, cfg)
        return cmd_normal_form(args.expr, cfg)
    except (OSError, ValueError, KeyError) as exc:
        print(f"qgx: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RuntimeError, ArithmeticError) as exc:
        print(f"qgx: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
