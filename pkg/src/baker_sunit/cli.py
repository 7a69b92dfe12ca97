"""Command-line interface: ``baker-sunit {bound,solve,verify,tubular}``.

Exit codes: 0 success, 1 verification failed, 2 invalid input,
3 a requested external constant is missing, 4 enumeration work limit hit.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

from .baker_bounds import (
    BoundReport,
    InjectedConstants,
    MissingConstantError,
    SUnitEquation,
    sunit_bound,
)
from .number_fields import FieldDescriptor, PlaceSet
from .sunit_solver import ResourceLimitError, Verdict, enumerate_solutions, verify_bound
from .tubular import (
    IncidenceData,
    describe_condition,
    feasible_signatures,
    m_baker,
    m_tubular,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_MISSING_CONSTANT = 3
EXIT_RESOURCE = 4

DEFAULT_CAP = 12
SIG_DIGITS = 10


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    equation: SUnitEquation
    constants: Optional[InjectedConstants]
    cap: Optional[int]
    fmt: str


def _round(obj):
    """Floats to 10 significant digits, recursively, for reproducible output."""
    if isinstance(obj, float):
        if math.isfinite(obj):
            return float(f"{obj:.{SIG_DIGITS}g}")
        return obj
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_round(obj), sort_keys=True, ensure_ascii=False)


def parse_field(kind: str, D: Optional[int]) -> FieldDescriptor:
    if kind == "Q":
        if D is not None:
            raise UsageError("--D only applies to --field quadratic")
        return FieldDescriptor(None)
    if D is None:
        raise UsageError("--field quadratic needs --D")
    return FieldDescriptor(D)


def parse_S(fd: FieldDescriptor, text: str) -> PlaceSet:
    items = [t.strip() for t in text.split(",") if t.strip()]
    seen = set()
    for t in items:
        if t in seen:
            raise UsageError(f"{t} listed twice in --S")
        seen.add(t)
    return PlaceSet.from_spec(fd, items)


def build_config(args) -> RunConfig:
    fd = parse_field(args.field, args.D)
    S = parse_S(fd, args.S)
    alpha = fd.parse(args.alpha)
    beta = fd.parse(args.beta)
    if alpha.is_zero() or beta.is_zero():
        raise UsageError("alpha and beta must be nonzero")
    consts = InjectedConstants.load(args.constants) if args.constants else None
    cap = getattr(args, "cap", None)
    if cap is not None and cap < 1:
        raise UsageError("--cap must be a positive integer")
    return RunConfig(SUnitEquation(S, alpha, beta), consts, cap, args.format)


def _emit_report(report: BoundReport, fmt: str) -> str:
    data = report.to_json()
    if fmt == "json":
        return dumps(data)
    data = _round(data)
    if fmt == "tsv":
        rows = []
        for k in sorted(data):
            v = data[k]
            rows.append(f"{k}\t{v if not isinstance(v, (dict, list)) else dumps(v)}")
        return "\n".join(rows)
    lines = [
        f"branch: {report.branch} (part {report.theorem_part})",
        f"H = {data['H']}  s = {report.s}  d = {report.d}  R_S = {data['R_S']}",
        f"P_S = {report.P_S}  P'_S = {report.P_prime_S}",
        f"bound: h(x), h(y) <= {data['bound']}",
    ]
    return "\n".join(lines)


def _solve(cfg: RunConfig):
    cap = DEFAULT_CAP if cfg.cap is None else cfg.cap
    if cfg.cap is None:
        print(
            f"note: exponent cap {cap}; solutions with larger exponents are not searched",
            file=sys.stderr,
        )
    return enumerate_solutions(cfg.equation, cap)


def cmd_bound(args) -> int:
    cfg = build_config(args)
    report = sunit_bound(cfg.equation, cfg.constants, closed_form=args.closed_form)
    print(_emit_report(report, cfg.fmt or "json"))
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = build_config(args)
    sols = _solve(cfg)
    fmt = cfg.fmt or "json"
    if fmt == "json":
        out = [dumps(s.to_json()) for s in sols]
    elif fmt == "tsv":
        out = ["x\ty\thx\thy"] + [
            f"{s.x}\t{s.y}\t{s.hx:.{SIG_DIGITS}g}\t{s.hy:.{SIG_DIGITS}g}" for s in sols
        ]
    else:
        out = [f"x = {s.x}, y = {s.y}, h = {s.height:.{SIG_DIGITS}g}" for s in sols]
        out.append(f"{len(sols)} solutions")
    if out:
        print("\n".join(out))
    return EXIT_OK


def _emit_verdict(v: Verdict, fmt: str) -> str:
    if fmt == "json":
        return dumps(v.to_json())
    data = _round(v.to_json())
    if fmt == "tsv":
        return "\n".join(f"{k}\t{data[k]}" for k in sorted(data))
    if v.margin is None:
        return f"{v.label} no solutions found, bound {data['bound']}"
    return (
        f"{v.label} margin {data['margin']} "
        f"(max height {data['max_height']} vs bound {data['bound']}, {v.count} solutions)"
    )


def cmd_verify(args) -> int:
    cfg = build_config(args)
    report = sunit_bound(cfg.equation, cfg.constants)
    if args.override_bound is not None:
        # test hook: pretend the bound is something else
        report.bound = args.override_bound
    sols = _solve(cfg)
    verdict = verify_bound(cfg.equation, report, sols)
    print(_emit_verdict(verdict, cfg.fmt or "human"))
    return EXIT_OK if verdict.passed else EXIT_FAIL


def _parse_caps(text: str) -> tuple[int, int]:
    try:
        a, b = (int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"--caps wants two integers like 10,10, got {text!r}") from None
    if a < 1 or b < 0:
        raise UsageError("--caps needs r_inf cap >= 1 and r_fin cap >= 0")
    return a, b


def cmd_tubular(args) -> int:
    caps = _parse_caps(args.caps)
    try:
        inc = IncidenceData.load(args.incidence)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read incidence file: {exc}") from exc
    mB = m_baker(inc)
    try:
        mY: Optional[int] = m_tubular(inc)
    except ValueError:
        mY = None
    sigs = feasible_signatures(mB, mY, inc.n, caps) if mY is not None else []
    cond = describe_condition(mB, mY, inc.n) if mB is not None and mY is not None else None
    fmt = args.format or "human"
    if fmt == "json":
        print(
            dumps(
                {
                    "schema": 1,
                    "n": inc.n,
                    "m_B": mB,
                    "m_Y": mY,
                    "condition": cond,
                    "caps": list(caps),
                    "signatures": [[g.r_inf, g.r_fin] for g in sigs],
                }
            )
        )
        return EXIT_OK
    if fmt == "tsv":
        print("r_inf\tr_fin")
        for g in sigs:
            print(f"{g.r_inf}\t{g.r_fin}")
        return EXIT_OK
    if mB is None:
        print("m_B does not exist")
    elif mY is None:
        print(f"m_B={mB}; m_Y does not exist")
    else:
        print(f"m_B={mB} m_Y={mY}; condition ⇔ {cond}")
        print(f"{len(sigs)} feasible signatures within caps {caps[0]},{caps[1]}")
        for g in sigs:
            print(f"  r_inf={g.r_inf} r_fin={g.r_fin}")
    return EXIT_OK


def _add_equation_args(p: argparse.ArgumentParser):
    p.add_argument("--field", choices=["Q", "quadratic"], default="Q")
    p.add_argument("--D", type=int, default=None, help="squarefree D for Q(sqrt D)")
    p.add_argument("--S", required=True, help='comma-separated primes or p:i; "" for none')
    p.add_argument("--alpha", required=True, help='exact, e.g. "3/2" or "1+1*sqrt2"')
    p.add_argument("--beta", required=True)
    p.add_argument("--constants", default=None, help="JSON file of injected constants")
    p.add_argument("--format", choices=["json", "tsv", "human"], default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="baker-sunit", description="Height bounds and solutions for S-unit equations."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="height bound for alpha*x + beta*y = 1")
    _add_equation_args(p)
    p.add_argument("--closed-form", action="store_true", help="also report the closed forms")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("solve", help="enumerate solutions in an exponent box")
    _add_equation_args(p)
    p.add_argument("--cap", type=int, default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check the bound against enumerated solutions")
    _add_equation_args(p)
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--override-bound", type=float, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("tubular", help="Baker/tubular numbers from incidence data")
    p.add_argument("--incidence", required=True, help="incidence JSON file")
    p.add_argument("--caps", default="10,10", help="r_inf,r_fin search caps")
    p.add_argument("--format", choices=["json", "tsv", "human"], default=None)
    p.set_defaults(func=cmd_tubular)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MissingConstantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_CONSTANT
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
