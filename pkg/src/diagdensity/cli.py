"""Command line front end.

Every subcommand writes one table (CSV with a header row, or JSON) to
stdout or ``--out``.  Scalars that do not belong to a row are written as
``# name,value`` comment lines after the CSV table, or under ``summary``
in JSON.  Floats carry 12 significant digits in both formats; exact
rationals are written as ``num/den`` strings.

Exit codes: 0 success, 1 verification failure, 2 bad arguments,
3 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from diagdensity import __version__
from diagdensity.arith import primes_up_to
from diagdensity.avg import (
    AverageConfig,
    PsiTable,
    average_log_inv_density,
    landau_constants,
    landau_sum,
    lemma3_error_integral,
    lemma3_lhs,
    lemma3_main_term,
    s1_partial_summation_bound,
    theorem1_double_sum,
)
from diagdensity.bounds import GlobalBoundConfig, bound_alpha, bound_exact, prime_cutoff
from diagdensity.errors import ResourceError
from diagdensity.local import FormSpec, local_density
from diagdensity.scan import ScanConfig, density_report
from diagdensity.verify import run_checks

SCHEMA_VERSION = "1"


@dataclass
class OutputRecord:
    command: str
    inputs: Dict[str, Any]
    columns: List[str]
    rows: List[List[Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION


def _text(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _json_value(v: Any) -> Any:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return float(f"{v:.12g}") if math.isfinite(v) else None
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    return v


def render(record: OutputRecord, fmt: str) -> str:
    if fmt == "json":
        doc = {
            "schema_version": record.schema_version,
            "command": record.command,
            "inputs": _json_value(record.inputs),
            "rows": [dict(zip(record.columns, _json_value(r))) for r in record.rows],
            "summary": _json_value(record.summary),
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(record.columns)
    for r in record.rows:
        w.writerow([_text(v) for v in r])
    for k, v in record.summary.items():
        buf.write(f"# {k},{_text(v)}\n")
    return buf.getvalue()


def _ints(text: str) -> List[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _floats(text: str) -> List[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _number(x: float) -> Any:
    return int(x) if float(x).is_integer() else x


def _form(args) -> FormSpec:
    if args.coeffs is None or args.k is None:
        raise ValueError("--coeffs and --k are required")
    return FormSpec.parse(args.coeffs, args.k)


def cmd_local(args) -> OutputRecord:
    form = _form(args)
    limit = args.prime_limit or 100
    rec = OutputRecord(
        "local",
        {"coeffs": list(form.coefficients), "k": form.exponent, "p_min": args.p_min, "prime_limit": limit},
        ["p", "m", "value_set_size", "density", "alpha", "alpha_capped", "density_exact"],
    )
    for p in primes_up_to(limit):
        if p < args.p_min:
            continue
        d = local_density(form, int(p))
        rec.rows.append([d.prime, d.coset_index, d.value_set_size, float(d.density), d.alpha, d.alpha_capped, d.density])
    return rec


def cmd_bound(args) -> OutputRecord:
    if args.k is None:
        raise ValueError("--k is required")
    mode = args.mode or ("exact" if args.coeffs else "alpha")
    R = args.R if args.R is not None else 4.0
    cfg = GlobalBoundConfig(R=R, prime_limit=args.prime_limit or 1000, mode=mode)
    if mode == "exact":
        form = _form(args)
        if args.s is not None and args.s != form.s:
            raise ValueError(f"--s {args.s} disagrees with {form.s} coefficients")
        report = bound_exact(form, cfg)
    else:
        if args.s is None:
            raise ValueError("alpha mode needs --s")
        report = bound_alpha(args.k, args.s, cfg)
    rec = OutputRecord(
        "bound",
        {"k": args.k, "s": report.s, "mode": mode, "R": R, "prime_limit": cfg.prime_limit, "coeffs": args.coeffs},
        ["p", "term"],
        [[p, t] for p, t in report.contributing],
    )
    rec.summary = {
        "k": report.k,
        "s": report.s,
        "Z": prime_cutoff(report.k, report.s, R) if mode == "alpha" else None,
        "log_inv_density_lower": report.log_inv_density_lower,
        "density_upper": report.density_upper,
        "conditional_reference": report.conditional_reference,
        "contributing_primes": len(report.contributing),
    }
    return rec


def cmd_scan(args) -> OutputRecord:
    form = _form(args)
    if args.N is None or args.B is None:
        raise ValueError("--N and --B are required")
    primes = tuple(_ints(args.sieve_primes)) if args.sieve_primes else ()
    cfg = ScanConfig(args.N, args.B, primes)
    rep = density_report(form, cfg, threads=args.threads)
    rec = OutputRecord(
        "scan",
        {"coeffs": list(form.coefficients), "k": form.exponent, "N": args.N, "B": args.B, "sieve_primes": list(primes)},
        ["n", "witness"],
        [[n, ";".join(map(str, rep.witnesses[n]))] for n in sorted(rep.represented)],
    )
    rec.summary = {
        "represented_count": len(rep.represented),
        "lower_density": float(rep.lower_density),
        "lower_density_exact": rep.lower_density,
        "sieve_admissible_count": rep.sieve_admissible_count,
        "sieve_upper_density": float(rep.sieve_upper_density),
        "sieve_upper_density_exact": rep.sieve_upper_density,
        "sieve_modulus": rep.sieve_modulus,
        "aligned": rep.aligned,
        "consistent": rep.consistent,
    }
    return rec


def cmd_average(args) -> OutputRecord:
    if args.X is None:
        raise ValueError("--X is required")
    xs = [int(x) for x in _floats(args.X)]
    mode = args.mode or ("exact" if args.coeffs else "alpha")
    coeffs = _ints(args.coeffs) if args.coeffs else None
    s = len(coeffs) if mode == "exact" and coeffs else args.s
    if s is None:
        raise ValueError("alpha mode needs --s")
    R = args.R if args.R is not None else 1.0
    rec = OutputRecord(
        "average",
        {"X": xs, "s": s, "mode": mode, "R": R, "prime_limit": args.prime_limit, "coeffs": coeffs},
        ["X", "k", "log_inv_density_lower"] if args.per_k else ["X", "prime_limit", "average", "reference", "normalized"],
    )
    for X in xs:
        limit = args.prime_limit or max(2, math.ceil(X**1.5))
        cfg = GlobalBoundConfig(R=R, prime_limit=limit, mode=mode)
        rep = average_log_inv_density(X, s, cfg, coefficients=coeffs, threads=args.threads)
        if args.per_k:
            rec.rows.extend([X, k, v] for k, v in rep.per_k)
            rec.summary[f"average_X{X}"] = rep.average
            rec.summary[f"reference_X{X}"] = rep.reference
        else:
            rec.rows.append([X, limit, rep.average, rep.reference, rep.normalized])
    return rec


def cmd_lemma3(args) -> OutputRecord:
    if args.X is None:
        raise ValueError("--X is required")
    s = args.s or 3
    consts = landau_constants()
    rec = OutputRecord(
        "lemma3",
        {"X": args.X, "Y": args.Y, "eta": args.eta, "C": args.C, "s": s},
        [
            "X", "Y", "lhs", "main_term", "lhs_over_main", "lhs_over_CL_XY",
            "error_integral", "error_over_XY_log2X", "double_sum", "s1_bound",
        ],
    )
    for X in _floats(args.X):
        if args.Y is not None:
            Y = args.Y
        else:
            Y = AverageConfig(X, s, eta=args.eta, C=args.C).Y
        table = PsiTable.build(max(2, math.ceil(X * max(1, math.ceil(Y) - 1))))
        lhs = lemma3_lhs(table, X, Y)
        main = lemma3_main_term(consts, X, Y)
        err = lemma3_error_integral(table, X, Y, s)
        rec.rows.append([
            _number(X), _number(Y), lhs, main,
            lhs / main if main else None,
            lhs / (consts.C_L * X * Y),
            err,
            err / (X * Y / math.log(X) ** 2),
            theorem1_double_sum(table, X, s, Y),
            s1_partial_summation_bound(table, X, s, Y),
        ])
    rec.summary = {"C_L": consts.C_L, "c3": consts.c3}
    return rec


def cmd_landau(args) -> OutputRecord:
    xs = [int(x) for x in _floats(args.X)] if args.X else [10**4, 10**5]
    consts = landau_constants()
    rec = OutputRecord("landau", {"x": xs}, ["x", "partial_sum", "predicted", "difference", "centered"])
    for x in xs:
        c = landau_sum(x, consts)
        rec.rows.append([x, c.partial_sum, c.predicted, c.difference, c.partial_sum - consts.C_L * math.log(x)])
    rec.summary = {
        "C_L": consts.C_L,
        "c3": consts.c3,
        "gamma": consts.gamma,
        "prime_correction": consts.prime_correction,
        "prime_bound": consts.prime_bound,
    }
    return rec


def cmd_verify(args) -> OutputRecord:
    results = run_checks(seed=args.seed, threads=args.threads)
    rec = OutputRecord(
        "verify",
        {"seed": args.seed},
        ["check", "passed", "detail"],
        [[r.name, r.passed, r.detail] for r in results],
    )
    rec.summary = {"failed": sum(not r.passed for r in results)}
    return rec


COMMANDS = {
    "local": (cmd_local, "local densities and alpha bounds over primes <= --prime-limit",
              "columns: p, m, value_set_size, density, alpha, alpha_capped, density_exact"),
    "bound": (cmd_bound, "lower bound on log(1/delta_k) for one k (exact mode when --coeffs given)",
              "columns: p, term; summary: k, s, Z, log_inv_density_lower, density_upper, "
              "conditional_reference, contributing_primes. Default R is 4."),
    "scan": (cmd_scan, "boxed lower count and residue-sieve upper count on [1, N]",
             "columns: n, witness (';'-joined vector); summary: represented_count, lower_density(_exact), "
             "sieve_admissible_count, sieve_upper_density(_exact), sieve_modulus, aligned, consistent"),
    "average": (cmd_average, "average of the per-k bound over 1 <= k < X, swept over --X a,b,...",
                "columns: X, prime_limit, average, reference, normalized (with --per-k: X, k, "
                "log_inv_density_lower). Default R is 1 and prime limit ceil(X^1.5)."),
    "lemma3": (cmd_lemma3, "sum of psi(mX; m, 1), its main term, and the error integral",
               "columns: X, Y, lhs, main_term, lhs_over_main, lhs_over_CL_XY, error_integral, "
               "error_over_XY_log2X, double_sum, s1_bound"),
    "landau": (cmd_landau, "partial sums of 1/phi(n) against Landau's main term",
               "columns: x, partial_sum, predicted, difference, centered (= partial_sum - C_L log x)"),
    "verify": (cmd_verify, "run the property suite; exit 1 on any violation",
               "columns: check, passed, detail; summary: failed"),
}


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("DIAGDENSITY_THREADS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--coeffs", help="comma separated coefficients a1,a2,...")
    common.add_argument("--k", type=int, help="exponent")
    common.add_argument("--s", type=int, help="number of variables (alpha mode)")
    common.add_argument("--prime-limit", type=int)
    common.add_argument("--p-min", type=int, default=2)
    common.add_argument("--R", type=float, help="cutoff divisor, Z = k^(1+1/(s-1))/R")
    common.add_argument("--mode", choices=("alpha", "exact"))
    common.add_argument("--N", type=int)
    common.add_argument("--B", type=int)
    common.add_argument("--sieve-primes", help="comma separated primes for the residue sieve")
    common.add_argument("--X", help="value or comma separated sweep")
    common.add_argument("--Y", type=float)
    common.add_argument("--eta", type=float)
    common.add_argument("--C", type=float, default=2.0, help="eta = C/log X when --eta and --Y are absent")
    common.add_argument("--per-k", action="store_true")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="write data here instead of stdout")
    common.add_argument("--threads", type=int, default=_default_threads())
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="diagdensity", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text, epilog) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text, epilog=epilog)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    try:
        record = COMMANDS[args.command][0](args)
    except ResourceError as exc:
        print(f"diagdensity: {exc}", file=sys.stderr)
        return 3
    except (ValueError, ArithmeticError) as exc:
        sub.print_usage(sys.stderr)
        print(f"diagdensity {args.command}: error: {exc}", file=sys.stderr)
        return 2
    text = render(record, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "verify" and record.summary["failed"]:
        return 1
    return 0


def main() -> None:
    sys.exit(run())
