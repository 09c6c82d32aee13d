"""Command-line front end: audit one scheme, sweep a budget grid, or verify.

Exit codes: 0 success, 1 verification mismatch, 2 parameter error,
3 state cap exceeded.  Leakage budgets cross the boundary as exact
"num/den" strings; the default state cap can be overridden with the
PIR_LAB_CAP environment variable or the --cap flag.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .acceptance import AcceptanceRunner, CRITERIA
from .audit import (
    DEFAULT_STATE_CAP,
    AuditReport,
    audit_scheme,
    format_fraction,
    format_real,
)
from .errors import ParameterError, StateCapError, VerificationError
from .schemes import SCHEME_IDS, SchemeParams

_FRACTION_RE = re.compile(r"-?\d+(/\d+)?")

SWEEP_HEADER = "budget,D_achieved,D_theory,leak_achieved,leak_budget,rho_achieved,rho_theory"


def parse_fraction(text: str) -> Fraction:
    """Parse an exact rational of the form "num/den" or a bare integer."""
    if not _FRACTION_RE.fullmatch(text.strip()):
        raise ParameterError(
            f"expected an exact rational like 3/4, got {text!r} (floats are not accepted)"
        )
    return Fraction(text.strip())


def parse_grid(text: str) -> list[Fraction]:
    stripped = text.strip()
    if not stripped:
        return []
    return [parse_fraction(part) for part in stripped.split(",")]


def report_json(report: AuditReport) -> str:
    return json.dumps(report.to_json_dict(), indent=2) + "\n"


def _native_leakage(report: AuditReport) -> float:
    if report.leak_kind == "total":
        return report.total_leakage
    return max(report.individual_leakage)


def sweep_csv(
    scheme: str,
    n: int,
    k: int,
    q: int,
    grid: Sequence[Fraction],
    cap: int = DEFAULT_STATE_CAP,
    threads: int = 1,
) -> str:
    """Audit every grid budget and render the tradeoff curve as CSV text.

    Aborts with VerificationError at the first grid point whose audit
    disagrees with the closed forms, naming the point's index.
    """
    lines = [SWEEP_HEADER]
    for position, budget in enumerate(grid):
        params = SchemeParams(scheme, n, k, q, budget)
        try:
            report = audit_scheme(params, cap=cap, threads=threads)
        except ParameterError as exc:
            raise ParameterError(
                f"grid point {position} (budget {format_fraction(budget)}): {exc}"
            ) from exc
        if not report.matches_theory():
            raise VerificationError(
                f"grid point {position} (budget {format_fraction(budget)}): audited values "
                "disagree with the closed forms"
            )
        row = (
            budget,
            report.download_achieved,
            report.download_theory,
            _native_leakage(report),
            report.leakage_budget,
            report.rho_achieved,
            report.rho_theory,
        )
        lines.append(",".join(format_real(value) for value in row))
    return "\n".join(lines) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "wb") as handle:
            handle.write(text.encode("ascii"))


def _add_common(parser: argparse.ArgumentParser, with_scheme: bool) -> None:
    if with_scheme:
        parser.add_argument("--scheme", required=True, choices=SCHEME_IDS)
        parser.add_argument("--n", required=True, type=int, help="number of databases")
        parser.add_argument("--k", required=True, type=int, help="number of messages")
        parser.add_argument("--q", required=True, type=int, help="alphabet order")
        parser.add_argument("--budget", help="leakage budget as an exact rational p/q")
        parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--cap", type=int, help="state-count cap (default: PIR_LAB_CAP or 10^8)")
    parser.add_argument("--threads", type=int, help="enumeration workers (default: all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pir-lab",
        description="Exact leakage audits for multi-server private information retrieval schemes.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    audit = commands.add_parser("audit", help="audit one scheme and write a JSON report")
    _add_common(audit, with_scheme=True)
    audit.add_argument("--format", choices=("json", "csv"), default="json")

    sweep = commands.add_parser("sweep", help="audit a budget grid and write a CSV curve")
    _add_common(sweep, with_scheme=True)
    sweep.add_argument("--grid", required=True, help="comma-separated rational budgets")
    sweep.add_argument("--format", choices=("json", "csv"), default="csv")

    verify = commands.add_parser("verify", help="run the full acceptance suite")
    _add_common(verify, with_scheme=False)
    return parser


def _resolve_cap(value: Optional[int]) -> int:
    if value is not None:
        return value
    env = os.environ.get("PIR_LAB_CAP")
    return int(env) if env else DEFAULT_STATE_CAP


def _resolve_threads(value: Optional[int]) -> int:
    if value is not None:
        if value < 1:
            raise ParameterError(f"--threads must be positive, got {value}")
        return value
    return os.cpu_count() or 1


def _budget_from_args(args) -> Optional[Fraction]:
    if args.budget is None:
        return None
    return parse_fraction(args.budget)


def cmd_audit(args) -> int:
    if args.format != "json":
        raise ParameterError("audit reports are emitted as JSON; use --format json")
    params = SchemeParams(args.scheme, args.n, args.k, args.q, _budget_from_args(args))
    report = audit_scheme(
        params, cap=_resolve_cap(args.cap), threads=_resolve_threads(args.threads)
    )
    _emit(report_json(report), args.out)
    return 0 if report.matches_theory() else 1


def cmd_sweep(args) -> int:
    if args.format != "csv":
        raise ParameterError("sweep curves are emitted as CSV; use --format csv")
    if args.scheme not in ("mixed-total", "mixed-individual"):
        raise ParameterError("sweeps take a budget grid; only the mixed schemes accept one")
    if args.budget is not None:
        raise ParameterError("use --grid for sweeps, not --budget")
    grid = parse_grid(args.grid)
    text = sweep_csv(
        args.scheme,
        args.n,
        args.k,
        args.q,
        grid,
        cap=_resolve_cap(args.cap),
        threads=_resolve_threads(args.threads),
    )
    _emit(text, args.out)
    return 0


def cmd_verify(args) -> int:
    runner = AcceptanceRunner(cap=_resolve_cap(args.cap), threads=_resolve_threads(args.threads))
    results = runner.run_all()
    width = max(len(slug) for _, slug, _ in CRITERIA)
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status}  {result.number:>2}  {result.name:<{width}}  {result.detail}")
    passed = sum(result.passed for result in results)
    print(f"{passed}/{len(results)} criteria passed")
    return 0 if passed == len(results) else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"audit": cmd_audit, "sweep": cmd_sweep, "verify": cmd_verify}
    try:
        return handlers[args.command](args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except StateCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except VerificationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
