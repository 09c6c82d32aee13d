"""The release gate: every criterion the built schemes must satisfy.

Each criterion audits concrete scheme instances by exact enumeration and
compares the results against the closed forms, at pinned tolerances
(exact rational equality for download cost and key usage, 1e-9 for
leakage values against nonzero targets, 1e-12 for exact-zero claims).
Criteria share one report cache, so overlapping parameter combinations
are enumerated only once per runner.
"""

from __future__ import annotations

import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

from .audit import DEFAULT_STATE_CAP, LEAK_TOL, ZERO_LEAK_TOL, AuditReport, audit_scheme
from .schemes import SchemeParams, make_scheme
from .tradeoff import (
    capacity_alpha,
    d_min_individual,
    d_min_total,
    d_min_zero,
    rho_min_total,
    specialized_budgets,
    thresholds,
)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str


TSC_CASES = ((3, 3, 2), (2, 2, 2))
SPIR_CASES = ((2, 2, 2), (3, 2, 2), (2, 3, 3))
WSPIR_CASES = ((2, 3, 3), (3, 3, 2), (2, 3, 2))
MIXED_TOTAL_CASES = ((2, 2, 2), (3, 3, 2))
MIXED_INDIVIDUAL_CASES = ((2, 3, 3), (3, 3, 2))
EQUIVALENCE_SYSTEMS = ((2, 2), (2, 3), (3, 3), (4, 2))

_TOTAL_FRACTIONS = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))
_INDIVIDUAL_FRACTIONS = (Fraction(1, 4), Fraction(1, 2), Fraction(1))


def total_budget_grid(n: int, k: int) -> tuple[Fraction, ...]:
    s_t, _ = thresholds(n, k)
    return tuple(s_t * f for f in _TOTAL_FRACTIONS)


def individual_budget_grid(n: int, k: int) -> tuple[Fraction, ...]:
    _, w_t = thresholds(n, k)
    return tuple(w_t * f for f in _INDIVIDUAL_FRACTIONS)


def _close(value: float, target: Fraction, tolerance: float) -> bool:
    return abs(value - float(target)) <= tolerance


class AcceptanceRunner:
    """Runs the criteria against freshly audited schemes, caching reports."""

    def __init__(self, cap: int = DEFAULT_STATE_CAP, threads: int = 1):
        self.cap = cap
        self.threads = threads
        self._reports: dict = {}

    def report(
        self, scheme: str, n: int, k: int, q: int, budget: Optional[Fraction] = None
    ) -> AuditReport:
        key = (scheme, n, k, q, budget)
        if key not in self._reports:
            params = SchemeParams(scheme, n, k, q, budget)
            self._reports[key] = audit_scheme(params, cap=self.cap, threads=self.threads)
        return self._reports[key]

    # -- criteria ----------------------------------------------------------

    def check_tsc_reference(self) -> CriterionResult:
        """Plain-branch scheme reproduces its stated cost and leakage."""
        failures = []
        report = self.report("tsc", 3, 3, 2)
        if not _close(report.total_leakage, Fraction(4, 9), LEAK_TOL):
            failures.append(f"total leakage {report.total_leakage!r} != 4/9")
        if any(not _close(v, Fraction(1, 9), LEAK_TOL) for v in report.individual_leakage):
            failures.append(f"individual leakage {report.individual_leakage!r} != 1/9")
        if report.download_achieved != Fraction(26, 9):
            failures.append(f"download {report.download_achieved} != 26/9")
        if report.rho_achieved != 0:
            failures.append(f"rho {report.rho_achieved} != 0")
        if not report.privacy_exact:
            failures.append("privacy not exact")
        if not report.correctness:
            failures.append("decoding failed somewhere")
        small = self.report("tsc", 2, 2, 2)
        if small.download_achieved != Fraction(3, 2):
            failures.append(f"download {small.download_achieved} != 3/2 at n=k=q=2")
        if not _close(small.total_leakage, Fraction(1, 2), LEAK_TOL):
            failures.append(f"total leakage {small.total_leakage!r} != 1/2 at n=k=q=2")
        if any(not _close(v, Fraction(1, 2), LEAK_TOL) for v in small.individual_leakage):
            failures.append(f"individual {small.individual_leakage!r} != 1/2 at n=k=q=2")
        return self._result(1, "tsc-reference", failures, "total=4/9 individual=1/9 D=26/9")

    def check_spir_reference(self) -> CriterionResult:
        """Keyed scheme leaks nothing and pays D=n at rho=1/(n-1)."""
        failures = []
        for n, k, q in SPIR_CASES:
            report = self.report("spir", n, k, q)
            if report.total_leakage > ZERO_LEAK_TOL:
                failures.append(f"({n},{k},{q}): total leakage {report.total_leakage!r} > 0")
            if any(v > ZERO_LEAK_TOL for v in report.individual_leakage):
                failures.append(f"({n},{k},{q}): individual leakage not zero")
            if report.download_achieved != n:
                failures.append(f"({n},{k},{q}): download {report.download_achieved} != {n}")
            if report.rho_achieved != Fraction(1, n - 1):
                failures.append(f"({n},{k},{q}): rho {report.rho_achieved} != 1/{n - 1}")
        return self._result(2, "spir-reference", failures, "leakage=0 D=n rho=1/(n-1)")

    def check_wspir_cases(self) -> CriterionResult:
        """All three alphabet cases leak nothing per message at rate 1-1/n."""
        failures = []
        for n, k, q in WSPIR_CASES:
            report = self.report("wspir", n, k, q)
            if any(v > ZERO_LEAK_TOL for v in report.individual_leakage):
                failures.append(
                    f"({n},{k},{q}): individual leakage {report.individual_leakage!r} > 0"
                )
            if report.rho_achieved != 0:
                failures.append(f"({n},{k},{q}): rho {report.rho_achieved} != 0")
            rate = Fraction(report.length) / report.download_achieved
            if rate != 1 - Fraction(1, n):
                failures.append(f"({n},{k},{q}): rate {rate} != 1-1/{n}")
        return self._result(3, "wspir-cases", failures, "individual=0 rho=0 rate=1-1/n")

    def check_mixed_total_pareto(self) -> CriterionResult:
        """Mixture hits leakage budget, optimal download, and least key use."""
        failures = []
        for n, k, q in MIXED_TOTAL_CASES:
            for s in total_budget_grid(n, k):
                report = self.report("mixed-total", n, k, q, s)
                if not _close(report.total_leakage, s, LEAK_TOL):
                    failures.append(f"({n},{k},{q}) s={s}: leakage {report.total_leakage!r}")
                expected = d_min_total(n, k, report.length, s, rho=Fraction(1)).d_min
                if report.download_achieved != expected:
                    failures.append(
                        f"({n},{k},{q}) s={s}: download {report.download_achieved} != {expected}"
                    )
                if report.rho_achieved != rho_min_total(n, k, s):
                    failures.append(f"({n},{k},{q}) s={s}: rho {report.rho_achieved}")
        return self._result(4, "mixed-total-pareto", failures, "leakage=s D and rho optimal")

    def check_mixed_individual_pareto(self) -> CriterionResult:
        """Per-message mixture hits its budget without shared randomness."""
        failures = []
        for n, k, q in MIXED_INDIVIDUAL_CASES:
            for w in individual_budget_grid(n, k):
                report = self.report("mixed-individual", n, k, q, w)
                if not _close(max(report.individual_leakage), w, LEAK_TOL):
                    failures.append(
                        f"({n},{k},{q}) w={w}: individual {report.individual_leakage!r}"
                    )
                expected = d_min_individual(n, k, report.length, w, rho=Fraction(1)).d_min
                if report.download_achieved != expected:
                    failures.append(
                        f"({n},{k},{q}) w={w}: download {report.download_achieved} != {expected}"
                    )
                if report.rho_achieved != 0:
                    failures.append(f"({n},{k},{q}) w={w}: rho {report.rho_achieved} != 0")
        # With two messages the scheme must degenerate to the total-leakage
        # mixture point for point, budget for budget.
        for w in total_budget_grid(2, 2):
            mixed = self.report("mixed-individual", 2, 2, 2, w)
            total = self.report("mixed-total", 2, 2, 2, w)
            if mixed.download_achieved != total.download_achieved:
                failures.append(f"k=2 w={w}: download diverges from mixed-total")
            if mixed.rho_achieved != total.rho_achieved:
                failures.append(f"k=2 w={w}: rho diverges from mixed-total")
            if abs(mixed.total_leakage - total.total_leakage) > ZERO_LEAK_TOL:
                failures.append(f"k=2 w={w}: leakage diverges from mixed-total")
            if not _close(mixed.total_leakage, w, LEAK_TOL):
                failures.append(f"k=2 w={w}: leakage {mixed.total_leakage!r} != budget")
        return self._result(
            5, "mixed-individual-pareto", failures, "individual=w D optimal rho=0"
        )

    def check_leakage_equivalence(self) -> CriterionResult:
        """Total budget (1+n+...+n^(k-2))*w buys the same download as w."""
        failures = []
        for n, k in EQUIVALENCE_SYSTEMS:
            _, w_t = thresholds(n, k)
            ratio = Fraction(n ** (k - 1) - 1, n - 1)
            length = n - 1
            for step in range(5):
                w = w_t * Fraction(step, 4)
                total_point = d_min_total(n, k, length, ratio * w, rho=Fraction(1))
                single_point = d_min_individual(n, k, length, w, rho=Fraction(1))
                if total_point.d_min != single_point.d_min:
                    failures.append(
                        f"(n={n},k={k}) w={w}: {total_point.d_min} != {single_point.d_min}"
                    )
        return self._result(6, "leakage-equivalence", failures, "exact over 4 systems x 5 budgets")

    def check_capacity_staircase(self) -> CriterionResult:
        """Both tradeoff curves meet the budget-family capacity exactly."""
        failures = []
        for n, k in EQUIVALENCE_SYSTEMS:
            length = n - 1
            if capacity_alpha(n, k - 1) != Fraction(length) / d_min_zero(n, k, length):
                failures.append(f"(n={n},k={k}): alpha={k - 1} misses the no-budget capacity")
            for alpha in (k - 1, k, k + 1):
                s, w = specialized_budgets(n, k, alpha)
                expected = capacity_alpha(n, alpha)
                total_cap = d_min_total(n, k, length, s, rho=Fraction(1)).capacity
                single_cap = d_min_individual(n, k, length, w, rho=Fraction(1)).capacity
                if total_cap != expected or single_cap != expected:
                    failures.append(
                        f"(n={n},k={k}) alpha={alpha}: {total_cap}, {single_cap} != {expected}"
                    )
        return self._result(7, "capacity-staircase", failures, "exact for alpha in {k-1,k,k+1}")

    def _all_audited_combos(self):
        for n, k, q in TSC_CASES:
            yield "tsc", n, k, q, None
        for n, k, q in SPIR_CASES:
            yield "spir", n, k, q, None
        for n, k, q in WSPIR_CASES:
            yield "wspir", n, k, q, None
        for n, k, q in MIXED_TOTAL_CASES:
            for s in total_budget_grid(n, k):
                yield "mixed-total", n, k, q, s
        for n, k, q in MIXED_INDIVIDUAL_CASES:
            for w in individual_budget_grid(n, k):
                yield "mixed-individual", n, k, q, w
        for w in total_budget_grid(2, 2):
            yield "mixed-individual", 2, 2, 2, w

    def check_privacy_correctness(self) -> CriterionResult:
        """Every audited combination is exactly private and fully decodable."""
        failures = []
        for scheme, n, k, q, budget in self._all_audited_combos():
            report = self.report(scheme, n, k, q, budget)
            if not report.privacy_exact:
                failures.append(f"{scheme}({n},{k},{q},{budget}): per-database views differ")
            if not report.correctness:
                failures.append(f"{scheme}({n},{k},{q},{budget}): decoding failed")
        return self._result(
            8, "privacy-correctness", failures, "exact privacy, 100% decoding"
        )

    def check_message_size(self) -> CriterionResult:
        """Message length is n-1, doubled only in the binary two-database corner."""
        failures = []
        expectations = [
            (SchemeParams("tsc", 3, 3, 2), 2),
            (SchemeParams("tsc", 2, 2, 2), 1),
            (SchemeParams("spir", 4, 2, 2), 3),
            (SchemeParams("wspir", 2, 3, 3), 1),
            (SchemeParams("wspir", 3, 3, 2), 2),
            (SchemeParams("wspir", 2, 3, 2), 2),
            (SchemeParams("mixed-total", 3, 3, 2, Fraction(1, 9)), 2),
            (SchemeParams("mixed-individual", 2, 3, 3, Fraction(1, 8)), 1),
            (SchemeParams("mixed-individual", 2, 3, 2, Fraction(1, 8)), 2),
            (SchemeParams("mixed-individual", 2, 4, 2, Fraction(1, 16)), 2),
        ]
        for params, expected in expectations:
            length = make_scheme(params).length
            if length != expected:
                failures.append(f"{params}: length {length} != {expected}")
        return self._result(9, "message-size", failures, "length n-1 (or 2 in the q=n=2 corner)")

    def check_sweep_determinism(self) -> CriterionResult:
        """Identical sweep configurations produce byte-identical CSV files."""
        from .cli import sweep_csv  # local import to keep cli optional here

        grid = [Fraction(0), Fraction(1, 8), Fraction(1, 4), Fraction(3, 8), Fraction(1, 2)]
        failures = []
        with tempfile.TemporaryDirectory() as tmp:
            paths = [Path(tmp) / "first.csv", Path(tmp) / "second.csv"]
            for path in paths:
                text = sweep_csv("mixed-total", 2, 2, 2, grid, cap=self.cap, threads=self.threads)
                path.write_bytes(text.encode("ascii"))
            first, second = (path.read_bytes() for path in paths)
        if first != second:
            failures.append("two identical sweep runs produced different bytes")
        return self._result(10, "sweep-determinism", failures, f"{len(first)} bytes, identical")

    # -- plumbing ------------------------------------------------------------

    def _result(self, number: int, name: str, failures: list, summary: str) -> CriterionResult:
        if failures:
            return CriterionResult(number, name, False, "; ".join(failures))
        return CriterionResult(number, name, True, summary)

    def run_all(self) -> list[CriterionResult]:
        return [check(self) for _, _, check in CRITERIA]

    def run(self, name: str) -> CriterionResult:
        for _, slug, check in CRITERIA:
            if slug == name:
                return check(self)
        raise KeyError(f"unknown criterion {name!r}")


CRITERIA: tuple[tuple[int, str, Callable[[AcceptanceRunner], CriterionResult]], ...] = (
    (1, "tsc-reference", AcceptanceRunner.check_tsc_reference),
    (2, "spir-reference", AcceptanceRunner.check_spir_reference),
    (3, "wspir-cases", AcceptanceRunner.check_wspir_cases),
    (4, "mixed-total-pareto", AcceptanceRunner.check_mixed_total_pareto),
    (5, "mixed-individual-pareto", AcceptanceRunner.check_mixed_individual_pareto),
    (6, "leakage-equivalence", AcceptanceRunner.check_leakage_equivalence),
    (7, "capacity-staircase", AcceptanceRunner.check_capacity_staircase),
    (8, "privacy-correctness", AcceptanceRunner.check_privacy_correctness),
    (9, "message-size", AcceptanceRunner.check_message_size),
    (10, "sweep-determinism", AcceptanceRunner.check_sweep_determinism),
)
