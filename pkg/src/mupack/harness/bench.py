"""Benchmark runner: solve, compare against brute force, audit traces, report."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field

from ..binary_solver import solve_binary, theoretical_ratio_binary
from ..errors import MupackError
from ..exact import MAX_BRUTE_FORCE_N, ExactResult, brute_force, plain_greedy
from ..instance import BinaryPackingInstance, PackingInstance, is_feasible
from ..mu_solver import (
    LambdaPolicy,
    solve_general,
    theoretical_ratio_general,
    theoretical_ratio_large_width,
)
from ..objective import SubmodularObjective
from ..sparse_solver import solve_sparse, theoretical_ratio_sparse
from . import claims

SOLVERS = ("general", "binary", "sparse", "exact", "greedy")
WEIGHTED_SOLVERS = ("general", "binary", "sparse")
CSV_COLUMNS = (
    "instance_id",
    "solver",
    "value",
    "opt",
    "ratio",
    "bound",
    "feasible",
    "oracle_calls",
    "time_ms",
    "claim_checks",
)


def oracle_budget(n: int, m: int) -> int:
    """Polynomial ceiling on oracle calls asserted for every solver run."""
    return 4 * n * n * m + 4 * n


@dataclass(frozen=True)
class BenchCase:
    instance_id: str
    instance: PackingInstance
    objective: SubmodularObjective


@dataclass(frozen=True)
class BenchOptions:
    policy: LambdaPolicy = field(default_factory=LambdaPolicy.general)
    check_claims: bool = False
    with_opt: bool = False
    timing: bool = False


@dataclass
class BenchRow:
    instance_id: str
    solver: str
    n: int
    m: int
    value: float | None = None
    opt: float | None = None
    bound: float | None = None
    feasible: bool = False
    oracle_calls: int = 0
    time_ms: float | None = None
    checks: dict[str, bool | None] = field(default_factory=dict)
    error: str | None = None

    @property
    def ratio(self) -> float | None:
        if self.value is None or self.opt is None or not self.opt > 0:
            return None
        return self.value / self.opt

    @property
    def within_budget(self) -> bool:
        return self.solver not in WEIGHTED_SOLVERS or self.oracle_calls <= oracle_budget(self.n, self.m)

    @property
    def certified(self) -> bool:
        r = self.ratio
        return self.bound is None or r is None or r >= self.bound

    @property
    def passed(self) -> bool:
        return (
            self.error is None
            and self.feasible
            and self.certified
            and self.within_budget
            and all(v is not False for v in self.checks.values())
        )

    def claim_field(self) -> str:
        if self.error is not None:
            return f"error={self.error}"
        parts = [f"{k}={'skip' if v is None else 'pass' if v else 'fail'}" for k, v in self.checks.items()]
        if not self.within_budget:
            parts.append("budget=fail")
        return ";".join(parts)


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def failures(self) -> list[BenchRow]:
        return [r for r in self.rows if not r.passed]


def _bound_for(solver: str, inst: PackingInstance, options: BenchOptions) -> float | None:
    policy = options.policy
    if solver == "exact":
        return 1.0
    if solver == "greedy" or policy.kind == "explicit":
        return None
    if solver == "general":
        if policy.kind == "large-width":
            return theoretical_ratio_large_width(policy.epsilon)
        return theoretical_ratio_general(inst)
    binary = BinaryPackingInstance.from_instance(inst)
    return theoretical_ratio_binary(binary) if solver == "binary" else theoretical_ratio_sparse(binary)


def _run_one(case: BenchCase, solver: str, options: BenchOptions, exact: ExactResult | None) -> BenchRow:
    inst, obj = case.instance, case.objective
    row = BenchRow(case.instance_id, solver, inst.n, inst.m)
    if exact is not None:
        row.opt = exact.optimum_value
    lam = options.policy.value if options.policy.kind == "explicit" else None
    start = time.perf_counter()
    try:
        row.bound = _bound_for(solver, inst, options)
        trace = None
        if solver == "general":
            sol, trace = solve_general(inst, obj, options.policy)
        elif solver == "binary":
            sol, trace = solve_binary(inst, obj, lam)
        elif solver == "sparse":
            sol, trace = solve_sparse(inst, obj, lam)
        elif solver == "greedy":
            sol = plain_greedy(inst, obj)
        elif solver == "exact":
            if exact is None:
                raise MupackError("exact optimum unavailable for this instance")
            sol = None
        else:
            raise ValueError(f"unknown solver {solver!r}")
    except MupackError as exc:
        row.error = type(exc).__name__
        return row
    elapsed = time.perf_counter() - start
    if options.timing:
        row.time_ms = elapsed * 1000.0
    if sol is None:
        row.value = exact.optimum_value
        row.feasible = is_feasible(inst, exact.optimum_set)
        row.oracle_calls = exact.subsets_examined
    else:
        row.value = sol.objective_value
        row.feasible = sol.feasible
        row.oracle_calls = sol.oracle_calls
    if options.check_claims and exact is not None and trace is not None:
        if solver == "sparse":
            row.checks["c4"] = claims.chosen_count_bound(trace)
            row.checks["c5"] = claims.optimum_count_bound(trace, exact.optimum_set)
        else:
            row.checks["c1"] = claims.telescoping_bound(trace, exact.optimum_value)
            row.checks["c2"] = claims.optimum_bound(trace, exact.optimum_value)
    return row


def run_bench(cases: list[BenchCase], solvers: list[str], options: BenchOptions | None = None) -> BenchReport:
    """Run every solver on every case, in input order.

    The exact optimum is computed (for ``n <= 24``) when ``exact`` is among
    the solvers, or when ``with_opt`` or ``check_claims`` is set.
    """
    options = options or BenchOptions()
    for s in solvers:
        if s not in SOLVERS:
            raise ValueError(f"unknown solver {s!r}; expected one of {SOLVERS}")
    want_opt = options.with_opt or options.check_claims or "exact" in solvers
    report = BenchReport()
    for case in cases:
        exact = None
        if want_opt and case.instance.n <= MAX_BRUTE_FORCE_N:
            exact = brute_force(case.instance, case.objective)
        for s in solvers:
            report.rows.append(_run_one(case, s, options, exact))
    return report


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def _cells(row: BenchRow) -> list[str]:
    return [
        row.instance_id,
        row.solver,
        _fmt(row.value),
        _fmt(row.opt),
        _fmt(row.ratio),
        _fmt(row.bound),
        "true" if row.feasible else "false",
        str(row.oracle_calls),
        "" if row.time_ms is None else f"{row.time_ms:.3f}",
        row.claim_field(),
    ]


def emit_report(report: BenchReport, fmt: str = "csv") -> bytes:
    """Serialize the report as CSV or as an aligned text table."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in report.rows:
            writer.writerow(_cells(row))
        return buf.getvalue().encode("utf-8")
    if fmt != "human":
        raise ValueError(f"unknown report format {fmt!r}")
    table = [list(CSV_COLUMNS)] + [_cells(r) for r in report.rows]
    for line in table[1:]:
        for i in (2, 3, 4, 5):
            if line[i]:
                line[i] = f"{float(line[i]):.6g}"
    widths = [max(len(line[i]) for line in table) for i in range(len(CSV_COLUMNS))]
    out = []
    for k, line in enumerate(table):
        out.append("  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip())
        if k == 0:
            out.append("  ".join("-" * w for w in widths))
    failed = len(report.failures)
    out.append(f"{len(report.rows)} rows, {failed} failed")
    return ("\n".join(out) + "\n").encode("utf-8")
