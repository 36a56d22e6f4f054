"""Command-line interface: ``solve``, ``gen`` and ``bench``.

Exit codes: 0 success, 1 check failure (infeasible output, ratio below its
certified bound, failed trace audit, solver error), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .binary_solver import solve_binary
from .errors import InstanceFormatError, InvalidLambda, InvalidSpec, MupackError
from .exact import brute_force, plain_greedy
from .harness import instance_file
from .harness.bench import SOLVERS, BenchCase, BenchOptions, emit_report, run_bench
from .harness.generate import FAMILIES, OBJECTIVES, GeneratorSpec, generate
from .instance import is_feasible
from .mu_solver import LambdaPolicy, Solution, solve_general
from .sparse_solver import solve_sparse

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


def _policy(args) -> LambdaPolicy:
    try:
        return LambdaPolicy.parse(args.lambda_policy, args.epsilon)
    except (InvalidLambda, ValueError) as exc:
        raise _UsageError(str(exc)) from None


def trace_json(trace) -> str:
    """Trace as JSON with 1-based element numbers, matching instance files."""
    d = trace.to_dict()
    for step in d["steps"]:
        step["element"] += 1
    return json.dumps(d, sort_keys=True, indent=1)


def _cmd_solve(args) -> int:
    inst, obj = instance_file.load(args.instance)
    policy = _policy(args)
    lam = policy.value if policy.kind == "explicit" else None
    trace = None
    if args.solver == "general":
        sol, trace = solve_general(inst, obj, policy)
    elif args.solver == "binary":
        sol, trace = solve_binary(inst, obj, lam)
    elif args.solver == "sparse":
        sol, trace = solve_sparse(inst, obj, lam)
    elif args.solver == "greedy":
        sol = plain_greedy(inst, obj)
    else:
        res = brute_force(inst, obj)
        sol = Solution(res.optimum_set, res.optimum_value, is_feasible(inst, res.optimum_set), res.subsets_examined)
    if args.trace:
        if trace is None:
            raise _UsageError(f"solver {args.solver!r} produces no trace")
        Path(args.trace).write_text(trace_json(trace) + "\n", encoding="utf-8")
    out = sys.stdout
    out.write(f"solver: {args.solver}\n")
    out.write("chosen: [" + ", ".join(str(j + 1) for j in sol.sorted_elements()) + "]\n")
    out.write(f"value: {sol.objective_value!r}\n")
    out.write(f"feasible: {'true' if sol.feasible else 'false'}\n")
    out.write(f"oracle_calls: {sol.oracle_calls}\n")
    if trace is not None and hasattr(trace, "termination"):
        out.write(f"termination: {trace.termination}\n")
    return EXIT_OK if sol.feasible else EXIT_CHECK


def _cmd_gen(args) -> int:
    try:
        specs = [
            GeneratorSpec(
                family=args.family,
                n=args.n,
                m=args.m,
                objective=args.objective,
                seed=args.seed + i,
                k=args.k,
                width_target=args.width_target,
                capacity=args.capacity,
            )
            for i in range(args.count)
        ]
    except InvalidSpec as exc:
        raise _UsageError(str(exc)) from None
    if args.count == 1:
        inst, obj = generate(specs[0])
        text = instance_file.dumps(inst, obj)
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return EXIT_OK
    if not args.out:
        raise _UsageError("--count > 1 needs --out DIR")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for spec in specs:
        instance_file.dump(out / f"{spec.name}.yaml", *generate(spec))
    return EXIT_OK


def load_suite(directory: str | Path) -> list[BenchCase]:
    """Every ``*.yaml`` file in the directory, ordered by file name."""
    d = Path(directory)
    if not d.is_dir():
        raise _UsageError(f"suite directory {d} does not exist")
    cases = []
    for path in sorted(d.glob("*.yaml")):
        inst, obj = instance_file.load(path)
        cases.append(BenchCase(path.stem, inst, obj))
    return cases


def _cmd_bench(args) -> int:
    solvers = [s.strip() for s in args.solvers.split(",") if s.strip()]
    bad = [s for s in solvers if s not in SOLVERS]
    if bad or not solvers:
        raise _UsageError(f"unknown solvers {bad}; expected a comma-separated subset of {SOLVERS}")
    options = BenchOptions(
        policy=_policy(args),
        check_claims=args.check_claims,
        with_opt=args.with_opt,
        timing=args.timing,
    )
    report = run_bench(load_suite(args.suite), solvers, options)
    data = emit_report(report, args.format)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return EXIT_OK if report.ok else EXIT_CHECK


def _add_policy_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--lambda-policy",
        default="general",
        help="general | large-width | explicit:X (default: general)",
    )
    p.add_argument("--epsilon", type=float, default=None, help="accuracy for large-width, in (0, 0.25]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mupack", description="Submodular maximization under packing constraints."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance file")
    p.add_argument("--instance", required=True)
    p.add_argument("--solver", choices=SOLVERS, default="general")
    _add_policy_args(p)
    p.add_argument("--trace", help="write the solver trace as JSON to this path")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("gen", help="generate seeded instance files")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--objective", choices=OBJECTIVES, default="modular")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, help="column sparsity for binary-sparse")
    p.add_argument("--width-target", type=float, help="minimum width for wide")
    p.add_argument("--capacity", type=int, help="base capacity for binary-sparse")
    p.add_argument("--count", type=int, default=1, help="instances with seeds seed..seed+count-1")
    p.add_argument("--out", help="output file (or directory when --count > 1); stdout if omitted")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("bench", help="run solvers over a directory of instance files")
    p.add_argument("--suite", required=True, help="directory of *.yaml instance files")
    p.add_argument("--solvers", default="general,exact", help="comma-separated solver names")
    p.add_argument("--format", choices=("csv", "human"), default="csv")
    p.add_argument("--check-claims", action="store_true", help="audit traces against brute-forced optima")
    p.add_argument("--with-opt", action="store_true", help="brute-force optima for ratio columns")
    p.add_argument("--timing", action="store_true", help="fill time_ms (makes output run-dependent)")
    _add_policy_args(p)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (_UsageError, InstanceFormatError, InvalidSpec, InvalidLambda, OSError) as exc:
        print(f"mupack: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MupackError as exc:
        print(f"mupack: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
