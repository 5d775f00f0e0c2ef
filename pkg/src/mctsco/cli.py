"""Command line front end: generate, solve, validate, bench.

Exit codes: 0 success, 1 validation failure or no feasible solution,
2 usage or input error, 3 internal error.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import bench, knapsack, problems, qcsp
from .engine import SearchParams

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _fmt_num(x) -> str:
    if isinstance(x, int):
        return str(x)
    return f"{float(x):.6f}"


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_generate(args) -> int:
    fam = args.family
    if args.n is None:
        raise UsageError("--n is required")
    if fam == "qcsp":
        if args.m is None:
            raise UsageError("--m is required for the qcsp family")
        text = qcsp.serialize_instance(qcsp.generate_instance(args.n, args.m, args.seed))
    elif fam == "spanner":
        if args.f is None:
            raise UsageError("--f is required for the spanner family")
        text = knapsack.serialize_instance(knapsack.gen_spanner(args.n, args.f, args.seed))
    else:
        c = args.c if args.c is not None else 10**10
        text = knapsack.serialize_instance(knapsack.gen_exp(args.n, args.seed, c=c))
    _emit(text, args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    problem, inst = problems.load(args.instance, args.problem)
    params = SearchParams(time_budget=args.time, beam_width=args.beam, seed=args.seed,
                          max_iterations=args.max_iterations)
    t0 = time.perf_counter()
    rep = problems.run(problem, inst, params)
    seconds = time.perf_counter() - t0
    if not rep.found:
        print(f"no feasible solution found after {rep.iterations} iterations", file=sys.stderr)
        return EXIT_FAIL
    out = args.out or str(args.instance) + ".sol"
    Path(out).write_text(problems.solution_text(problem, inst, rep))
    # wall-clock is left out in max-iterations mode so reruns are byte-identical
    secs = "" if args.max_iterations is not None else f"{seconds:.3f}"
    if args.header:
        print("objective,root_bound,gap_percent,seconds,iterations,exhausted")
    print(",".join([
        _fmt_num(rep.best_objective),
        _fmt_num(rep.root_bound),
        f"{problems.gap_percent(rep.best_objective, rep.root_bound):.6f}",
        secs,
        str(rep.iterations),
        "true" if rep.exhausted else "false",
    ]))
    return EXIT_OK


def cmd_validate(args) -> int:
    problem, inst = problems.load(args.instance, args.problem)
    result = problems.validate(problem, inst, Path(args.solution).read_text())
    for msg in result.messages:
        print(msg)
    if result.ok:
        print("ok")
        return EXIT_OK
    return EXIT_FAIL


def cmd_bench(args) -> int:
    path = Path(args.config)
    cfg = bench.parse_config(path.read_text(), base_dir=path.parent)
    if args.max_iterations is not None:
        cfg.max_iterations = args.max_iterations
    if args.runs is not None:
        cfg.runs = args.runs
    rows = bench.run_bench(cfg, jobs=args.jobs)
    _emit(bench.to_csv(rows), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mctsco", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random instance")
    g.add_argument("--family", choices=["qcsp", "spanner", "exp"], required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--f", type=float)
    g.add_argument("--c", type=int, help="capacity for the exp family (default 1e10)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="run the tree search on an instance")
    s.add_argument("instance")
    s.add_argument("--problem", choices=problems.PROBLEMS)
    s.add_argument("--time", type=float, default=10.0)
    s.add_argument("--beam", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-iterations", type=int)
    s.add_argument("--out", help="solution file (default: <instance>.sol)")
    s.add_argument("--header", action="store_true", help="print the CSV header first")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("validate", help="check a solution file against its instance")
    v.add_argument("instance")
    v.add_argument("solution")
    v.add_argument("--problem", choices=problems.PROBLEMS)
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("bench", help="seeded runs over a beam/time grid, CSV out")
    b.add_argument("config")
    b.add_argument("--out")
    b.add_argument("--runs", type=int)
    b.add_argument("--max-iterations", type=int)
    b.add_argument("--jobs", type=int, default=1)
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError, bench.ConfigError) as e:
        print(f"{parser.prog} {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:  # pragma: no cover - last resort
        print(f"{parser.prog} {args.command}: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
