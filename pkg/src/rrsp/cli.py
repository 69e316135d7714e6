"""``rrsp`` command line: solve, evaluate, approx, export-mip, generate, bench.

Exit codes: 0 success, 1 usage, 2 validation, 3 unsupported structure,
4 path cap exceeded, 5 I/O or external solver failure.  Results go to
stdout and timings to stderr, so stdout is deterministic.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import io as instio
from .errors import (
    AlphaZero,
    CycleDetected,
    DZero,
    Infeasible,
    InvalidInstance,
    LpParseError,
    NotSeriesParallel,
    SolverError,
    SolverUnavailable,
    TooManyPaths,
    UnsupportedStructure,
)
from .model import ContinuousBudget, DiscreteBudget

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_UNSUPPORTED, EXIT_CAPACITY, EXIT_IO = range(6)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _fmt(v):
    v = float(v)
    return str(int(v)) if v.is_integer() and abs(v) < 2 ** 53 else repr(v)


def _arcs(ids):
    return " ".join(str(e) for e in ids)


def _nodes(g, ids):
    if not ids:
        return ""
    names = [g.name(g.tails[ids[0]])] + [g.name(g.heads[e]) for e in ids]
    return " ".join(names)


def parse_path_spec(g, spec):
    """Arc ids (``"0,2"``) or node names joined by ``>`` (``"s>a>t"``).

    With node names, parallel arcs resolve to the smallest arc id.
    """
    spec = spec.strip()
    if ">" in spec:
        index = {g.name(v): v for v in range(g.n)}
        names = [p.strip() for p in spec.split(">")]
        ids = []
        for a, b in zip(names, names[1:]):
            if a not in index or b not in index:
                raise InvalidInstance(f"unknown node in path spec {spec!r}")
            u, v = index[a], index[b]
            cand = [e for e in g.out_arcs[u] if g.heads[e] == v]
            if not cand:
                raise InvalidInstance(f"no arc {a}->{b}")
            ids.append(min(cand))
        return tuple(ids)
    try:
        return tuple(int(p) for p in spec.replace(",", " ").split())
    except ValueError:
        raise InvalidInstance(f"bad path spec {spec!r}") from None


def _print_pair(g, label, ids):
    print(f"{label}: {_arcs(ids)}")
    print(f"{label}_nodes: {_nodes(g, ids)}")


# --------------------------------------------------------------------------
# subcommands

def cmd_solve(args):
    from .recsolve import solve

    inst = instio.load(args.file)
    workers = (args.workers or os.cpu_count() or 1) if args.parallel else None
    t0 = time.perf_counter()
    sol = solve(inst, args.method, workers=workers)
    elapsed = time.perf_counter() - t0
    g = inst.graph
    print(f"value: {_fmt(sol.value)}")
    print(f"method: {sol.method}")
    if "structure" in sol.info:
        print(f"structure: {sol.info['structure']}")
    _print_pair(g, "first_stage", sol.first_stage)
    _print_pair(g, "second_stage", sol.second_stage)
    print(f"wall_time: {elapsed:.6f} s", file=sys.stderr)
    return EXIT_OK


def cmd_evaluate(args):
    from .secondstage import evaluate_objective

    inst = instio.load(args.file)
    x = parse_path_spec(inst.graph, args.first_stage)
    t0 = time.perf_counter()
    ev = evaluate_objective(inst, x, cap=args.cap)
    elapsed = time.perf_counter() - t0
    g = inst.graph
    print(f"value: {_fmt(ev.value)}")
    print(f"method: {ev.method}")
    _print_pair(g, "first_stage", ev.first_stage)
    _print_pair(g, "recovery", ev.recovery)
    print(f"scenario: {' '.join(_fmt(c) for c in ev.scenario)}")
    print(f"wall_time: {elapsed:.6f} s", file=sys.stderr)
    return EXIT_OK


def cmd_approx(args):
    from .approx import approx_solve

    inst = instio.load(args.file)
    t0 = time.perf_counter()
    res = approx_solve(inst, cap=args.cap)
    elapsed = time.perf_counter() - t0
    g = inst.graph
    _print_pair(g, "first_stage", res.first_stage)
    _print_pair(g, "recovery", res.recovery)
    print(f"value: {_fmt(res.value)}")
    print(f"exact: {'yes' if res.exact else 'no (upper bound)'}")
    print(f"ratio: {_fmt(res.ratio)}")
    print(f"certificate: {res.certificate or 'none'}")
    for name in sorted(res.certificates):
        print(f"certificate_{name}: {_fmt(res.certificates[name])}")
    print(f"wall_time: {elapsed:.6f} s", file=sys.stderr)
    return EXIT_OK


def cmd_export_mip(args):
    from .mip import build_continuous_budget_mip, build_interval_mip, export_lp, run_external_solver

    inst = instio.load(args.file)
    kind = args.model
    if kind is None:
        if isinstance(inst.uncertainty, DiscreteBudget):
            raise UnsupportedStructure("no compact MIP for the discrete budget")
        kind = "cont-budget" if isinstance(inst.uncertainty, ContinuousBudget) else "interval"
    if kind == "interval":
        model = build_interval_mip(inst.interval_version())
    else:
        model = build_continuous_budget_mip(inst)
    export_lp(model, args.out)
    print(f"model: {model.name}")
    print(f"variables: {model.num_vars} ({model.num_binaries} binary)")
    print(f"rows: {len(model.rows)}")
    if args.solve:
        res = run_external_solver(model, args.solver_cmd, args.time_limit, model,
                                  inst if kind == "cont-budget" else inst.interval_version())
        print(f"objective: {_fmt(res.objective)}")
        if res.first_stage is not None:
            _print_pair(inst.graph, "first_stage", res.first_stage)
        if res.second_stage is not None:
            _print_pair(inst.graph, "second_stage", res.second_stage)
        print(f"valid: {'yes' if res.valid else 'no'}")
    return EXIT_OK


def cmd_generate(args):
    from .gen import GenParams, generate

    extra = {}
    for name in ("n", "arc_prob", "max_arcs", "layers", "width", "density", "leaves",
                 "series_bias", "parallel_prob"):
        value = getattr(args, name)
        if value is not None:
            extra[name] = value
    if args.k is not None:
        extra["k_range"] = (args.k, args.k)
    if args.budget is not None:
        b = int(args.budget) if args.uncertainty == "discrete" else args.budget
        extra["budget_range"] = (b, b)
    params = GenParams(family=args.family, seed=args.seed, neighborhood=args.neighborhood,
                       uncertainty=args.uncertainty, **extra)
    inst = generate(params)
    instio.dump(inst, args.out)
    print(f"wrote {args.out}: n={inst.graph.n} m={inst.m} k={inst.k} "
          f"kind={inst.neighborhood.value} uncertainty={inst.uncertainty.kind}")
    return EXIT_OK


def cmd_bench(args):
    from .bench import load_suite, run_suite, summarize, write_csv

    workers = (os.cpu_count() or 1) if args.parallel else None
    tasks = load_suite(args.suite, workers)
    t0 = time.perf_counter()
    rows = run_suite(tasks, args.workers)
    write_csv(rows, args.out)
    summary = summarize(rows)
    print(" ".join(f"{k}={v}" for k, v in summary.items()))
    print(f"wall_time: {time.perf_counter() - t0:.6f} s", file=sys.stderr)
    return EXIT_OK


# --------------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="rrsp", description="Recoverable robust shortest path solvers.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="exact Rec SP under interval uncertainty")
    s.add_argument("file")
    s.add_argument("--method", default="auto", choices=["auto", "layered", "acyclic", "asp", "oracle"])
    s.add_argument("--parallel", action="store_true", help="thread the detour construction")
    s.add_argument("--workers", type=int, default=None, help="threads used with --parallel")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("evaluate", help="F(X) for a given first-stage path")
    s.add_argument("file")
    s.add_argument("--first-stage", required=True, help="arc ids '0,2' or nodes 's>a>t'")
    s.add_argument("--cap", type=int, default=10_000, help="path enumeration cap")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("approx", help="approximation with ratio certificates")
    s.add_argument("file")
    s.add_argument("--cap", type=int, default=10_000)
    s.set_defaults(func=cmd_approx)

    s = sub.add_parser("export-mip", help="write the compact MIP as an LP file")
    s.add_argument("file")
    s.add_argument("--out", required=True)
    s.add_argument("--model", choices=["interval", "cont-budget"], default=None)
    s.add_argument("--solve", action="store_true", help="run the configured external solver")
    s.add_argument("--solver-cmd", default=None,
                   help="command template with {input} {output} {timelimit}; defaults to $RRSP_SOLVER_CMD")
    s.add_argument("--time-limit", type=float, default=60.0)
    s.set_defaults(func=cmd_export_mip)

    s = sub.add_parser("generate", help="write a seeded random instance")
    s.add_argument("--family", required=True, choices=["layered", "random_dag", "asp"])
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--arc-prob", type=float)
    s.add_argument("--max-arcs", type=int)
    s.add_argument("--layers", type=int)
    s.add_argument("--width", type=int)
    s.add_argument("--density", type=float)
    s.add_argument("--leaves", type=int)
    s.add_argument("--series-bias", type=float)
    s.add_argument("--parallel-prob", type=float)
    s.add_argument("--k", type=int)
    s.add_argument("--neighborhood", default="incl", choices=["incl", "excl", "sym", "random"])
    s.add_argument("--uncertainty", default="interval", choices=["interval", "discrete", "continuous"])
    s.add_argument("--budget", type=float)
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("bench", help="run a benchmark suite and write CSV")
    s.add_argument("--suite", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--workers", type=int, default=None, help="worker processes")
    s.add_argument("--parallel", action="store_true", help="thread each instance's construction")
    s.set_defaults(func=cmd_bench)
    return p


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    try:
        return args.func(args)
    except (InvalidInstance, Infeasible, ValueError) as exc:
        code, msg = EXIT_VALIDATION, exc
    except (UnsupportedStructure, NotSeriesParallel, CycleDetected, AlphaZero, DZero) as exc:
        code, msg = EXIT_UNSUPPORTED, exc
    except TooManyPaths as exc:
        code, msg = EXIT_CAPACITY, exc
    except (OSError, SolverUnavailable, SolverError, LpParseError) as exc:
        code, msg = EXIT_IO, exc
    print(f"rrsp: {type(msg).__name__}: {msg}", file=sys.stderr)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
