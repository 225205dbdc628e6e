"""Command-line entry point: ``solve``, ``check`` and ``bench``."""
from __future__ import annotations

import argparse
import sys

from . import certify, suite
from .config import ConfigError, load_config
from .solver import Termination, solve
from .traceio import write_trace_csv

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_UNBOUNDED = 2
EXIT_MAX_ITER = 3
EXIT_CHECK_FAILED = 4

TERMINATION_EXIT = {
    Termination.GAP_BELOW_TOLERANCE: EXIT_OK,
    Termination.ORACLE_UNBOUNDED: EXIT_UNBOUNDED,
    Termination.MAX_ITERATIONS: EXIT_MAX_ITER,
}


def _load(path, strict=True):
    try:
        return load_config(path, strict=strict)
    except (ConfigError, OSError) as err:
        print(f"error: {path}: {err}", file=sys.stderr)
        return None


def cmd_solve(config_path, out_path) -> int:
    cfg = _load(config_path)
    if cfg is None:
        return EXIT_CONFIG
    trace = solve(cfg.objective, cfg.feasible_set, cfg.x0, cfg.solver)
    write_trace_csv(trace, out_path)
    print(f"termination: {trace.termination.value}" + (" (stalled)" if trace.stalled else ""))
    if trace.termination is Termination.ORACLE_UNBOUNDED:
        print(f"unbounded direction: {trace.unbounded_direction.tolist()}")
    if trace.records:
        final = trace.final
        residual = certify.stationarity_residual(cfg.objective, cfg.feasible_set, final.x)
        print(f"iterations: {len(trace) - 1}")
        print(f"final f: {final.f_value!r}")
        print(f"stationarity residual: {residual!r}")
    return TERMINATION_EXIT[trace.termination]


def cmd_check(config_path, samples: int = 1000) -> int:
    cfg = _load(config_path, strict=False)
    if cfg is None:
        return EXIT_CONFIG
    rep_a = certify.check_condition_A(cfg.objective, cfg.feasible_set, samples, cfg.seed,
                                      lipschitz=cfg.solver.lipschitz_override)
    rep_b = certify.check_condition_B(cfg.objective, cfg.feasible_set, samples, cfg.seed)
    print(rep_a.summary())
    print(rep_b.summary())
    return EXIT_OK if rep_a.passed and rep_b.passed else EXIT_CHECK_FAILED


def cmd_bench(suite_name, out_dir) -> int:
    try:
        results = suite.run_suite(suite_name, out_dir)
    except KeyError as err:
        print(f"error: {err.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
    ok = True
    for r in results:
        good = r.rate_ok and r.decrease_ok
        ok &= good
        print(f"{r.problem.name:40s} iters={len(r.trace) - 1:4d} "
              f"f*={r.reference.f_star:.10g} rate_ok={r.rate_ok} decrease_ok={r.decrease_ok}")
    print(f"wrote {len(results)} traces and summary.csv to {out_dir}")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fwunbounded",
                                     description="Frank-Wolfe on unbounded convex sets")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", help="run Frank-Wolfe on a problem config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="trace CSV path")
    p = sub.add_parser("check", help="sample-check the Lipschitz and dual-cone conditions")
    p.add_argument("--config", required=True)
    p.add_argument("--samples", type=int, default=1000)
    p = sub.add_parser("bench", help="run a benchmark suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "solve":
        return cmd_solve(args.config, args.out)
    if args.command == "check":
        return cmd_check(args.config, args.samples)
    return cmd_bench(args.suite, args.out)


if __name__ == "__main__":
    sys.exit(main())
