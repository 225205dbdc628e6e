"""The shipped benchmark suite: every example objective on every example set."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import certify, objectives
from .objectives import ObjectiveModel
from .oracles import FeasibleSet, SetKind
from .solver import SolverConfig, SolveTrace, check_sufficient_decrease, solve
from .traceio import write_rows, write_trace_csv

SUMMARY_HEADER = ("problem", "f_star", "final_f", "final_gap", "iters", "sigma", "gamma",
                  "Gamma", "rate_ok", "decrease_ok")

BENCH_CONFIG = SolverConfig(gap_tolerance=1e-8, max_iterations=500)


@dataclass(frozen=True)
class BenchProblem:
    name: str
    objective: ObjectiveModel
    feasible_set: FeasibleSet
    x0: np.ndarray


@dataclass
class BenchResult:
    problem: BenchProblem
    trace: SolveTrace
    reference: certify.ReferenceSolution
    certificate: certify.RateCertificate | None
    decrease_ok: bool

    @property
    def rate_ok(self) -> bool:
        if self.certificate is None:  # started at a stationary point; nothing to bound
            return True
        return bool(self.certificate.recurrence_ok and self.certificate.bound_ok)

    def summary_row(self):
        cert = self.certificate
        nan = float("nan")
        return (self.problem.name, self.reference.f_star, self.trace.final.f_value,
                self.trace.final.gap, len(self.trace) - 1,
                cert.sigma if cert else nan, cert.gamma if cert else nan,
                cert.Gamma if cert else nan, self.rate_ok, self.decrease_ok)


def paper_objectives() -> list[ObjectiveModel]:
    return [
        objectives.quadratic([1.0, 1.0], np.eye(2)),
        objectives.regularized_norm([1.0, 2.0], alpha=1.0, beta=0.1),
        objectives.sqrt_quadratic([1.0, 2.0], beta=1.0),
        objectives.log_sum_exp(2),
    ]


def paper_sets() -> list[FeasibleSet]:
    return [
        FeasibleSet(SetKind.HALFSPACE_SIMPLEX, 2),
        FeasibleSet(SetKind.PRODUCT_SET, 2),
        FeasibleSet(SetKind.POLYHEDRON, 2, A=[[1.0, 1.0], [1.0, 2.0]], b=[1.0, 2.0]),
        FeasibleSet(SetKind.MONOTONE_CONE, 2),
        FeasibleSet(SetKind.ORTHANT, 2),
    ]


def paper_suite() -> list[BenchProblem]:
    x0 = np.array([2.0, 1.0])  # feasible for every set above
    return [BenchProblem(f"{f.name}__{s.kind.value}", f, s, x0)
            for f in paper_objectives() for s in paper_sets()]


SUITES = {"paper": paper_suite}


def best_reference(objective: ObjectiveModel, fs: FeasibleSet) -> certify.ReferenceSolution:
    try:
        return certify.reference_solution(objective, fs, "analytic")
    except ValueError:
        return certify.reference_solution(objective, fs, "nlp")


def run_problem(problem: BenchProblem, config: SolverConfig = BENCH_CONFIG) -> BenchResult:
    trace = solve(problem.objective, problem.feasible_set, problem.x0, config)
    ref = best_reference(problem.objective, problem.feasible_set)
    cert = None
    if any(r.gap < 0 for r in trace.records):
        L = config.lipschitz_override or problem.objective.lipschitz_L
        cert = certify.rate_constants(trace, L)
        if problem.objective.convex:
            cert = certify.verify_rate(trace, ref.f_star, cert)
    return BenchResult(problem, trace, ref, cert, check_sufficient_decrease(trace))


def run_suite(name: str, out_dir) -> list[BenchResult]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; available: {', '.join(SUITES)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = [run_problem(p) for p in SUITES[name]()]
    for res in results:
        write_trace_csv(res.trace, out / f"{res.problem.name}.csv")
    write_rows(out / "summary.csv", SUMMARY_HEADER, [r.summary_row() for r in results])
    return results
