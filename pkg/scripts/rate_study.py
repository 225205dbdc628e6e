"""Compare observed gaps f(x^k) - f* with the 1/(Gamma k) bound on slow runs.

Writes one CSV per problem with columns k, gap, bound, ratio.
"""
import argparse
from pathlib import Path

import numpy as np

from fwunbounded import certify
from fwunbounded.solver import SolverConfig
from fwunbounded.suite import paper_suite, run_problem
from fwunbounded.traceio import write_rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="runs/rates")
    ap.add_argument("--iters", type=int, default=2000)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = SolverConfig(gap_tolerance=1e-10, max_iterations=args.iters)
    for prob in paper_suite():
        res = run_problem(prob, cfg)
        if res.certificate is None or len(res.trace) < 20:
            continue
        a = np.maximum(res.trace.f_values - res.reference.f_star, 0.0)
        k = np.arange(1, a.size)
        bound = 1.0 / (res.certificate.Gamma * k)
        rows = [(int(i), float(g), float(b), float(g / b)) for i, g, b in zip(k, a[1:], bound)]
        write_rows(out / f"{prob.name}.csv", ("k", "gap", "bound", "ratio"), rows)
        print(f"{prob.name:38s} iters={len(res.trace) - 1:5d} max gap/bound={max(r[3] for r in rows):.3e}")


if __name__ == "__main__":
    main()
