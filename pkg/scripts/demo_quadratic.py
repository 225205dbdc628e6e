"""Step-by-step trace of the two-variable quadratic demo."""
import numpy as np

from fwunbounded import certify, objectives
from fwunbounded.oracles import FeasibleSet, SetKind
from fwunbounded.solver import solve

f = objectives.quadratic([1.0, 1.0], np.eye(2))
fs = FeasibleSet(SetKind.HALFSPACE_SIMPLEX, 2)
trace = solve(f, fs, [1.0, 0.0])

for r in trace.records:
    print(f"k={r.k} x={r.x.tolist()} p={r.p.tolist()} f={r.f_value!r} gap={r.gap!r} lambda={r.lam!r}")
print("termination:", trace.termination.value)
ref = certify.reference_solution(f, fs, "analytic")
print("reference f* (KKT):", ref.f_star, "at", ref.x_star.tolist())
