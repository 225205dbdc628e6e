"""Runtime certificates for the Frank-Wolfe run.

Checks the two standing assumptions on sampled points (Lipschitz gradient
and gradient in the interior of the dual recession cone), computes the rate
constants ``sigma``, ``gamma``, ``Gamma`` from a finished trace and verifies
the per-step recurrence and the resulting ``O(1/k)`` bounds.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np
from scipy import optimize

from .objectives import ObjectiveModel
from .oracles import Attained, FeasibleSet, SetKind, cone_oracle, lo_oracle
from .solver import SolverConfig, SolveTrace, Termination, solve

TEST_BOX = 10.0
LIPSCHITZ_SLACK = 1e-8
DUAL_MARGIN = 1e-10
RECURRENCE_SLACK = 1e-12
BOUND_SLACK = 1e-10
DISTANCE_SLACK = 1e-8
REFERENCE_SLACK = 1e-8


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    passed: bool
    statistic: float
    threshold: float
    samples: int

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        if self.condition == "A":
            what = f"max Lipschitz ratio {self.statistic:.6g} vs declared L {self.threshold:.6g}"
        else:
            what = f"min dual margin {self.statistic:.6g} vs required {self.threshold:.3g}"
        return f"({self.condition}) {verdict}: {what} over {self.samples} samples"


@dataclass(frozen=True)
class RateCertificate:
    sigma: float
    gamma: float
    Gamma: float
    L: float
    recurrence_ok: bool | None = None
    bound_ok: bool | None = None
    # the O(1/k) argument presumes the iterates converge; unconverged runs are flagged
    conditional: bool = False


@dataclass(frozen=True)
class ReferenceSolution:
    f_star: float
    x_star: np.ndarray | None
    method: str


def sample_feasible(fs: FeasibleSet, rng: np.random.Generator, count: int,
                    box: float = TEST_BOX, max_tries: int = 1000) -> np.ndarray:
    """``count`` points drawn uniformly from ``[0, box]^n`` intersected with the set."""
    n = fs.n
    out = []
    for _ in range(max_tries):
        batch = rng.uniform(0.0, box, size=(max(count, 16), n))
        if fs.kind is SetKind.MONOTONE_CONE:
            batch = -np.sort(-batch, axis=1)
        out.extend(x for x in batch if fs.contains(x))
        if len(out) >= count:
            return np.array(out[:count])
    raise RuntimeError(f"could not sample {count} feasible points from the {fs.kind.value} set")


def check_condition_A(objective: ObjectiveModel, fs: FeasibleSet, samples: int = 1000,
                      seed: int = 0, lipschitz: float | None = None) -> ConditionReport:
    """Largest observed ``||grad f(x) - grad f(y)|| / ||x - y||`` over random pairs."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    L = objective.lipschitz_L if lipschitz is None else lipschitz
    rng = np.random.default_rng(seed)
    X = sample_feasible(fs, rng, samples)
    Y = sample_feasible(fs, rng, samples)
    worst = 0.0
    for x, y in zip(X, Y):
        d = np.linalg.norm(x - y)
        if d == 0:
            continue
        worst = max(worst, float(np.linalg.norm(objective.gradient(x) - objective.gradient(y)) / d))
    return ConditionReport("A", worst <= L * (1 + LIPSCHITZ_SLACK), worst, float(L), samples)


def check_condition_B(objective: ObjectiveModel, fs: FeasibleSet, samples: int = 1000,
                      seed: int = 0, margin: float = DUAL_MARGIN) -> ConditionReport:
    """Smallest ``grad f(x)^T d`` over sampled ``x`` and unit recession generators ``d``.

    For a finitely generated cone, strict positivity on every generator is
    the same as lying in the interior of the dual cone.
    """
    gens = np.array([g / np.linalg.norm(g) for g in fs.recession_generators()])
    rng = np.random.default_rng(seed)
    X = np.vstack([fs.interior_point()[None, :], sample_feasible(fs, rng, samples)])
    worst = min(float(np.min(gens @ objective.gradient(x))) for x in X)
    return ConditionReport("B", worst >= margin, worst, margin, len(X))


def _moving(trace: SolveTrace):
    return [r for r in trace.records if r.gap < 0]


def rate_constants(trace: SolveTrace, L: float) -> RateCertificate:
    """``sigma = max ||p - x||``, ``gamma = max ||grad f||`` over the trace and
    ``Gamma = min(1 / (2 gamma sigma), 1 / (2 L sigma^2))``."""
    if not trace.records or not _moving(trace):
        raise ValueError("rate constants need a trace with at least one moving step")
    sigma = max(r.dist_px for r in trace.records)
    gamma = max(r.grad_norm for r in trace.records)
    candidates = [1.0 / (2.0 * gamma * sigma)]
    if L > 0:
        candidates.append(1.0 / (2.0 * L * sigma**2))
    return RateCertificate(sigma=sigma, gamma=gamma, Gamma=min(candidates), L=float(L),
                           conditional=trace.termination is not Termination.GAP_BELOW_TOLERANCE)


def verify_rate(trace: SolveTrace, f_star: float, cert: RateCertificate) -> RateCertificate:
    """Fill ``recurrence_ok`` and ``bound_ok`` for the gaps ``a_k = f(x^k) - f*``.

    recurrence: ``Gamma a_k^2 <= a_k - a_{k+1}``;
    bound: ``a_k <= a_0 / (1 + Gamma a_0 k)`` and ``a_k <= 1 / (Gamma k)`` for ``k >= 1``.
    """
    f = trace.f_values
    if f.size == 0:
        raise ValueError("empty trace")
    if f_star > f.min() + REFERENCE_SLACK:
        raise ValueError(f"reference f*={f_star!r} exceeds the best trace value {f.min()!r}")
    a = f - f_star
    G = cert.Gamma
    recurrence_ok = bool(np.all(G * a[:-1] ** 2 <= a[:-1] - a[1:] + RECURRENCE_SLACK))
    k = np.arange(1, a.size)
    bound_ok = bool(np.all(a[1:] <= a[0] / (1.0 + G * a[0] * k) + BOUND_SLACK)
                    and np.all(a[1:] <= 1.0 / (G * k) + BOUND_SLACK))
    return replace(cert, recurrence_ok=recurrence_ok, bound_ok=bound_ok)


def verify_strong_distance(trace: SolveTrace, x_star, M: float, f_star: float,
                           cert: RateCertificate) -> bool:
    """Distance-to-solution bounds for an ``M``-strongly convex objective.

    ``||x^k - x*|| <= sqrt(2 (f(x^k) - f*) / M)`` for all ``k`` and
    ``||x^k - x*|| <= sqrt(2 / (Gamma M)) / sqrt(k)`` for ``k >= 1``.
    """
    if not M > 0:
        raise ValueError("strong-distance bounds need M > 0")
    x_star = np.asarray(x_star, dtype=float)
    for r in trace.records:
        dist = float(np.linalg.norm(r.x - x_star))
        gap = max(r.f_value - f_star, 0.0)
        if dist > np.sqrt(2.0 * gap / M) + DISTANCE_SLACK:
            return False
        if r.k >= 1 and dist > np.sqrt(2.0 / (cert.Gamma * M)) / np.sqrt(r.k) + DISTANCE_SLACK:
            return False
    return True


def stationarity_residual(objective: ObjectiveModel, fs: FeasibleSet, x) -> float:
    """``|min_p grad f(x)^T (p - x)|``; zero exactly at stationary points."""
    x = np.asarray(x, dtype=float)
    out = lo_oracle(fs, objective.gradient(x), x)
    if not isinstance(out, Attained):
        raise ValueError(f"LO oracle unbounded at x={x.tolist()}")
    return abs(out.value)


# -- reference optimal values --------------------------------------------------

def _analytic(objective: ObjectiveModel, fs: FeasibleSet) -> ReferenceSolution:
    if fs.kind in (SetKind.MONOTONE_CONE, SetKind.ORTHANT):
        origin = np.zeros(fs.n)
        if objective.convex and isinstance(cone_oracle(fs.kind, objective.gradient(origin)), Attained):
            return ReferenceSolution(objective.evaluate(origin), origin, "analytic")
    if objective.name == "quadratic" and fs.kind is not SetKind.PRODUCT_SET and objective.convex:
        x = _qp_kkt(objective.params["a"], objective.params["Q"], *fs.inequalities())
        return ReferenceSolution(objective.evaluate(x), x, "analytic")
    raise ValueError(f"no analytic solution for {objective.name} on {fs.kind.value}")


def _qp_kkt(a, Q, G, h, tol: float = 1e-9) -> np.ndarray:
    """Convex QP ``min a^T x + x^T Q x, G x >= h`` by active-set enumeration.

    Any KKT point is optimal for a convex QP, so the first admissible active
    set (smallest first) wins.
    """
    S = Q + Q.T
    n = a.size
    rows = range(G.shape[0])
    for size in range(n + 1):
        for act in itertools.combinations(rows, size):
            act = list(act)
            Ga = G[act]
            K = np.block([[S, -Ga.T], [Ga, np.zeros((size, size))]])
            rhs = np.r_[-a, h[act]]
            sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
            if np.linalg.norm(K @ sol - rhs) > tol * max(1.0, np.linalg.norm(rhs)):
                continue
            x, mu = sol[:n], sol[n:]
            if np.all(G @ x >= h - tol) and np.all(mu >= -tol):
                return x
    raise ValueError("no KKT point found; QP may be unbounded")


def _grid(objective: ObjectiveModel, fs: FeasibleSet, resolution: float = 1e-3,
          box: float = TEST_BOX, points: int | None = None) -> ReferenceSolution:
    """Zooming grid search: each level shrinks the box around the incumbent."""
    if fs.n > 3:
        raise ValueError("grid reference is limited to n <= 3")
    points = points or (81 if fs.n <= 2 else 25)
    lo = np.zeros(fs.n)
    hi = np.full(fs.n, box)
    best_x, best_f = None, np.inf
    while True:
        axes = [np.linspace(l, h, points) for l, h in zip(lo, hi)]
        for pt in itertools.product(*axes):
            x = np.array(pt)
            if not fs.contains(x, tol=0.0):
                continue
            fx = objective.evaluate(x)
            if fx < best_f:
                best_x, best_f = x, fx
        if best_x is None:
            raise RuntimeError("grid found no feasible point")
        step = (hi - lo) / (points - 1)
        if step.max() <= resolution:
            return ReferenceSolution(float(best_f), best_x, "grid")
        lo = np.maximum(best_x - 4 * step, 0.0)
        hi = best_x + 4 * step


def _long_run_fw(objective, fs, x0=None, max_iterations: int = 10**6) -> ReferenceSolution:
    x0 = fs.interior_point() if x0 is None else x0
    trace = solve(objective, fs, x0, SolverConfig(gap_tolerance=1e-12, max_iterations=max_iterations))
    i = int(np.argmin(trace.f_values))
    return ReferenceSolution(float(trace.f_values[i]), trace.records[i].x, "long-run-FW")


def _repair(fs: FeasibleSet, x: np.ndarray) -> np.ndarray:
    """Radially rescale a nearly feasible point onto the set (sets with ``0`` outside)."""
    if fs.kind in (SetKind.MONOTONE_CONE, SetKind.ORTHANT):
        return np.maximum(x, 0.0) if fs.kind is SetKind.ORTHANT else x
    x = np.maximum(x, 0.0)
    if fs.kind is SetKind.HALFSPACE_SIMPLEX:
        scale = 1.0 / x.sum()
    elif fs.kind is SetKind.PRODUCT_SET:
        scale = float(np.exp(-np.mean(np.log(x))))
    else:
        scale = float(np.max(fs.b / (fs.A @ x)))
    return x * max(scale, 1.0)


def _kkt_polish(jac, G, h, z, active_tol=1e-7):
    """Solve the KKT equations of the constraints active at ``z`` to full precision.

    Returns ``None`` when the active set is degenerate or the root is not a
    KKT point (infeasible or a negative multiplier).
    """
    act = np.flatnonzero(G @ z - h <= active_tol * max(1.0, float(np.max(np.abs(h)))))
    Ga, ha = G[act], h[act]
    n, m = z.size, act.size
    if m > n or (m and np.linalg.matrix_rank(Ga) < m):
        return None
    mu0 = np.linalg.lstsq(Ga.T, jac(z), rcond=None)[0] if m else np.zeros(0)

    def kkt(v):
        x, mu = v[:n], v[n:]
        return np.r_[jac(x) - Ga.T @ mu, Ga @ x - ha]

    res = optimize.root(kkt, np.r_[z, mu0], method="hybr", options={"xtol": 1e-15})
    x, mu = res.x[:n], res.x[n:]
    if not res.success or np.any(mu < -1e-12) or np.any(G @ x - h < -1e-12):
        return None
    return x


def _nlp(objective: ObjectiveModel, fs: FeasibleSet, starts=()) -> ReferenceSolution:
    """SLSQP from several feasible starts, followed by a KKT polish on the
    active constraints; keeps the best feasible answer.

    The product set is handled in log coordinates ``x = exp(t)``, where its
    constraint becomes the linear ``sum(t) >= 0``.
    """
    if fs.kind is SetKind.PRODUCT_SET:
        ones = np.ones(fs.n)
        fun = lambda t: objective.evaluate(np.exp(t))
        jac = lambda t: objective.gradient(np.exp(t)) * np.exp(t)
        G, h = ones[None, :], np.zeros(1)
        to_x, from_x = np.exp, np.log
    else:
        G, h = fs.inequalities()
        fun, jac = objective.evaluate, objective.gradient
        to_x = from_x = np.asarray
    cons = [{"type": "ineq", "fun": lambda z: G @ z - h, "jac": lambda z: G}]
    best = None
    for x0 in [fs.interior_point(), *starts]:
        res = optimize.minimize(fun, from_x(np.asarray(x0, dtype=float)), jac=jac, method="SLSQP",
                                constraints=cons, options={"ftol": 1e-15, "maxiter": 1000})
        # the polished KKT point goes first so it wins ties at rounding level
        candidates = [res.x]
        polished = _kkt_polish(jac, G, h, res.x)
        if polished is not None:
            candidates.insert(0, polished)
        for x in map(to_x, candidates):
            best = _keep_better(objective, fs, x, best)
    if best is None:
        raise RuntimeError("SLSQP found no feasible point")
    return best


def _keep_better(objective, fs, x, best):
    if not fs.contains(x, tol=0.0):
        x = _repair(fs, x)
    if not fs.contains(x, tol=1e-12):
        return best
    fx = objective.evaluate(x)
    if best is None or fx < best.f_star - 1e-13 * max(1.0, abs(best.f_star)):
        return ReferenceSolution(float(fx), x, "nlp")
    return best


def reference_solution(objective: ObjectiveModel, fs: FeasibleSet, mode: str = "analytic",
                       **kwargs) -> ReferenceSolution:
    """Best known ``f* = inf f`` over the set.

    ``mode`` is one of ``analytic`` (apex of a cone, or KKT enumeration for
    quadratics on polyhedral sets), ``long-run-FW``, ``grid`` (``n <= 3``)
    or ``nlp`` (SLSQP).
    """
    if mode == "analytic":
        return _analytic(objective, fs)
    if mode == "grid":
        return _grid(objective, fs, **kwargs)
    if mode == "long-run-FW":
        return _long_run_fw(objective, fs, **kwargs)
    if mode == "nlp":
        return _nlp(objective, fs, **kwargs)
    raise ValueError(f"unknown reference mode {mode!r}")
