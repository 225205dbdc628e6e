"""Frank-Wolfe (conditional gradient) iteration with the closed-form step.

Each iteration asks the LO oracle for ``p = argmin grad^T p`` over the set,
forms the gap ``grad^T (p - x) <= 0`` and moves to ``x + lam (p - x)`` with
``lam = min(1, |gap| / (L ||p - x||^2))``, the minimiser of the descent-lemma
model on ``[0, 1]``.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .objectives import ObjectiveModel
from .oracles import FeasibleSet, Unbounded, lo_oracle

DECREASE_SLACK = 1e-12
# steps shorter than this (relative to ||x||) count as a stall
STALL_RTOL = float(np.finfo(float).eps)


class Termination(str, Enum):
    GAP_BELOW_TOLERANCE = "GapBelowTolerance"
    MAX_ITERATIONS = "MaxIterations"
    ORACLE_UNBOUNDED = "OracleUnbounded"


class OracleUnboundedError(RuntimeError):
    """The linear subproblem at ``x`` has no minimiser; ``direction`` certifies it."""

    def __init__(self, x, direction, non_attainment=False):
        self.x = np.asarray(x, dtype=float)
        self.direction = np.asarray(direction, dtype=float)
        self.non_attainment = non_attainment
        super().__init__(f"LO oracle unbounded along {self.direction.tolist()}")


class InfeasibleStartError(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    gap_tolerance: float = 1e-8
    max_iterations: int = 1000
    lipschitz_override: float | None = None

    def __post_init__(self):
        if not self.gap_tolerance >= 0:
            raise ValueError("gap_tolerance must be >= 0")
        if int(self.max_iterations) < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.lipschitz_override is not None and not self.lipschitz_override > 0:
            raise ValueError("lipschitz_override must be positive")


@dataclass(frozen=True)
class IterateRecord:
    k: int
    x: np.ndarray
    p: np.ndarray
    gap: float
    lam: float
    f_value: float
    grad_norm: float
    dist_px: float

    def next_iterate(self) -> np.ndarray:
        return self.x + self.lam * (self.p - self.x)


@dataclass
class SolveTrace:
    records: list[IterateRecord] = field(default_factory=list)
    termination: Termination | None = None
    stalled: bool = False
    unbounded_direction: np.ndarray | None = None

    def __len__(self):
        return len(self.records)

    @property
    def final(self) -> IterateRecord:
        return self.records[-1]

    @property
    def f_values(self) -> np.ndarray:
        return np.array([r.f_value for r in self.records])


def dual_gap(grad, x, p) -> float:
    grad, x, p = (np.asarray(v, dtype=float) for v in (grad, x, p))
    if not grad.shape == x.shape == p.shape:
        raise ValueError(f"dimension mismatch: {grad.shape}, {x.shape}, {p.shape}")
    return float(grad @ (p - x))


def step_size(gap: float, L: float, dist_sq: float) -> float:
    """``min(1, |gap| / (L dist_sq))``; ``L == 0`` (affine objective) gives 1."""
    if not gap < 0:
        raise ValueError(f"step size needs a negative gap, got {gap!r}")
    if not dist_sq > 0:
        raise ValueError("step size needs p != x")
    if L < 0:
        raise ValueError("L must be nonnegative")
    if L == 0:
        return 1.0
    return min(1.0, -gap / (L * dist_sq))


def fw_step(objective: ObjectiveModel, fs: FeasibleSet, x, k: int = 0,
            L: float | None = None) -> IterateRecord:
    """One oracle call at ``x``; ``lam`` is 0 when the gap is not negative."""
    x = np.asarray(x, dtype=float)
    L = objective.lipschitz_L if L is None else L
    grad = np.asarray(objective.gradient(x), dtype=float)
    out = lo_oracle(fs, grad)
    if isinstance(out, Unbounded):
        raise OracleUnboundedError(x, out.direction, out.non_attainment)
    p = out.p
    gap = dual_gap(grad, x, p)
    dist_sq = float((p - x) @ (p - x))
    lam = step_size(gap, L, dist_sq) if gap < 0 and dist_sq > 0 else 0.0
    return IterateRecord(k=k, x=x, p=p, gap=gap, lam=lam, f_value=objective.evaluate(x),
                         grad_norm=float(np.linalg.norm(grad)), dist_px=float(np.sqrt(dist_sq)))


def solve(objective: ObjectiveModel, fs: FeasibleSet, x0, config: SolverConfig | None = None
          ) -> SolveTrace:
    """Run Frank-Wolfe from ``x0``.

    The final record always describes the last iterate and has ``lam == 0``
    (no step taken).  ``max_iterations`` bounds the number of steps, so a
    run makes at most ``max_iterations + 1`` oracle calls.  An unbounded
    oracle ends the run with the partial trace and the certificate stored in
    ``unbounded_direction``.
    """
    config = config or SolverConfig()
    x = np.asarray(x0, dtype=float)
    if not fs.contains(x):
        raise InfeasibleStartError(f"x0={x.tolist()} is not in the {fs.kind.value} set")
    L = config.lipschitz_override or objective.lipschitz_L
    trace = SolveTrace()
    k = 0
    while True:
        try:
            rec = fw_step(objective, fs, x, k=k, L=L)
        except OracleUnboundedError as err:
            trace.termination = Termination.ORACLE_UNBOUNDED
            trace.unbounded_direction = err.direction
            return trace
        if abs(rec.gap) <= config.gap_tolerance:
            trace.termination = Termination.GAP_BELOW_TOLERANCE
        elif k >= config.max_iterations:
            trace.termination = Termination.MAX_ITERATIONS
        else:
            x_next = rec.next_iterate()
            if rec.lam * rec.dist_px <= STALL_RTOL * max(1.0, float(np.linalg.norm(x))):
                trace.termination = Termination.MAX_ITERATIONS
                trace.stalled = True
        if trace.termination is not None:
            trace.records.append(dataclasses.replace(rec, lam=0.0))
            return trace
        trace.records.append(rec)
        x = x_next
        k += 1


def check_sufficient_decrease(trace: SolveTrace, slack: float = DECREASE_SLACK) -> bool:
    """``f(x^{k+1}) <= f(x^k) - |gap_k| lam_k / 2`` for every consecutive pair."""
    recs = trace.records
    return all(nxt.f_value <= cur.f_value - 0.5 * abs(cur.gap) * cur.lam + slack
               for cur, nxt in zip(recs, recs[1:]))
