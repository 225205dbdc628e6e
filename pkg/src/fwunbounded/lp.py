"""Dense two-phase simplex for standard-form linear programs.

Solves ``min c^T x  s.t.  A x = b, x >= 0`` on a full tableau using Bland's
smallest-index rule in both phases, so the method terminates on degenerate
problems too.  Unbounded problems come back with an explicit ray, which the
polyhedron oracle turns into a recession-direction certificate.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

PIVOT_TOL = 1e-11
COST_TOL = 1e-10
FEAS_TOL = 1e-9


class LpNumericalError(RuntimeError):
    """Raised when the only available pivots are below ``PIVOT_TOL``."""


@dataclass(frozen=True)
class StandardFormLP:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        c = np.asarray(self.c, dtype=float).reshape(-1)
        m, n = A.shape
        if m < 1 or n < 1:
            raise ValueError("LP needs at least one row and one column")
        if b.shape != (m,) or c.shape != (n,):
            raise ValueError(f"inconsistent LP dimensions: A {A.shape}, b {b.shape}, c {c.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise ValueError("LP data must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)


@dataclass(frozen=True)
class Optimal:
    x: np.ndarray
    value: float


@dataclass(frozen=True)
class Unbounded:
    """``ray`` satisfies ``A ray = 0``, ``ray >= 0`` and ``c^T ray < 0``."""

    ray: np.ndarray


@dataclass(frozen=True)
class Infeasible:
    residual: float


LpOutcome = Optimal | Unbounded | Infeasible


class _Tableau:
    """Rows ``T[:m]`` hold ``[B^-1 A | B^-1 b]``; row ``m`` holds reduced costs."""

    def __init__(self, T: np.ndarray, basis: list[int]):
        self.T = T
        self.basis = basis
        self.pivots = 0

    @property
    def m(self) -> int:
        return self.T.shape[0] - 1

    def pivot(self, row: int, col: int) -> None:
        T = self.T
        T[row] /= T[row, col]
        for i in range(T.shape[0]):
            if i != row and T[i, col] != 0.0:
                T[i] -= T[i, col] * T[row]
        self.basis[row] = col
        self.pivots += 1

    def run(self, allowed: int, max_pivots: int) -> int | None:
        """Bland iterations over columns ``< allowed``.

        Returns ``None`` at optimality, otherwise the entering column whose
        tableau column has no positive entry (an unbounded direction).
        """
        T = self.T
        while True:
            cost = T[-1, :allowed]
            entering = next((j for j in range(allowed) if cost[j] < -COST_TOL), None)
            if entering is None:
                return None
            col = T[:-1, entering]
            rows = [i for i in range(self.m) if col[i] > PIVOT_TOL]
            if not rows:
                if np.any(col > PIVOT_TOL * 1e-2):
                    raise LpNumericalError(
                        f"entering column {entering} has only pivots below {PIVOT_TOL:g}"
                    )
                return entering
            ratios = [T[i, -1] / col[i] for i in rows]
            best = min(ratios)
            # Bland: among tied rows leave the variable with the smallest index
            tied = [i for i, r in zip(rows, ratios) if r <= best + 1e-12 * max(1.0, abs(best))]
            leave = min(tied, key=lambda i: self.basis[i])
            self.pivot(leave, entering)
            assert self.pivots <= max_pivots, "pivot count exceeded the vertex bound"


def solve_lp(lp: StandardFormLP) -> LpOutcome:
    """Two-phase simplex; see module docstring for the certificate contract."""
    A, b, c = lp.A.copy(), lp.b.copy(), lp.c
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # phase 1: artificials n..n+m-1, minimise their sum
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    tab = _Tableau(T, list(range(n, n + m)))
    tab.run(n + m, comb(n + m, m))
    residual = -tab.T[-1, -1]
    if residual > FEAS_TOL * max(1.0, float(np.abs(b).max())):
        return Infeasible(residual=float(residual))

    # drive remaining (zero-level) artificials out of the basis; drop redundant rows
    keep = []
    for i in range(m):
        if tab.basis[i] < n:
            keep.append(i)
            continue
        row = tab.T[i, :n]
        j = next((j for j in range(n) if abs(row[j]) > PIVOT_TOL), None)
        if j is None:
            continue
        tab.pivot(i, j)
        keep.append(i)

    T2 = np.zeros((len(keep) + 1, n + 1))
    T2[:-1, :n] = tab.T[keep, :n]
    T2[:-1, -1] = tab.T[keep, -1]
    basis = [tab.basis[i] for i in keep]
    T2[-1, :n] = c
    for i, j in enumerate(basis):
        T2[-1] -= c[j] * T2[i]
    tab2 = _Tableau(T2, basis)
    entering = tab2.run(n, comb(n, len(keep)))

    if entering is not None:
        ray = np.zeros(n)
        ray[entering] = 1.0
        for i, j in enumerate(tab2.basis):
            ray[j] = -tab2.T[i, entering]
        ray = np.maximum(ray, 0.0)
        return Unbounded(ray=ray)

    x = np.zeros(n)
    for i, j in enumerate(tab2.basis):
        x[j] = tab2.T[i, -1]
    x[(x < 0) & (x > -FEAS_TOL)] = 0.0
    return Optimal(x=x, value=float(c @ x))
