"""Unbounded feasible sets, their recession generators and LO oracles.

An oracle either returns an attained minimiser of ``c^T p`` over the set or
an :class:`Unbounded` certificate: a recession direction ``d`` with
``c^T d < 0``, proving ``c`` is not in the dual of the recession cone.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import lp

MEMBERSHIP_TOL = 1e-9


class SetKind(str, Enum):
    HALFSPACE_SIMPLEX = "halfspace_simplex"
    PRODUCT_SET = "product_set"
    POLYHEDRON = "polyhedron"
    MONOTONE_CONE = "monotone_cone"
    ORTHANT = "orthant"


class InfeasibleSetError(ValueError):
    pass


@dataclass(frozen=True)
class Attained:
    p: np.ndarray
    value: float


@dataclass(frozen=True)
class Unbounded:
    """Certificate that the linear subproblem has no minimiser.

    ``non_attainment`` marks the product-set case with a zero cost entry:
    the infimum is finite but never reached, and ``c^T direction == 0``.
    """

    direction: np.ndarray
    non_attainment: bool = False


OracleOutcome = Attained | Unbounded


def _unit(i: int, n: int) -> np.ndarray:
    e = np.zeros(n)
    e[i] = 1.0
    return e


def _as_cost(c, n: int) -> np.ndarray:
    c = np.asarray(c, dtype=float).reshape(-1)
    if c.shape != (n,):
        raise ValueError(f"cost vector has length {c.size}, expected {n}")
    return c


@dataclass(frozen=True)
class FeasibleSet:
    """One of the supported closed convex sets in ``R^n_+``.

    ``A`` and ``b`` are only used by :attr:`SetKind.POLYHEDRON`, which is
    ``{x >= 0 : A x >= b}`` with ``A > 0`` entrywise and ``b > 0``.
    """

    kind: SetKind
    n: int
    A: np.ndarray | None = None
    b: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SetKind(self.kind))
        if int(self.n) < 1:
            raise ValueError("n must be >= 1")
        object.__setattr__(self, "n", int(self.n))
        if self.kind is SetKind.POLYHEDRON:
            if self.A is None or self.b is None:
                raise ValueError("polyhedron needs A and b")
            A = np.atleast_2d(np.asarray(self.A, dtype=float))
            b = np.asarray(self.b, dtype=float).reshape(-1)
            if A.shape != (b.size, self.n):
                raise ValueError(f"A must be {b.size}x{self.n}, got {A.shape}")
            if not np.all(A > 0):
                raise ValueError("polyhedron A must have strictly positive entries")
            if not np.all(b > 0):
                raise ValueError("polyhedron b must be strictly positive")
            object.__setattr__(self, "A", A)
            object.__setattr__(self, "b", b)

    # -- geometry -----------------------------------------------------------

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,) or not np.all(np.isfinite(x)):
            return False
        if self.kind is SetKind.MONOTONE_CONE:
            return bool(x[-1] >= -tol and np.all(x[:-1] - x[1:] >= -tol))
        if np.any(x < -tol):
            return False
        if self.kind is SetKind.ORTHANT:
            return True
        if self.kind is SetKind.HALFSPACE_SIMPLEX:
            return bool(x.sum() >= 1.0 - tol)
        if self.kind is SetKind.PRODUCT_SET:
            return bool(np.prod(np.maximum(x, 0.0)) >= 1.0 - tol)
        return bool(np.all(self.A @ x - self.b >= -tol))

    def recession_generators(self) -> list[np.ndarray]:
        return recession_generators(self)

    def inequalities(self) -> tuple[np.ndarray, np.ndarray]:
        """``(G, h)`` with the set equal to ``{x : G x >= h}``; polyhedral kinds only."""
        n = self.n
        if self.kind is SetKind.PRODUCT_SET:
            raise ValueError("product set is not polyhedral")
        if self.kind is SetKind.MONOTONE_CONE:
            G = np.eye(n)
            G[np.arange(n - 1), np.arange(1, n)] = -1.0
            return G, np.zeros(n)
        if self.kind is SetKind.ORTHANT:
            return np.eye(n), np.zeros(n)
        if self.kind is SetKind.HALFSPACE_SIMPLEX:
            return np.vstack([np.eye(n), np.ones((1, n))]), np.r_[np.zeros(n), 1.0]
        return np.vstack([np.eye(n), self.A]), np.r_[np.zeros(n), self.b]

    def interior_point(self) -> np.ndarray:
        """A deterministic feasible point (not necessarily interior for cones)."""
        n = self.n
        if self.kind is SetKind.MONOTONE_CONE:
            return np.arange(n, 0, -1, dtype=float)
        if self.kind is SetKind.ORTHANT:
            return np.ones(n)
        if self.kind is SetKind.HALFSPACE_SIMPLEX:
            return np.full(n, 1.0 / n)
        if self.kind is SetKind.PRODUCT_SET:
            return np.ones(n)
        return np.full(n, float(np.max(self.b / self.A.sum(axis=1))))


def recession_generators(fs: FeasibleSet) -> list[np.ndarray]:
    """Unit vectors generating the recession cone.

    All supported kinds except the monotone cone have recession cone
    ``R^n_+``; the monotone cone is its own recession cone, generated by
    normalised prefix vectors ``(e_1 + ... + e_i) / sqrt(i)``.
    """
    n = fs.n
    if fs.kind is SetKind.MONOTONE_CONE:
        out = []
        for i in range(1, n + 1):
            g = np.zeros(n)
            g[:i] = 1.0 / np.sqrt(i)
            out.append(g)
        return out
    return [_unit(i, n) for i in range(n)]


def halfspace_simplex_oracle(c) -> OracleOutcome:
    """Minimise ``c^T p`` over ``{p >= 0, sum(p) >= 1}``.

    Bounded iff ``c >= 0``; then the vertex ``e_i`` with smallest ``c_i``
    (lowest index on ties) is optimal.  Otherwise the most negative
    coordinate direction is the certificate.
    """
    c = np.asarray(c, dtype=float).reshape(-1)
    n = c.size
    i = int(np.argmin(c))
    if c[i] < 0:
        return Unbounded(_unit(i, n))
    return Attained(_unit(i, n), float(c[i]))


def product_set_oracle(c) -> OracleOutcome:
    """Minimise ``c^T p`` over ``{p >= 0, prod(p) >= 1}``.

    For ``c > 0`` the minimiser is ``p_i = g / c_i`` with ``g`` the geometric
    mean of ``c``, and the value is ``n g``.
    """
    c = np.asarray(c, dtype=float).reshape(-1)
    n = c.size
    i = int(np.argmin(c))
    if c[i] < 0:
        return Unbounded(_unit(i, n))
    if c[i] == 0:
        # inf is 0 along p_i -> inf, other coords -> 0; never attained
        return Unbounded(_unit(i, n), non_attainment=True)
    g = float(np.exp(np.mean(np.log(c))))
    p = g / c
    return Attained(p, float(c @ p))


def polyhedron_oracle(A, b, c) -> OracleOutcome:
    """Minimise ``c^T p`` over ``{p >= 0, A p >= b}`` via the simplex LP.

    Surplus variables give the standard form ``A p - s = b``; an LP ray maps
    back to its ``p`` block, which lies in the recession cone.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    c = np.asarray(c, dtype=float).reshape(-1)
    m, n = A.shape
    if not np.all(A > 0) or not np.all(b > 0):
        raise ValueError("polyhedron oracle needs A > 0 and b > 0")
    problem = lp.StandardFormLP(A=np.hstack([A, -np.eye(m)]), b=b, c=np.r_[c, np.zeros(m)])
    out = lp.solve_lp(problem)
    if isinstance(out, lp.Infeasible):
        raise InfeasibleSetError(f"polyhedron is empty (phase-1 residual {out.residual:g})")
    if isinstance(out, lp.Unbounded):
        d = out.ray[:n]
        return Unbounded(d / np.linalg.norm(d))
    p = out.x[:n]
    return Attained(p, float(c @ p))


def cone_oracle(kind: SetKind, c) -> OracleOutcome:
    """Linear minimisation over a pointed polyhedral cone.

    The minimum is attained (at the apex) iff ``c`` is in the dual cone; for
    the monotone cone that means every prefix sum of ``c`` is ``>= 0``.
    """
    kind = SetKind(kind)
    c = np.asarray(c, dtype=float).reshape(-1)
    n = c.size
    if kind is SetKind.MONOTONE_CONE:
        prefix = np.cumsum(c)
        bad = np.flatnonzero(prefix < 0)
        if bad.size:
            i = int(bad[0]) + 1
            g = np.zeros(n)
            g[:i] = 1.0 / np.sqrt(i)
            return Unbounded(g)
    elif kind is SetKind.ORTHANT:
        bad = np.flatnonzero(c < 0)
        if bad.size:
            return Unbounded(_unit(int(bad[0]), n))
    else:
        raise ValueError(f"{kind.value} is not a cone")
    return Attained(np.zeros(n), 0.0)


def lo_oracle(fs: FeasibleSet, c, x=None) -> OracleOutcome:
    """Dispatch to the kind-specific oracle.

    The ``value`` of an :class:`Attained` result is ``c^T (p - x)``; with
    ``x`` omitted it is ``c^T p``.
    """
    c = _as_cost(c, fs.n)
    if fs.kind is SetKind.HALFSPACE_SIMPLEX:
        out = halfspace_simplex_oracle(c)
    elif fs.kind is SetKind.PRODUCT_SET:
        out = product_set_oracle(c)
    elif fs.kind is SetKind.POLYHEDRON:
        out = polyhedron_oracle(fs.A, fs.b, c)
    else:
        out = cone_oracle(fs.kind, c)
    if x is None or isinstance(out, Unbounded):
        return out
    x = _as_cost(x, fs.n)
    return Attained(out.p, float(c @ out.p - c @ x))
