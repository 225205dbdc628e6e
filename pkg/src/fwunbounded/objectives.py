"""Smooth objectives with analytic gradients and curvature constants.

Every constructor returns an :class:`ObjectiveModel` carrying the gradient
Lipschitz constant ``L`` used by the step-size rule and, when known, a
strong-convexity modulus ``M`` (0 means merely convex).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

Vector = np.ndarray


@dataclass(frozen=True)
class ObjectiveModel:
    name: str
    evaluate: Callable[[Vector], float]
    gradient: Callable[[Vector], Vector]
    lipschitz_L: float
    strong_convexity_M: float = 0.0
    convex: bool = True
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.lipschitz_L >= 0:
            raise ValueError("lipschitz_L must be nonnegative")
        if not self.strong_convexity_M >= 0:
            raise ValueError("strong_convexity_M must be nonnegative")

    def __call__(self, x: Vector) -> float:
        return self.evaluate(x)


@dataclass(frozen=True)
class GFormSpec:
    """Data for ``f(x) = a^T x + G(x)^T x`` on the nonnegative orthant.

    ``jacobian(x)[i, j]`` is ``dG_i/dx_j``.  ``L1`` bounds the Lipschitz
    constant of ``G`` and ``L2`` that of ``x -> G'(x)^T x``.
    """

    a: Vector
    G: Callable[[Vector], Vector]
    jacobian: Callable[[Vector], np.ndarray]
    L1: float
    L2: float
    name: str = "g_form"
    strong_convexity_M: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.ndim != 1 or not np.all(a > 0):
            raise ValueError("a must be a strictly positive vector")
        object.__setattr__(self, "a", a)


def _positive_vector(a, what="a", strict=True) -> Vector:
    a = np.asarray(a, dtype=float).reshape(-1)
    if a.size == 0 or not np.all(np.isfinite(a)):
        raise ValueError(f"{what} must be a nonempty finite vector")
    if strict and not np.all(a > 0):
        raise ValueError(f"{what} must be strictly positive")
    return a


def quadratic(a, Q, strict: bool = True) -> ObjectiveModel:
    """``f(x) = a^T x + x^T Q x`` with ``Q`` entrywise nonnegative.

    The gradient is ``a + (Q + Q^T) x``; for nonsymmetric ``Q`` this differs
    from ``a + Q x``.  ``strict=False`` skips the sign check on ``a`` so that
    assumption checks can diagnose bad data instead of rejecting it.
    """
    a = _positive_vector(a, strict=strict)
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    n = a.size
    if Q.shape != (n, n):
        raise ValueError(f"Q must be {n}x{n}, got {Q.shape}")
    if np.any(Q < 0):
        raise ValueError("Q must be entrywise nonnegative")
    S = Q + Q.T
    eig = np.linalg.eigvalsh(S)
    L = float(max(abs(eig[0]), abs(eig[-1])))
    M = float(max(0.0, eig[0]))

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        return float(a @ x + x @ Q @ x)

    def gradient(x):
        return a + S @ np.asarray(x, dtype=float)

    return ObjectiveModel("quadratic", evaluate, gradient, L, M, convex=bool(eig[0] >= -1e-12),
                          params={"a": a, "Q": Q})


def regularized_norm(a, alpha: float, beta: float, n: int | None = None,
                     strict: bool = True) -> ObjectiveModel:
    """``f(x) = a^T x + alpha x^T x + beta e^T x / sqrt(1 + beta x^T x)``, ``e`` all ones.

    Requires ``2 alpha > 3 beta^{3/2} sqrt(n)``, which makes the Hessian
    eigenvalues lie in ``[2 alpha - 3 beta^{3/2} sqrt(n), 2 alpha + 3 beta^{3/2} sqrt(n)]``.
    """
    a = _positive_vector(a, strict=strict)
    n = a.size if n is None else int(n)
    if a.size != n:
        raise ValueError(f"a has length {a.size}, expected n={n}")
    if not (alpha > 0 and beta > 0):
        raise ValueError("alpha and beta must be positive")
    spread = 3.0 * beta**1.5 * np.sqrt(n)
    if not 2.0 * alpha > spread:
        raise ValueError(f"need 2*alpha > 3*beta^1.5*sqrt(n) = {spread:.6g}")
    e = np.ones(n)

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        return float(a @ x + alpha * (x @ x) + beta * (e @ x) / np.sqrt(1.0 + beta * (x @ x)))

    def gradient(x):
        x = np.asarray(x, dtype=float)
        s = 1.0 + beta * (x @ x)
        return a + 2.0 * alpha * x + beta / np.sqrt(s) * e - beta**2 * (e @ x) / s**1.5 * x

    return ObjectiveModel("regularized_norm", evaluate, gradient,
                          float(2.0 * alpha + spread), float(2.0 * alpha - spread),
                          params={"a": a, "alpha": alpha, "beta": beta, "n": n})


def sqrt_quadratic(a, beta: float, strict: bool = True) -> ObjectiveModel:
    """``f(x) = a^T x + sqrt(1 + beta x^T x)``; convex with ``L = beta``, not strongly convex."""
    a = _positive_vector(a, strict=strict)
    if not beta > 0:
        raise ValueError("beta must be positive")

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        return float(a @ x + np.sqrt(1.0 + beta * (x @ x)))

    def gradient(x):
        x = np.asarray(x, dtype=float)
        return a + beta / np.sqrt(1.0 + beta * (x @ x)) * x

    return ObjectiveModel("sqrt_quadratic", evaluate, gradient, float(beta), 0.0,
                          params={"a": a, "beta": beta})


def log_sum_exp(n: int) -> ObjectiveModel:
    """``f(x) = log(sum exp(x_i))``, evaluated with a max shift; gradient is softmax."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        if x.shape != (n,):
            raise ValueError(f"expected a vector of length {n}")
        top = x.max()
        return float(top + np.log(np.exp(x - top).sum()))

    def gradient(x):
        x = np.asarray(x, dtype=float)
        w = np.exp(x - x.max())
        return w / w.sum()

    return ObjectiveModel("log_sum_exp", evaluate, gradient, 1.0, 0.0, params={"n": n})


def from_g_form(spec: GFormSpec) -> ObjectiveModel:
    """Assemble ``a^T x + G(x)^T x`` with gradient ``a + G(x) + G'(x)^T x``."""
    a = spec.a

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        return float(a @ x + spec.G(x) @ x)

    def gradient(x):
        x = np.asarray(x, dtype=float)
        return a + spec.G(x) + spec.jacobian(x).T @ x

    return ObjectiveModel(spec.name, evaluate, gradient, float(spec.L1 + spec.L2),
                          spec.strong_convexity_M, params={"a": a})


def quadratic_g_form(a, Q) -> GFormSpec:
    Q = np.asarray(Q, dtype=float)
    norm = float(np.linalg.norm(Q, 2))
    return GFormSpec(a=a, G=lambda x: Q @ x, jacobian=lambda x: Q, L1=norm, L2=norm,
                     name="quadratic")


def regularized_norm_g_form(a, alpha: float, beta: float) -> GFormSpec:
    """``G(x) = alpha x + beta e / sqrt(1 + beta x^T x)`` with the (C1)/(C2) constants."""
    a = np.asarray(a, dtype=float)
    n = a.size
    e = np.ones(n)
    root = beta**1.5 * np.sqrt(n)

    def G(x):
        return alpha * x + beta / np.sqrt(1.0 + beta * (x @ x)) * e

    def jacobian(x):
        return alpha * np.eye(n) - beta**2 / (1.0 + beta * (x @ x)) ** 1.5 * np.outer(e, x)

    return GFormSpec(a=a, G=G, jacobian=jacobian, L1=alpha + root, L2=4.0 * root + 3.0 * alpha,
                     name="regularized_norm", strong_convexity_M=2.0 * alpha - 3.0 * root)


def finite_difference_gradient(f: Callable[[Vector], float], x, h: float | None = None) -> Vector:
    """Central differences; default step ``1e-6 * max(1, ||x||)``."""
    x = np.asarray(x, dtype=float)
    if h is None:
        h = 1e-6 * max(1.0, float(np.linalg.norm(x)))
    if not h > 0:
        raise ValueError("h must be positive")
    g = np.empty_like(x)
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = h
        g[i] = (f(x + step) - f(x - step)) / (2.0 * h)
    return g
