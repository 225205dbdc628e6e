"""Problem configuration files.

Flat ``key = value`` lines with dotted section prefixes; ``#`` starts a
comment.  Vectors and matrices are whitespace separated, matrices row-major::

    objective.kind = quadratic
    objective.a = 1 1
    objective.Q = 1 0 0 1
    set.kind = halfspace_simplex
    solver.x0 = 1 0
    solver.gap_tolerance = 1e-8
    seed = 0
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import objectives
from .objectives import ObjectiveModel
from .oracles import FeasibleSet, SetKind
from .solver import SolverConfig

OBJECTIVE_KINDS = ("quadratic", "regularized_norm", "sqrt_quadratic", "log_sum_exp")
KNOWN_KEYS = {
    "seed",
    "objective.kind", "objective.a", "objective.Q", "objective.alpha", "objective.beta",
    "objective.n",
    "set.kind", "set.n", "set.A", "set.b",
    "solver.x0", "solver.gap_tolerance", "solver.max_iterations", "solver.lipschitz_override",
}


class ConfigError(ValueError):
    def __init__(self, key: str, message: str, line: int | None = None):
        self.key = key
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{key}: {message}")


@dataclass
class ProblemConfig:
    objective: ObjectiveModel
    feasible_set: FeasibleSet
    x0: np.ndarray
    solver: SolverConfig
    seed: int = 0
    raw: dict = field(default_factory=dict, repr=False)


class _Entries:
    def __init__(self, entries: dict[str, tuple[str, int]]):
        self.entries = entries

    def line(self, key):
        return self.entries[key][1] if key in self.entries else None

    def fail(self, key, message):
        raise ConfigError(key, message, self.line(key))

    def has(self, key):
        return key in self.entries

    def text(self, key, default=None):
        if key not in self.entries:
            if default is None:
                raise ConfigError(key, "missing required key")
            return default
        return self.entries[key][0]

    def floats(self, key) -> np.ndarray:
        try:
            v = np.array([float(t) for t in self.text(key).split()])
        except ValueError:
            self.fail(key, "expected whitespace-separated numbers")
        if v.size == 0 or not np.all(np.isfinite(v)):
            self.fail(key, "expected finite numbers")
        return v

    def number(self, key, default=None) -> float:
        if default is not None and key not in self.entries:
            return default
        v = self.floats(key)
        if v.size != 1:
            self.fail(key, "expected a single number")
        return float(v[0])

    def integer(self, key, default=None) -> int:
        if default is not None and key not in self.entries:
            return default
        try:
            return int(self.text(key))
        except ValueError:
            self.fail(key, "expected an integer")


def parse_entries(text: str) -> dict[str, tuple[str, int]]:
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("<syntax>", f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(key, "unknown key", lineno)
        if key in entries:
            raise ConfigError(key, f"duplicate key (first on line {entries[key][1]})", lineno)
        entries[key] = (value, lineno)
    return entries


def _build_objective(e: _Entries, strict: bool) -> ObjectiveModel:
    kind = e.text("objective.kind")
    if kind not in OBJECTIVE_KINDS:
        e.fail("objective.kind", f"must be one of {', '.join(OBJECTIVE_KINDS)}")
    if kind == "log_sum_exp":
        n = e.integer("objective.n")
        if n < 1:
            e.fail("objective.n", "must be >= 1")
        return objectives.log_sum_exp(n)

    a = e.floats("objective.a")
    if strict and not np.all(a > 0):
        e.fail("objective.a", "must be strictly positive")
    if kind == "quadratic":
        Q = e.floats("objective.Q")
        if Q.size != a.size**2:
            e.fail("objective.Q", f"expected {a.size**2} entries for a {a.size}x{a.size} matrix")
        if np.any(Q < 0):
            e.fail("objective.Q", "entries must be nonnegative")
        return objectives.quadratic(a, Q.reshape(a.size, a.size), strict=strict)
    beta = e.number("objective.beta")
    if not beta > 0:
        e.fail("objective.beta", "must be positive")
    if kind == "sqrt_quadratic":
        return objectives.sqrt_quadratic(a, beta, strict=strict)
    alpha = e.number("objective.alpha")
    if e.has("objective.n") and e.integer("objective.n") != a.size:
        e.fail("objective.n", f"does not match len(objective.a) = {a.size}")
    try:
        return objectives.regularized_norm(a, alpha, beta, strict=strict)
    except ValueError as err:
        e.fail("objective.alpha", str(err))


def _build_set(e: _Entries, n: int) -> FeasibleSet:
    kind = e.text("set.kind")
    try:
        kind = SetKind(kind)
    except ValueError:
        e.fail("set.kind", f"must be one of {', '.join(k.value for k in SetKind)}")
    if e.has("set.n") and e.integer("set.n") != n:
        e.fail("set.n", f"does not match the objective dimension {n}")
    if kind is not SetKind.POLYHEDRON:
        return FeasibleSet(kind, n)
    b = e.floats("set.b")
    A = e.floats("set.A")
    if A.size != b.size * n:
        e.fail("set.A", f"expected {b.size * n} entries ({b.size} rows of {n})")
    if not np.all(A > 0):
        e.fail("set.A", "entries must be strictly positive")
    if not np.all(b > 0):
        e.fail("set.b", "entries must be strictly positive")
    return FeasibleSet(kind, n, A.reshape(b.size, n), b)


def parse_config(text: str, strict: bool = True) -> ProblemConfig:
    """Build a problem from config text.

    ``strict=False`` keeps the sign check on ``objective.a`` out of the way so
    that assumption checks can report a violation instead of refusing the
    input.
    """
    entries = parse_entries(text)
    e = _Entries(entries)
    objective = _build_objective(e, strict)
    n = objective.params["n"] if objective.name == "log_sum_exp" else objective.params["a"].size
    fs = _build_set(e, n)

    if e.has("solver.x0"):
        x0 = e.floats("solver.x0")
        if x0.size != n:
            e.fail("solver.x0", f"expected {n} entries")
        if not fs.contains(x0):
            e.fail("solver.x0", f"not in the {fs.kind.value} set")
    else:
        x0 = fs.interior_point()
    tol = e.number("solver.gap_tolerance", 1e-8)
    if tol < 0:
        e.fail("solver.gap_tolerance", "must be >= 0")
    max_it = e.integer("solver.max_iterations", 1000)
    if max_it < 1:
        e.fail("solver.max_iterations", "must be >= 1")
    override = None
    if e.has("solver.lipschitz_override"):
        override = e.number("solver.lipschitz_override")
        if not override > 0:
            e.fail("solver.lipschitz_override", "must be positive")
    seed = e.integer("seed", 0)
    if "FW_SEED" in os.environ:
        try:
            seed = int(os.environ["FW_SEED"])
        except ValueError:
            raise ConfigError("FW_SEED", "environment override must be an integer") from None
    return ProblemConfig(objective, fs, x0, SolverConfig(tol, max_it, override), seed,
                         raw={k: v for k, (v, _) in entries.items()})


def load_config(path, strict: bool = True) -> ProblemConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), strict=strict)
