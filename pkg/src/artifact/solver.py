"""Newton's method on the logarithmic gluing equations.

The unknowns are the shapes ``z_j`` themselves. Row ``r`` of a gluing system
evaluates to ``sum_j a_j log z_j + b_j log z'_j + c_j log z''_j - nu pi i``
with principal logarithms, ``z' = 1/(1 - z)`` and ``z'' = 1 - 1/z``.
"""
from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .triangulation import GluingSystem

REGULAR = cmath.exp(1j * math.pi / 3)


class SolverError(RuntimeError):
    """Newton failed to produce a solution."""


class NoConvergence(SolverError):
    pass


class DegenerateShape(SolverError):
    """A shape came within the guard radius of 0 or 1."""


class RankDeficient(SolverError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-12
    max_iter: int = 50
    guard: float = 1e-8
    retries: int = 8
    seed: int = 0
    rank_rtol: float = 1e-10
    max_halvings: int = 10


@dataclass(frozen=True)
class ShapeAssignment:
    shapes: tuple[complex, ...]
    history: tuple[float, ...] = field(default=(), compare=False)

    @property
    def n(self) -> int:
        return len(self.shapes)

    @property
    def log_branch_data(self) -> tuple[tuple[complex, complex, complex], ...]:
        return tuple(log_triple(z) for z in self.shapes)

    @property
    def geometric(self) -> bool:
        return all(z.imag > 0 for z in self.shapes)

    @classmethod
    def regular(cls, n: int) -> "ShapeAssignment":
        return cls((REGULAR,) * n)


def log_triple(z: complex) -> tuple[complex, complex, complex]:
    if z == 0 or z == 1:
        raise DegenerateShape(f"shape {z} is a logarithm pole")
    return cmath.log(z), cmath.log(1 / (1 - z)), cmath.log(1 - 1 / z)


def _matrices(sys: GluingSystem):
    rows = np.array(sys.rows, dtype=float).reshape(len(sys.rows), sys.n, 3)
    return rows[:, :, 0], rows[:, :, 1], rows[:, :, 2], np.array(sys.targets, dtype=float)


def evaluate(sys: GluingSystem, z: np.ndarray) -> np.ndarray:
    """Row values minus targets (complex vector)."""
    a, b, c, nu = _matrices(sys)
    if np.any(z == 0) or np.any(z == 1):
        raise DegenerateShape("shape equal to 0 or 1")
    lz = np.log(z)
    lp = np.log(1 / (1 - z))
    lpp = np.log(1 - 1 / z)
    return a @ lz + b @ lp + c @ lpp - nu * math.pi * 1j


def jacobian(sys: GluingSystem, z: np.ndarray) -> np.ndarray:
    a, b, c, _ = _matrices(sys)
    return a / z + b / (1 - z) + c / (z * (z - 1))


def residual(sys: GluingSystem, shapes) -> float:
    """Infinity norm of the row values minus targets."""
    z = np.array(_shape_list(shapes), dtype=complex)
    if len(z) != sys.n:
        raise ValueError(f"{len(z)} shapes for a system in {sys.n} unknowns")
    return float(np.max(np.abs(evaluate(sys, z)))) if len(sys.rows) else 0.0


def _shape_list(shapes) -> list[complex]:
    if isinstance(shapes, ShapeAssignment):
        return list(shapes.shapes)
    return [complex(z) for z in shapes]


def newton(sys: GluingSystem, z0: Sequence[complex], config: SolverConfig = SolverConfig()) -> ShapeAssignment:
    """One Newton run from ``z0``; raises on failure."""
    z = np.array(z0, dtype=complex)
    f = evaluate(sys, z)
    res = float(np.max(np.abs(f)))
    history = [res]
    for _ in range(config.max_iter):
        if res < config.tol:
            return ShapeAssignment(tuple(complex(x) for x in z), tuple(history))
        jac = jacobian(sys, z)
        sv = np.linalg.svd(jac, compute_uv=False)
        if len(sv) < sys.n or sv[-1] <= config.rank_rtol * sv[0]:
            raise RankDeficient("Jacobian is numerically rank-deficient")
        step = np.linalg.lstsq(jac, -f, rcond=None)[0]
        t = 1.0
        for _ in range(config.max_halvings):
            trial = z + t * step
            if np.any(np.abs(trial) < config.guard) or np.any(np.abs(1 - trial) < config.guard):
                t /= 2
                continue
            ftrial = evaluate(sys, trial)
            rtrial = float(np.max(np.abs(ftrial)))
            if rtrial < res or t < 2 ** -(config.max_halvings - 1):
                break
            t /= 2
        else:
            raise DegenerateShape("a shape entered the degeneration guard")
        z, f, res = trial, ftrial, rtrial
        if np.any(np.abs(z) < config.guard) or np.any(np.abs(1 - z) < config.guard):
            raise DegenerateShape("a shape entered the degeneration guard")
        history.append(res)
    if res < config.tol:
        return ShapeAssignment(tuple(complex(x) for x in z), tuple(history))
    raise NoConvergence(f"residual {res:.3e} after {config.max_iter} iterations")


def solve(
    sys: GluingSystem,
    init: Optional[ShapeAssignment] = None,
    config: SolverConfig = SolverConfig(),
) -> ShapeAssignment:
    """Solve the system, retrying from perturbed starts on failure."""
    if sys.n == 0 or len(sys.rows) == 0:
        raise SolverError("empty system")
    start = _shape_list(init) if init is not None else [REGULAR] * sys.n
    if len(start) != sys.n:
        raise ValueError(f"initial guess has {len(start)} shapes, system has {sys.n}")
    try:
        return newton(sys, start, config)
    except SolverError as exc:
        last = exc
    rng = random.Random(config.seed)
    for _ in range(config.retries):
        guess = []
        for _ in range(sys.n):
            w = REGULAR + complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.4, 0.6))
            guess.append(complex(w.real, max(w.imag, 0.05)))
        try:
            return newton(sys, guess, config)
        except SolverError as exc:
            last = exc
    raise last
