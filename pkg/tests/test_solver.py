import cmath
import math

import numpy as np
import pytest

from artifact.filling import Slope
from artifact.solver import (
    REGULAR,
    DegenerateShape,
    ShapeAssignment,
    SolverConfig,
    SolverError,
    evaluate,
    jacobian,
    log_triple,
    newton,
    residual,
    solve,
)
from artifact.triangulation import GluingSystem, gluing_system, load_fixture

from conftest import FIG8_SHAPE


def test_figure_eight_regular(solved):
    _, sys_, sol = solved["figure_eight"]
    assert all(abs(z - FIG8_SHAPE) < 1e-10 for z in sol.shapes)
    assert residual(sys_, sol) < 1e-12


def test_whitehead_right_angled(solved):
    _, sys_, sol = solved["whitehead"]
    assert all(abs(z - 1j) < 1e-10 for z in sol.shapes)


@pytest.mark.parametrize("name", ["figure_eight", "whitehead", "borromean"])
def test_converged(solved, name):
    _, sys_, sol = solved[name]
    assert residual(sys_, sol) < 1e-12
    assert sol.geometric


def test_wrong_shapes_have_residual():
    sys_ = gluing_system(load_fixture("whitehead"))
    assert residual(sys_, [REGULAR] * 4) > 1e-3


def test_filled_solution_not_complete():
    tri = load_fixture("whitehead")
    filled = gluing_system(tri, [Slope(1, 2), Slope()])
    sol = solve(filled, solve(gluing_system(tri)))
    assert residual(filled, sol) < 1e-12
    assert residual(gluing_system(tri), sol) > 1e-6


def test_empty_system():
    with pytest.raises(SolverError):
        solve(GluingSystem((), (), (), ()))


def test_residual_rejects_pole():
    sys_ = gluing_system(load_fixture("figure_eight"))
    with pytest.raises((ValueError, ZeroDivisionError, SolverError)):
        residual(sys_, [1.0, FIG8_SHAPE])


def test_log_identity():
    for z in (FIG8_SHAPE, 1j, complex(0.3, 2.1), complex(-4, 0.01)):
        a, b, c = log_triple(z)
        assert abs(a + b + c - 1j * math.pi) < 1e-12


def test_log_identity_at_solutions(solved):
    for _, _, sol in solved.values():
        for a, b, c in sol.log_branch_data:
            assert abs(a + b + c - 1j * math.pi) < 1e-12


def test_jacobian_matches_finite_differences(solved):
    _, sys_, sol = solved["borromean"]
    z = np.array(sol.shapes) + 0.01 * (1 + 1j)
    jac = jacobian(sys_, z)
    h = 1e-7
    for j in range(sys_.n):
        dz = np.zeros(sys_.n, dtype=complex)
        dz[j] = h
        fd = (evaluate(sys_, z + dz) - evaluate(sys_, z - dz)) / (2 * h)
        assert np.max(np.abs(fd - jac[:, j])) < 1e-6


@pytest.mark.parametrize("name", ["whitehead", "borromean"])
def test_quadratic_convergence(name):
    sys_ = gluing_system(load_fixture(name))
    start = [complex(0.1, 0.9) + 0.05 * k for k in range(sys_.n)]
    sol = newton(sys_, start)
    hist = [r for r in sol.history if r > 0]
    pairs = [(a, b) for a, b in zip(hist, hist[1:]) if a < 1e-3 and b > 1e-14]
    assert pairs
    for a, b in pairs:
        assert b <= 10.0 * a * a


def test_deterministic():
    sys_ = gluing_system(load_fixture("borromean"))
    a = solve(sys_, [complex(0.2, 1.1)] * 8)
    b = solve(sys_, [complex(0.2, 1.1)] * 8)
    assert a.shapes == b.shapes


def test_degeneration_guard():
    # this filling collapses the whitehead fixture
    tri = load_fixture("whitehead")
    sys_ = gluing_system(tri, [Slope(1, 0), Slope()])
    with pytest.raises(SolverError):
        solve(sys_, solve(gluing_system(tri)), SolverConfig(retries=2))


def test_regular_assignment():
    r = ShapeAssignment.regular(3)
    assert r.n == 3 and r.geometric
    assert abs(r.shapes[0] - cmath.exp(1j * math.pi / 3)) < 1e-15
