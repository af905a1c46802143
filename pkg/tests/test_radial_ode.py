import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warpspec.errors import BracketError, DomainError
from warpspec.radial_ode import (EigenSolution, RadialCoefficient, eigenfunction_log_derivative,
                                 shoot, solve_first_eigenvalue)
from warpspec.spaceform import SpaceForm

import oracles

R3 = RadialCoefficient.euclidean(3)
R2 = RadialCoefficient.euclidean(2)
S3 = RadialCoefficient.spaceform(SpaceForm(1.0, 3))
H2 = RadialCoefficient.spaceform(SpaceForm(-1.0, 2))


def test_shoot_at_analytic_eigenvalues():
    s = shoot(R3, 1.0, math.pi ** 2)
    assert abs(s.terminal_value) < 1e-9 and s.node_count == 0
    s = shoot(S3, math.pi / 2, 3.0)
    assert abs(s.terminal_value) < 1e-9


def test_shoot_zero_lambda_is_constant():
    s = shoot(R3, 1.0, 0.0)
    assert s.terminal_value == pytest.approx(1.0, abs=1e-15) and s.node_count == 0


def test_shoot_counts_nodes_of_higher_modes():
    # second radial mode of the unit 3-ball sits at (2 pi)^2
    assert shoot(R3, 1.0, 1.5 * (2 * math.pi) ** 2).node_count == 2
    assert shoot(R3, 1.0, 30.0).node_count == 1


def test_shoot_trajectory_matches_sinc():
    s = shoot(R3, 1.0, math.pi ** 2, dense=True)
    for t in (0.1, 0.5, 0.9):
        assert s.dense(t)[0] == pytest.approx(math.sin(math.pi * t) / (math.pi * t), abs=1e-10)


@pytest.mark.parametrize("coeff,r,expected", [
    (R3, 1.0, math.pi ** 2),
    (R2, 1.0, oracles.bessel_j0_first_zero() ** 2),
    (S3, math.pi / 2, 3.0),
])
def test_first_eigenvalue_analytic(coeff, r, expected):
    sol = solve_first_eigenvalue(coeff, r)
    assert sol.lam == pytest.approx(expected, rel=1e-8)
    assert sol.node_count == 0
    assert sol.bracket_width <= sol.tol


def test_eigenfunction_shape():
    sol = solve_first_eigenvalue(R3, 1.0)
    assert np.all(sol.u_samples[:-1] > 0)
    assert abs(sol.u_samples[-1]) < 1e-8
    assert np.all(np.diff(sol.u_samples) <= 1e-15)
    assert sol.u_samples[0] == 1.0


def test_log_derivative_values():
    sol = solve_first_eigenvalue(R3, 1.0)
    assert eigenfunction_log_derivative(sol, 0.0) == 0.0
    assert eigenfunction_log_derivative(sol, 0.5) == pytest.approx(2.0, rel=1e-8)
    vals = [eigenfunction_log_derivative(sol, t) for t in (0.9, 0.99, 0.999)]
    assert vals[0] < vals[1] < vals[2]
    with pytest.raises(DomainError):
        eigenfunction_log_derivative(sol, 1.0)


def test_terminal_value_decreasing_in_lambda():
    sol = solve_first_eigenvalue(H2, 2.0)
    lams = np.linspace(0.0, sol.lam, 12)
    vals = [shoot(H2, 2.0, lam).terminal_value for lam in lams]
    assert np.all(np.diff(vals) < 0)


def test_scaling_law():
    vals = [solve_first_eigenvalue(R3, r).lam * r * r for r in (0.5, 1.0, 2.0)]
    assert max(vals) - min(vals) < 1e-7 * vals[0]


def test_domain_monotonicity():
    lams = [solve_first_eigenvalue(H2, r).lam for r in (0.5, 1.0, 2.0, 4.0)]
    assert all(a > b for a, b in zip(lams, lams[1:]))


def test_step_refinement_and_series_start():
    tol = 1e-10
    base = solve_first_eigenvalue(H2, 1.5, tol).lam
    fine = solve_first_eigenvalue(H2, 1.5, tol, max_step=0.01).lam
    small_eps = solve_first_eigenvalue(H2, 1.5, tol, eps=1.5e-7).lam
    assert abs(fine - base) < tol * base
    assert abs(small_eps - base) < tol * base


def test_solver_errors():
    with pytest.raises(DomainError):
        solve_first_eigenvalue(R3, 0.0)
    with pytest.raises(ValueError):
        solve_first_eigenvalue(R3, 1.0, tol=1e-1)
    with pytest.raises(BracketError):
        solve_first_eigenvalue(R3, 1.0, lambda_max=5.0)
    with pytest.raises(ValueError):
        RadialCoefficient(lambda t: 0.0, 0.0)


def test_regular_part_bound():
    assert R3.regular_part_bound() == 0.0
    assert H2.regular_part_bound() < 1e-3


def test_solution_round_trip():
    sol = solve_first_eigenvalue(R3, 1.0, samples=65)
    back = EigenSolution.from_dict(sol.to_dict())
    assert back == sol
    assert back.state(0.5)[0] == pytest.approx(sol.state(0.5)[0], abs=1e-6)


@settings(max_examples=8)
@given(st.integers(2, 5), st.floats(0.3, 3.0))
def test_euclidean_scaling_property(n, r):
    base = solve_first_eigenvalue(RadialCoefficient.euclidean(n), 1.0).lam
    assert solve_first_eigenvalue(RadialCoefficient.euclidean(n), r).lam * r * r == \
        pytest.approx(base, rel=1e-8)
