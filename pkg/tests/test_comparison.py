import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warpspec import comparison
from warpspec.comparison import (DOMINATED, DOMINATES, EQUAL, INCOMPARABLE, ComparisonReport,
                                 check_mean_curvature_ordering, compare_eigenvalues,
                                 dimension_detect, hypothesis_grid, ricci_from_mean_curvature,
                                 write_margin_csv)
from warpspec.errors import FitError, GridError, TheoremViolation
from warpspec.radial_ode import RadialCoefficient
from warpspec.spaceform import SpaceForm, sine_kappa
from warpspec.warped_metric import (example43_metric, flat_profile, nonisometry_witness,
                                    profile_from_psi, psi_exponential, radial_coefficient,
                                    spaceform_profile)

TOL = 1e-10


def test_hypothesis_grid_layout():
    g = hypothesis_grid(2.0, 256)
    assert len(g) == 256 and g[0] == pytest.approx(2e-4) and g[-1] == 2.0
    assert np.all(np.diff(g) > 0)
    with pytest.raises(GridError):
        hypothesis_grid(1.0, 10)


def test_coarse_grid_rejected():
    with pytest.raises(GridError):
        check_mean_curvature_ordering(SpaceForm(-1.0, 3), SpaceForm(0.0, 3), 100.0,
                                      np.linspace(1, 100, 200))
    with pytest.raises(GridError):
        check_mean_curvature_ordering(SpaceForm(-1.0, 3), SpaceForm(0.0, 3), 1.0,
                                      np.linspace(0, 1, 200))


def test_hyperbolic_dominates_flat():
    v = check_mean_curvature_ordering(spaceform_profile(-1.0), SpaceForm(0.0, 3), 2.0,
                                      model_dim=3)
    assert v.verdict == DOMINATES and v.dominates and not v.dominated
    assert v.min_margin > 0


def test_self_comparison_is_equality():
    v = check_mean_curvature_ordering(spaceform_profile(-0.5), SpaceForm(-0.5, 4), 2.0,
                                      model_dim=4)
    assert v.verdict == EQUAL and v.dominates and v.dominated
    assert v.max_margin == 0 and v.min_margin == 0


def test_psi_model_dominates_strictly():
    prof = profile_from_psi(psi_exponential(0.1, -1.0), -1.0, 2.0)
    v = check_mean_curvature_ordering(prof, SpaceForm(-1.0, 3), 2.0, model_dim=3)
    assert v.verdict == DOMINATES and v.min_margin > 0


def test_crossing_is_incomparable():
    # 3/t against 2 coth t: larger near the origin, smaller beyond t ~ 1.3
    v = check_mean_curvature_ordering(SpaceForm(0.0, 4), SpaceForm(-1.0, 3), 3.0)
    assert v.verdict == INCOMPARABLE
    t = v.crossing_t
    assert 3 / t - 2 / math.tanh(t) == pytest.approx(0.0, abs=0.05)


def test_flat_is_dominated_by_hyperbolic():
    v = check_mean_curvature_ordering(flat_profile(), SpaceForm(-1.0, 3), 1.0, model_dim=3)
    assert v.verdict == DOMINATED


def test_hyperbolic_ball_beats_euclidean():
    report, sm, sr = compare_eigenvalues(SpaceForm(-1.0, 3), SpaceForm(0.0, 3), 1.0, TOL)
    assert report.hypothesis_verdict == DOMINATES and report.ordering_satisfied
    assert report.lambda_reference == pytest.approx(math.pi ** 2, rel=1e-8)
    assert report.lambda_model > report.lambda_reference + 0.5
    assert not report.equality_detected


def test_identical_balls_report_equality():
    report, _, _ = compare_eigenvalues(SpaceForm(0.0, 3), SpaceForm(0.0, 3), 1.0, TOL)
    assert report.equality_detected and report.rigidity_gap == 0.0
    assert report.hypothesis_verdict == EQUAL


@pytest.mark.parametrize("kappa", [-1.0, -0.25])
@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("r", [0.5, 1.0])
def test_example43_equal_eigenvalues(kappa, n, r):
    m = example43_metric(kappa, n)
    report, _, _ = compare_eigenvalues(m, SpaceForm(kappa, n), r, TOL)
    assert report.equality_detected
    assert abs(report.lambda_model - report.lambda_reference) < 100 * TOL * report.lambda_reference
    assert nonisometry_witness(m, kappa, 1.0) > 0


@pytest.mark.parametrize("m,n", [(2, 3), (3, 5)])
def test_cross_dimension_ordering(m, n):
    report, _, _ = compare_eigenvalues(SpaceForm(0.0, n), SpaceForm(0.0, m), 1.0, TOL)
    assert report.hypothesis_verdict == DOMINATES
    assert report.lambda_model > report.lambda_reference
    assert report.rigidity_gap == math.inf and not report.equality_detected
    assert report.model_dim == n and report.reference_dim == m


def test_broken_solver_is_reported(monkeypatch):
    real = comparison.solve_first_eigenvalue
    calls = []

    def swapped(coeff, r, tol):
        sol = real(coeff, r, tol)
        calls.append(sol)
        if len(calls) == 1:
            sol.lam *= 0.5
        return sol

    monkeypatch.setattr(comparison, "solve_first_eigenvalue", swapped)
    with pytest.raises(TheoremViolation) as info:
        compare_eigenvalues(SpaceForm(-1.0, 3), SpaceForm(0.0, 3), 1.0, TOL)
    assert set(info.value.traces) == {"model", "reference"}
    assert info.value.traces["model"]["u"]


def test_report_round_trip():
    report, _, _ = compare_eigenvalues(SpaceForm(-1.0, 2), SpaceForm(0.0, 2), 1.0, TOL)
    assert ComparisonReport.from_dict(report.to_dict()) == report


def test_margin_csv(tmp_path):
    prof = profile_from_psi(psi_exponential(0.2, -1.0), -1.0, 1.5)
    path = tmp_path / "margin.csv"
    write_margin_csv(prof, SpaceForm(-1.0, 3), 1.5, path, model_dim=3)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,H_model,H_ref,margin"
    margins = [float(line.split(",")[3]) for line in lines[1:]]
    assert len(margins) == 1024 and min(margins) >= 0


def test_rigidity_implies_isometry():
    # rotationally symmetric models: a vanishing mean-curvature gap pins f to S
    for c in (0.0, 1e-13, 1e-11):
        prof = profile_from_psi(psi_exponential(c, -1.0), -1.0, 1.0)
        report, _, _ = compare_eigenvalues(prof, SpaceForm(-1.0, 3), 1.0, TOL, model_dim=3)
        tol_h = 1e-9
        if report.rigidity_gap < tol_h:
            ts = np.linspace(0, 1, 201)
            dev = max(abs(prof.f(float(t)) - sine_kappa(-1.0, float(t))) for t in ts)
            assert dev < 10 * tol_h


@settings(max_examples=6)
@given(st.floats(0.01, 0.3), st.floats(-2.0, -0.1), st.floats(0.5, 3.0), st.integers(2, 4))
def test_psi_models_raise_the_eigenvalue(c, kappa, r, n):
    prof = profile_from_psi(psi_exponential(c, kappa), kappa, r)
    report, _, _ = compare_eigenvalues(prof, SpaceForm(kappa, n), r, TOL, model_dim=n)
    assert report.hypothesis_verdict == DOMINATES
    assert report.lambda_model > report.lambda_reference + 10 * TOL
    assert not report.equality_detected


def test_equality_forces_rigidity():
    pairs = [(SpaceForm(-1.0, 3), SpaceForm(-1.0, 3)),
             (profile_from_psi(psi_exponential(0.0, -0.5), -0.5, 1.0), SpaceForm(-0.5, 3)),
             (example43_metric(-1.0, 3), SpaceForm(-1.0, 3))]
    for model, ref in pairs:
        report, _, _ = compare_eigenvalues(model, ref, 1.0, TOL, model_dim=3)
        one_sided = report.hypothesis_verdict in (DOMINATES, DOMINATED, EQUAL)
        if one_sided and abs(report.eigen_gap) < 100 * TOL * report.lambda_reference:
            assert report.rigidity_gap < 1e-9


@pytest.mark.parametrize("kappa,n,expected", [(-1.0, 3, -2.0), (0.0, 3, 0.0), (0.5, 4, 1.5),
                                              (-2.0, 2, -2.0)])
def test_ricci_recovered(kappa, n, expected):
    sf = SpaceForm(kappa, n)
    fit = ricci_from_mean_curvature(sf.mean_curvature, n)
    assert fit["ricci"] == pytest.approx(expected, abs=1e-3)
    assert abs(fit["constant"]) < 1e-6


def test_ricci_fit_guards():
    with pytest.raises(FitError):
        ricci_from_mean_curvature(SpaceForm(0.0, 3).mean_curvature, 3, t_small=0.5)
    with pytest.raises(FitError):
        ricci_from_mean_curvature(SpaceForm(0.0, 3).mean_curvature, 3, points=2)


def test_dimension_detect_families():
    assert dimension_detect(RadialCoefficient.euclidean(5)) == 5
    assert dimension_detect(radial_coefficient(example43_metric(-1.0, 4))) == 4
    for n in (2, 3, 6):
        for kappa in (-1.0, 0.0, 0.7):
            assert dimension_detect(SpaceForm(kappa, n).mean_curvature) == n
    for n in (3, 4, 5):
        assert dimension_detect(radial_coefficient(example43_metric(-0.25, n))) == n
    prof = profile_from_psi(psi_exponential(0.3, -1.0), -1.0, 1.0)
    assert dimension_detect(radial_coefficient(prof, 4)) == 4
    with pytest.raises(FitError):
        dimension_detect(lambda t: 2.5 / t)


def test_cross_dimension_equality_pair_agrees():
    # equality of eigenvalues across dimensions requires n = m
    a, b = SpaceForm(-1.0, 3), SpaceForm(-1.0, 3)
    report, _, _ = compare_eigenvalues(a, b, 1.0, TOL)
    assert report.equality_detected
    assert dimension_detect(a.mean_curvature) == dimension_detect(b.mean_curvature)
