"""Mean-curvature comparison of geodesic balls and its eigenvalue consequences.

If the distance spheres of the model ball are at least as mean-convex as
those of the reference ball at every radius, the model's first Dirichlet
eigenvalue is at least the reference one (and conversely); equality of the
eigenvalues forces equality of the mean curvatures. The reference may have a
different dimension, in which case equality can only occur when the
dimensions agree.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import FitError, GridError, TheoremViolation
from .radial_ode import DEFAULT_TOL, solve_first_eigenvalue
from .warped_metric import geometry_dim, radial_coefficient

MIN_POINTS_PER_UNIT = 16
MIN_POINTS = 64

DOMINATES = "dominates"
DOMINATED = "dominated"
EQUAL = "equal"
INCOMPARABLE = "incomparable"


def hypothesis_grid(r: float, points: int = 1024, *, near_zero: float = 1e-4) -> np.ndarray:
    """Log-spaced radii near the origin followed by uniform radii up to ``r``."""
    if points < MIN_POINTS:
        raise GridError(f"need at least {MIN_POINTS} grid points, got {points}")
    n_log = points // 4
    logs = r * np.logspace(math.log10(near_zero), -2, n_log, endpoint=False)
    uni = np.linspace(r * 1e-2, r, points - n_log)
    return np.concatenate([logs, uni])


def _check_density(grid, r):
    n_uniform = np.count_nonzero(grid >= 1e-2 * r)
    if n_uniform < MIN_POINTS_PER_UNIT * r:
        raise GridError(
            f"grid too coarse: {n_uniform} points on (0, {r}] "
            f"(minimum {MIN_POINTS_PER_UNIT} per unit radius)"
        )


@dataclass
class OrderingVerdict:
    """Outcome of comparing two mean-curvature functions on ``(0, r]``.

    ``margin = H_model - H_reference``; ``pole_gap`` is the difference of the
    leading ``1/t`` coefficients, which decides the sign close to the origin.
    """

    verdict: str
    min_margin: float
    t_min: float
    max_margin: float
    t_max: float
    pole_gap: float
    crossing_t: float | None = None

    @property
    def dominates(self) -> bool:
        return self.verdict in (DOMINATES, EQUAL)

    @property
    def dominated(self) -> bool:
        return self.verdict in (DOMINATED, EQUAL)


def mean_curvature_margins(model, reference, r, grid=None, *, model_dim=None,
                           reference_dim=None):
    """Rows ``(t, H_model, H_reference, margin)`` on the hypothesis grid."""
    grid = hypothesis_grid(r) if grid is None else np.asarray(grid, dtype=float)
    hm = radial_coefficient(model, model_dim)
    hr = radial_coefficient(reference, reference_dim)
    Hm = np.array([hm(float(t)) for t in grid])
    Hr = np.array([hr(float(t)) for t in grid])
    return grid, Hm, Hr, Hm - Hr


def check_mean_curvature_ordering(model, reference, r: float, grid=None, *,
                                  model_dim=None, reference_dim=None,
                                  tol: float = 1e-9) -> OrderingVerdict:
    """Decide whether ``H_model >= H_ref`` (dominates) or ``<=`` (dominated) on ``(0, r]``.

    Margins within ``tol * max(1, |H_ref|)`` of zero count for both sides.
    """
    grid = hypothesis_grid(r) if grid is None else np.asarray(grid, dtype=float)
    if np.any(grid <= 0) or np.max(grid) > r * (1 + 1e-12):
        raise GridError("comparison grid must lie in (0, r]")
    _check_density(grid, r)
    hm = radial_coefficient(model, model_dim)
    hr = radial_coefficient(reference, reference_dim)
    t, Hm, Hr, margin = mean_curvature_margins(hm, hr, r, grid)
    slack = tol * np.maximum(1.0, np.abs(Hr))
    pole_gap = hm.pole_order - hr.pole_order
    ge = bool(np.all(margin >= -slack)) and pole_gap >= 0
    le = bool(np.all(margin <= slack)) and pole_gap <= 0
    imin, imax = int(np.argmin(margin)), int(np.argmax(margin))
    crossing = None
    if ge and le:
        verdict = EQUAL
    elif ge:
        verdict = DOMINATES
    elif le:
        verdict = DOMINATED
    else:
        verdict = INCOMPARABLE
        sign = np.sign(np.where(np.abs(margin) <= slack, 0.0, margin))
        if pole_gap != 0:
            sign = np.concatenate([[np.sign(pole_gap)], sign])
            tt = np.concatenate([[0.0], t])
        else:
            tt = t
        nz = np.nonzero(sign)[0]
        flips = nz[1:][sign[nz[1:]] != sign[nz[:-1]]]
        if flips.size:
            crossing = float(tt[flips[0]])
    return OrderingVerdict(verdict, float(margin[imin]), float(t[imin]),
                           float(margin[imax]), float(t[imax]), float(pole_gap), crossing)


@dataclass
class ComparisonReport:
    """Eigenvalues of a model and a reference ball with the hypothesis verdict."""

    hypothesis_verdict: str
    lambda_model: float
    lambda_reference: float
    ordering_satisfied: bool
    equality_detected: bool
    rigidity_gap: float
    witness_t: float
    worst_margin: float
    r: float
    tol: float
    model_dim: int
    reference_dim: int
    eigen_gap: float = 0.0
    model: dict = field(default_factory=dict)
    reference: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ComparisonReport":
        return cls(**d)


def _describe(geometry):
    if hasattr(geometry, "to_dict"):
        return geometry.to_dict()
    if hasattr(geometry, "kappa"):
        return {"kind": "spaceform", "kappa": geometry.kappa, "dim": geometry.dim}
    return {"kind": type(geometry).__name__}


def compare_eigenvalues(model, reference, r: float, tol: float = DEFAULT_TOL, *,
                        model_dim=None, reference_dim=None, grid=None,
                        tol_eq: float | None = None, tol_h: float = 1e-9,
                        slack: float | None = None):
    """Solve both radial eigenproblems and check the ordering the hypothesis implies.

    Returns ``(report, model_solution, reference_solution)``. An ordering that
    contradicts the verdict raises ``TheoremViolation`` carrying both
    eigenfunction traces.
    """
    nm = geometry_dim(model, model_dim)
    nr = geometry_dim(reference, reference_dim)
    verdict = check_mean_curvature_ordering(model, reference, r, grid, model_dim=nm,
                                            reference_dim=nr, tol=tol_h)
    sm = solve_first_eigenvalue(radial_coefficient(model, nm), r, tol)
    sr = solve_first_eigenvalue(radial_coefficient(reference, nr), r, tol)
    lm, lr = sm.lam, sr.lam
    scale = max(1.0, abs(lr))
    tol_eq = 100 * tol if tol_eq is None else tol_eq
    slack = 10 * tol * scale if slack is None else slack

    ok = True
    if verdict.dominates and lm < lr - slack:
        ok = False
    if verdict.dominated and lm > lr + slack:
        ok = False
    if not ok:
        raise TheoremViolation(
            f"verdict {verdict.verdict} but lambda_model={lm!r}, lambda_reference={lr!r}",
            traces={"model": sm.to_dict(), "reference": sr.to_dict()},
        )

    if verdict.pole_gap != 0:
        gap = math.inf
    else:
        _, _, _, margin = mean_curvature_margins(model, reference, r, grid if grid is not None
                                                 else hypothesis_grid(r),
                                                 model_dim=nm, reference_dim=nr)
        gap = float(np.max(np.abs(margin)))
    close = abs(lm - lr) < tol_eq * scale
    one_sided = verdict.verdict in (DOMINATES, DOMINATED, EQUAL)
    equality = close and (gap < tol_h or not one_sided)
    report = ComparisonReport(
        hypothesis_verdict=verdict.verdict, lambda_model=lm, lambda_reference=lr,
        ordering_satisfied=ok and one_sided, equality_detected=equality, rigidity_gap=gap,
        witness_t=verdict.t_min if verdict.verdict != DOMINATED else verdict.t_max,
        worst_margin=verdict.min_margin if verdict.verdict != DOMINATED else verdict.max_margin,
        r=r, tol=tol, model_dim=nm, reference_dim=nr, eigen_gap=lm - lr,
        model=_describe(model), reference=_describe(reference),
    )
    return report, sm, sr


def write_margin_csv(model, reference, r, path, grid=None, *, model_dim=None,
                     reference_dim=None) -> None:
    t, Hm, Hr, margin = mean_curvature_margins(model, reference, r, grid, model_dim=model_dim,
                                               reference_dim=reference_dim)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "H_model", "H_ref", "margin"])
        for row in zip(t, Hm, Hr, margin):
            w.writerow([f"{x:.17g}" for x in row])


# ---------------------------------------------------------------------------
# small-radius expansions


def _small_radii(t_small, points):
    return t_small * np.logspace(-2, 0, points)


def ricci_from_mean_curvature(H, n: int, *, t_small: float = 0.05, points: int = 32) -> dict:
    """Least-squares Ricci curvature from ``H(t) - (n-1)/t = c0 - Ric t/3 + c2 t^2``.

    ``c0`` picks up ``(n-1) g''(0)`` when the warping function is not odd. Returns
    ``{"ricci", "constant", "residual"}``.
    """
    if t_small > 0.05:
        raise FitError("the expansion is only fitted on t <= 0.05")
    if points < 4:
        raise FitError(f"need at least 4 sample radii, got {points}")
    t = _small_radii(t_small, points)
    y = np.array([H(float(x)) for x in t]) - (n - 1) / t
    A = np.column_stack([np.ones_like(t), t, t * t])
    coef, res, rank, sv = np.linalg.lstsq(A, y, rcond=None)
    if rank < 3 or sv[-1] / sv[0] < 1e-12:
        raise FitError("ill-conditioned Ricci fit")
    resid = float(np.max(np.abs(A @ coef - y)))
    return {"ricci": float(-3.0 * coef[1]), "constant": float(coef[0]), "residual": resid}


def dimension_detect(H, *, t_small: float = 1e-4, tol: float = 0.01) -> int:
    """Dimension ``n`` from ``t H(t) -> n - 1`` as ``t -> 0``.

    The limit is extrapolated linearly from two radii to remove the ``O(t)`` term.
    """
    t1, t2 = t_small, t_small / 10
    y1, y2 = t1 * H(t1), t2 * H(t2)
    limit = y2 - (y1 - y2) * t2 / (t1 - t2)
    k = round(limit)
    if abs(limit - k) > tol:
        raise FitError(f"t H(t) tends to {limit:.6g}, not an integer")
    return int(k) + 1
