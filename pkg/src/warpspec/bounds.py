"""Certified eigenvalue and fundamental-tone bounds for radial problems.

* Barta: for ``u > 0`` inside the ball with ``u = 0`` on its boundary,
  ``inf(-Lu/u) <= lambda_1 <= sup(-Lu/u)`` where ``L = d^2/dt^2 + a d/dt``.
* Vector fields: for a radial field ``X = x(t) d/dt``,
  ``lambda_* >= inf(div X - |X|^2)`` with ``div X = x' + a x``.
* Cones and products: both reduce, through the radial field built from a
  reference eigenfunction, to sign conditions on differences of density
  log-derivatives.

Grid extrema are not true extrema, so each certificate also carries a
one-sided slack estimated from the neighbouring grid values.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, HypothesisViolation
from .radial_ode import (DEFAULT_TOL, EigenSolution, RadialCoefficient,
                         solve_first_eigenvalue)
from .spaceform import SpaceForm, cot_kappa
from .warped_metric import RadialMap, radial_coefficient

Fn = Callable[[float], float]


@dataclass(frozen=True)
class TestFunction:
    """Radial test function ``u`` on ``[0, r]`` with two derivatives."""

    __test__ = False  # not a pytest class

    u: Fn
    du: Fn
    d2u: Fn
    r: float
    name: str = "custom"

    @property
    def vanishes_on_boundary(self) -> bool:
        return abs(self.u(self.r)) <= 1e-9

    @classmethod
    def polynomial(cls, r: float, a: float = 0.0, power: int = 1) -> "TestFunction":
        """``u = (1 - s^2)^power (1 + a s^2)`` with ``s = t/r``; positive when ``a > -1``."""
        if a <= -1:
            raise ValueError("need a > -1 for positivity")
        k = power

        def u(t):
            s2 = (t / r) ** 2
            return (1 - s2) ** k * (1 + a * s2)

        def du(t):
            s2 = (t / r) ** 2
            ds2 = 2 * t / r ** 2
            return ds2 * (-k * (1 - s2) ** (k - 1) * (1 + a * s2) + a * (1 - s2) ** k)

        def d2u(t):
            s2 = (t / r) ** 2
            ds2 = 2 * t / r ** 2
            dd = 2 / r ** 2
            g1 = -k * (1 - s2) ** (k - 1) * (1 + a * s2) + a * (1 - s2) ** k
            g2 = (k * (k - 1) * (1 - s2) ** (k - 2) * (1 + a * s2) if k >= 2 else 0.0) \
                - 2 * a * k * (1 - s2) ** (k - 1)
            return dd * g1 + ds2 * ds2 * g2

        return cls(u, du, d2u, r, name=f"poly(a={a:g},k={k})")

    @classmethod
    def cosine(cls, r: float, power: float = 1.0) -> "TestFunction":
        """``u = cos(pi t / 2r)^power`` (``power >= 1``)."""
        w = math.pi / (2 * r)
        q = power

        def u(t):
            return max(math.cos(w * t), 0.0) ** q

        def du(t):
            c = max(math.cos(w * t), 0.0)
            return -q * w * c ** (q - 1) * math.sin(w * t) if c > 0 else (
                -w if q == 1 else 0.0)

        def d2u(t):
            c, s = max(math.cos(w * t), 0.0), math.sin(w * t)
            if c == 0:
                return 0.0 if q != 2 else 2 * w * w
            return q * w * w * ((q - 1) * c ** (q - 2) * s * s - c ** q)

        return cls(u, du, d2u, r, name=f"cos^{q:g}")

    @classmethod
    def from_eigensolution(cls, sol: EigenSolution) -> "TestFunction":
        """The computed eigenfunction; ``u''`` from the radial equation itself."""
        a = sol.coeff.evaluate
        lam = sol.lam_eigenfunction
        p = sol.pole_order

        def u(t):
            return sol.state(t)[0]

        def du(t):
            return sol.state(t)[1]

        def d2u(t):
            if t <= sol.eps:
                return -lam / (p + 1)
            uu, dd = sol.state(t)
            return -a(t) * dd - lam * uu

        return cls(u, du, d2u, sol.r, name="eigenfunction")


@dataclass
class BoundCertificate:
    """Lower/upper bound with grid witnesses and the hypothesis slack.

    ``lower``/``upper`` are grid extrema; ``certified_lower`` subtracts the
    one-sided slack. ``upper`` is ``None`` when no upper bound applies.
    """

    theorem: str
    lower: float | None
    upper: float | None = None
    witness_lower: float | None = None
    witness_upper: float | None = None
    hypothesis_margin: float = 0.0
    lower_slack: float = 0.0
    upper_slack: float = 0.0
    parameters: dict = field(default_factory=dict)

    @property
    def certified_lower(self):
        return None if self.lower is None else self.lower - self.lower_slack

    @property
    def certified_upper(self):
        return None if self.upper is None else self.upper + self.upper_slack

    @property
    def width(self) -> float:
        if self.lower is None or self.upper is None:
            return math.inf
        return self.upper - self.lower

    def valid(self, tol: float = 1e-9) -> bool:
        return self.hypothesis_margin >= -tol

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "BoundCertificate":
        return cls(**d)


def barta_grid(r: float, points: int = 1024) -> np.ndarray:
    """``points`` uniform radii in ``[0, r)``; the boundary is handled analytically."""
    return r * np.arange(points) / points


def _extremum(values, grid, which):
    i = int(np.argmin(values) if which == "min" else np.argmax(values))
    nb = [abs(values[j] - values[i]) for j in (i - 1, i + 1) if 0 <= j < len(values)]
    slack = 0.5 * max(nb) if nb else 0.0
    return float(values[i]), float(grid[i]), float(slack)


def barta_quotient(coeff: RadialCoefficient, u: TestFunction, t: float) -> float:
    """``-(u'' + a u')/u`` with the ``t -> 0`` limit ``-(p + 1) u''(0)/u(0)``."""
    if t == 0:
        return -(coeff.pole_order + 1) * u.d2u(0.0) / u.u(0.0)
    return -(u.d2u(t) + coeff(t) * u.du(t)) / u.u(t)


def barta_bracket(coeff, u: TestFunction, r: float | None = None, grid=None, *,
                  dim: int | None = None, boundary_tol: float = 1e-7) -> BoundCertificate:
    """Two-sided Barta bracket of ``lambda_1`` of the ball of radius ``r``.

    The sup is ``+inf`` (and the inf ``-inf``) when ``Lu`` does not vanish
    together with ``u`` at the boundary.
    """
    coeff = radial_coefficient(coeff, dim)
    r = u.r if r is None else r
    grid = barta_grid(r) if grid is None else np.asarray(grid, dtype=float)
    grid = grid[grid < r]
    uvals = np.array([u.u(float(t)) for t in grid])
    if np.any(uvals <= 0):
        bad = float(grid[np.argmax(uvals <= 0)])
        raise DomainError(f"test function is not positive inside the ball (t={bad})")
    q = np.array([barta_quotient(coeff, u, float(t)) for t in grid])
    lo, t_lo, s_lo = _extremum(q, grid, "min")
    hi, t_hi, s_hi = _extremum(q, grid, "max")
    # behaviour at the boundary, where u = 0
    lap_r = u.d2u(r) + coeff(r) * u.du(r)
    scale = abs(u.du(r)) * max(1.0 / r, abs(coeff(r))) + abs(u.d2u(r))
    if abs(lap_r) > boundary_tol * max(scale, 1e-300):
        if -lap_r > 0:
            hi, t_hi, s_hi = math.inf, r, 0.0
        else:
            lo, t_lo, s_lo = -math.inf, r, 0.0
    return BoundCertificate("barta", lo, hi, t_lo, t_hi, 0.0, s_lo, s_hi,
                            parameters={"r": r, "test_function": u.name,
                                        "coefficient": coeff.name, "points": len(grid)})


def vector_field_bound(coeff, x: Fn, dx: Fn, r: float, grid=None, *,
                       dim: int | None = None) -> BoundCertificate:
    """``inf (x' + a x - x^2)`` for the radial field ``X = x(t) d/dt``.

    A field with ``x(0) != 0`` is singular at the origin; the origin is then
    excluded from the grid.
    """
    coeff = radial_coefficient(coeff, dim)
    grid = barta_grid(r) if grid is None else np.asarray(grid, dtype=float)
    p = coeff.pole_order
    vals, ts = [], []
    for t in grid:
        t = float(t)
        if t == 0:
            if x(0.0) != 0:
                continue
            vals.append((p + 1) * dx(0.0))
        else:
            xv = x(t)
            vals.append(dx(t) + coeff(t) * xv - xv * xv)
        ts.append(t)
    vals, ts = np.array(vals), np.array(ts)
    lo, t_lo, s_lo = _extremum(vals, ts, "min")
    return BoundCertificate("vector_field", lo, None, t_lo, None, 0.0, s_lo,
                            parameters={"r": r, "coefficient": coeff.name, "points": len(ts)})


def log_derivative_field(u: TestFunction):
    """``x = -u'/u`` and its derivative ``x' = -u''/u + (u'/u)^2``."""

    def x(t):
        return -u.du(t) / u.u(t)

    def dx(t):
        g = u.du(t) / u.u(t)
        return -u.d2u(t) / u.u(t) + g * g

    return x, dx


def divergence_identity_check(a_model, a_reference, u: TestFunction, grid=None, *,
                              model_dim=None, reference_dim=None) -> float:
    """Largest residual of ``div_M X - div_ref X = (-u'/u)(H_M - H_ref)`` on the grid.

    ``X = -(u'/u) d/dt`` in both metrics; the two divergences are computed
    separately and compared with the mean-curvature form of their difference.
    """
    am = radial_coefficient(a_model, model_dim)
    ar = radial_coefficient(a_reference, reference_dim)
    grid = barta_grid(u.r) if grid is None else np.asarray(grid, dtype=float)
    x, dx = log_derivative_field(u)
    worst = 0.0
    for t in grid:
        t = float(t)
        if t <= 0 or t >= u.r:
            continue
        xv, dxv = x(t), dx(t)
        div_m = dxv + am(t) * xv
        div_r = dxv + ar(t) * xv
        rhs = xv * (am(t) - ar(t))
        worst = max(worst, abs((div_m - div_r) - rhs))
    return worst


def _profile_dlog(profile) -> Fn:
    if isinstance(profile, RadialMap):
        return lambda t: profile.dlog(t)
    if isinstance(profile, SpaceForm):
        return lambda t: cot_kappa(profile.kappa, t)
    raise TypeError(f"unsupported profile {type(profile).__name__}")


def cone_tone_bound(f, n: int, g, m: int, r: float, grid=None, *,
                    tol: float = DEFAULT_TOL, hyp_tol: float = 1e-9,
                    r_growth: float = 2.0, r_max: float = 256.0) -> BoundCertificate:
    """Fundamental-tone lower bound for the truncated cone ``(0, r) x N`` with
    metric ``dt^2 + f^2 dh^2`` over an ``(n-1)``-manifold ``N``.

    Requires ``(n-1) f'/f >= (m-1) g'/g`` on ``(0, r)``; the bound is then the
    first eigenvalue of the ``m``-ball of radius ``r`` warped by ``g``. With
    ``r = inf`` the reference eigenvalue is followed along doubling radii and
    extrapolated; the spread of successive extrapolations is the slack.
    """
    fl, gl = _profile_dlog(f), _profile_dlog(g)
    r_check = r if math.isfinite(r) else r_max
    grid = (r_check * np.arange(1, 1025) / 1024 if grid is None
            else np.asarray(grid, dtype=float))
    grid = grid[(grid > 0) & (grid <= r_check)]
    D = np.array([(n - 1) * fl(float(t)) - (m - 1) * gl(float(t)) for t in grid])
    slack = hyp_tol * np.maximum(1.0, np.abs([(m - 1) * gl(float(t)) for t in grid]))
    i = int(np.argmin(D + slack))
    margin = float(D[i])
    if n < m or D[i] < -slack[i]:
        w = 0.0 if n < m else float(grid[i])
        raise HypothesisViolation(f"cone hypothesis fails at t={w:.6g} (margin {margin:.3g})",
                                  witness=w, margin=margin)
    coeff = radial_coefficient(g if not isinstance(g, SpaceForm) else SpaceForm(g.kappa, m), m)
    params = {"n": n, "m": m, "r": r}
    if math.isfinite(r):
        lam = solve_first_eigenvalue(coeff, r, tol).lam
        return BoundCertificate("cone", lam, None, None, None, margin, parameters=params)
    # lambda(r) ~ L + A/r^2 + B/r^3 for large r; fit the last three radii
    radius, history, estimates = 8.0, [], []
    while radius <= r_max:
        history.append((radius, solve_first_eigenvalue(coeff, radius, tol).lam))
        if len(history) >= 3:
            R = np.array([h[0] for h in history[-3:]])
            A = np.column_stack([np.ones(3), R ** -2.0, R ** -3.0])
            estimates.append(float(np.linalg.solve(A, [h[1] for h in history[-3:]])[0]))
            if len(estimates) >= 2 and abs(estimates[-1] - estimates[-2]) < 1e-4 * max(
                    abs(estimates[-1]), 1e-12):
                break
        radius *= r_growth
    if not estimates:
        raise ValueError("r_max too small for the r = inf extrapolation")
    spread = abs(estimates[-1] - estimates[-2]) if len(estimates) >= 2 else abs(
        estimates[-1] - history[-1][1])
    params.update({"extrapolated": True, "radii": [h[0] for h in history],
                   "eigenvalues": [h[1] for h in history]})
    return BoundCertificate("cone", max(estimates[-1], 0.0), None, None, None, margin,
                            lower_slack=spread, parameters=params)


def product_tone_bounds(f, m: int, g, n_fiber: int, kappa: float, l: int, r: float,
                        lambda1_W: float, grid=None, *, tol: float = DEFAULT_TOL,
                        hyp_tol: float = 1e-9) -> BoundCertificate:
    """Bounds for ``lambda_1(B(r) x W)`` under ``dt^2 + f^2 dtheta^2 + g^2 dh^2``.

    With ``D = (m-1) f'/f + n g'/g - (l-1) C/S``: ``D >= 0`` gives
    ``lambda_1 >= lambda_1(B_l(kappa, r)) + inf(1/g^2) lambda_1(W)`` and
    ``D <= 0`` the matching upper bound with ``sup``. ``g`` is any positive
    radial map. For ``r = inf`` the ball eigenvalue becomes the McKean tone
    and ``lambda1_W`` is the fundamental tone of the fiber.
    """
    fl = _profile_dlog(f)
    r_check = r if math.isfinite(r) else 50.0
    grid = (r_check * np.arange(1, 1025) / 1024 if grid is None
            else np.asarray(grid, dtype=float))
    grid = grid[(grid > 0) & (grid <= r_check)]
    ref = SpaceForm(kappa, l)
    D, scale = [], []
    for t in grid:
        t = float(t)
        h_ref = (l - 1) * cot_kappa(kappa, t)
        D.append((m - 1) * fl(t) + n_fiber * g.df(t) / g.f(t) - h_ref)
        scale.append(max(1.0, abs(h_ref)))
    D, scale = np.array(D), hyp_tol * np.array(scale)
    pole_gap = (m - 1) - (l - 1)
    ge = bool(np.all(D >= -scale)) and pole_gap >= 0
    le = bool(np.all(D <= scale)) and pole_gap <= 0
    if not (ge or le):
        i_lo, i_hi = int(np.argmin(D)), int(np.argmax(D))
        raise HypothesisViolation(
            f"D changes sign: min {D[i_lo]:.3g} at t={grid[i_lo]:.6g}, "
            f"max {D[i_hi]:.3g} at t={grid[i_hi]:.6g}",
            witness=float(grid[i_lo]), margin=float(D[i_lo]))
    ginv = np.array([1.0 / g.f(float(t)) ** 2 for t in np.concatenate([[0.0], grid])])
    tg = np.concatenate([[0.0], grid])
    if math.isfinite(r):
        base = solve_first_eigenvalue(RadialCoefficient.spaceform(ref), r, tol).lam
    else:
        base = ref.tone()
    i_inf, i_sup = int(np.argmin(ginv)), int(np.argmax(ginv))
    lower = base + ginv[i_inf] * lambda1_W if ge else None
    upper = base + ginv[i_sup] * lambda1_W if le else None
    margin = float(np.min(D)) if ge else float(-np.max(D))
    return BoundCertificate(
        "product", lower, upper, float(tg[i_inf]) if ge else None,
        float(tg[i_sup]) if le else None, margin,
        parameters={"m": m, "n_fiber": n_fiber, "kappa": kappa, "l": l, "r": r,
                    "lambda1_W": lambda1_W, "ball_eigenvalue": base})
