"""Radial Dirichlet eigenproblem on a geodesic ball by shooting.

The first Dirichlet eigenfunction of a ball whose radial volume density
``w(t)`` has log-derivative ``a(t) = w'/w`` is radial and solves

    u'' + a(t) u' + lam u = 0,   u(0) = 1,  u'(0) = 0,  u(r) = 0.

``a`` has a simple pole ``p/t`` at the origin (``p = n - 1`` for an
n-dimensional ball), so integration starts from a two-term series at a small
``eps`` and proceeds with an adaptive embedded Runge-Kutta pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BracketError, DomainError, IntegrationError, TheoremViolation
from .spaceform import SpaceForm, cot_kappa

DEFAULT_TOL = 1e-10
DEFAULT_SAMPLES = 1025
EPS_FACTOR = 1e-6
LAMBDA_MAX_FACTOR = 1e6
# scipy refuses relative tolerances much below 100 machine epsilons
_RTOL_FLOOR = 1e-13


@dataclass(frozen=True)
class RadialCoefficient:
    """Log-derivative ``a(t)`` of a radial volume density.

    ``pole_order`` is the ``p`` in ``a(t) = p/t + O(1)``.
    """

    evaluate: Callable[[float], float]
    pole_order: float
    name: str = ""

    def __post_init__(self):
        if self.pole_order < 1:
            raise ValueError(f"pole order must be >= 1, got {self.pole_order}")

    def __call__(self, t):
        return self.evaluate(t)

    def regular_part_bound(self, eps: float = 1e-3, points: int = 16) -> float:
        """Largest ``|a(t) - p/t|`` on ``(0, eps]``; finite for a valid coefficient."""
        ts = eps * np.logspace(-6, 0, points)
        return max(abs(self.evaluate(float(t)) - self.pole_order / t) for t in ts)

    @classmethod
    def euclidean(cls, dim: int) -> "RadialCoefficient":
        p = float(dim - 1)
        return cls(lambda t: p / t, p, name=f"R^{dim}")

    @classmethod
    def spaceform(cls, sf: SpaceForm) -> "RadialCoefficient":
        p = float(sf.dim - 1)
        kappa = sf.kappa
        if kappa == 0:
            return cls.euclidean(sf.dim)
        return cls(lambda t: p * cot_kappa(kappa, t), p, name=f"M^{sf.dim}({kappa:g})")


@dataclass
class Shot:
    """Trajectory of one initial value problem at a fixed trial eigenvalue."""

    lam: float
    r: float
    eps: float
    terminal_value: float
    terminal_slope: float
    node_count: int
    t: np.ndarray
    u: np.ndarray
    du: np.ndarray
    dense: object = field(default=None, repr=False)


def _tolerances(tol):
    rtol = max(tol / 100.0, _RTOL_FLOOR)
    # relative control only: eigenfunctions on large hyperbolic balls decay
    # like exp(-t/2) and an absolute floor would swamp the sign of u(r)
    atol = 1e-300
    return rtol, atol


def shoot(coeff: RadialCoefficient, r: float, lam: float, *, tol: float = DEFAULT_TOL,
          eps: float | None = None, dense: bool = False, max_step: float = np.inf) -> Shot:
    """Integrate the radial initial value problem from the origin to ``r``.

    Returns the terminal value ``u(r; lam)``, the number of sign changes of
    ``u`` on ``(0, r)`` and the accepted-step trajectory.
    """
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    if eps is None:
        eps = EPS_FACTOR * r
    p = coeff.pole_order
    u0 = 1.0 - lam * eps * eps / (2.0 * (p + 1.0))
    du0 = -lam * eps / (p + 1.0)
    a = coeff.evaluate

    def rhs(t, y):
        return [y[1], -a(t) * y[1] - lam * y[0]]

    def crossing(t, y):
        return y[0]

    rtol, atol = _tolerances(tol)
    res = solve_ivp(rhs, (eps, r), [u0, du0], method="DOP853", rtol=rtol, atol=atol,
                    events=crossing, dense_output=dense, max_step=max_step)
    if res.status == -1:
        raise IntegrationError(f"integration failed at t={res.t[-1]:.6g}: {res.message}",
                               t_fail=float(res.t[-1]))
    u_end = float(res.y[0, -1])
    # a crossing detected at the terminal point is the boundary zero itself
    roots = res.t_events[0]
    nodes = int(np.count_nonzero(roots < r * (1.0 - 1e-12)))
    return Shot(lam=lam, r=r, eps=eps, terminal_value=u_end,
                terminal_slope=float(res.y[1, -1]), node_count=nodes,
                t=res.t, u=res.y[0], du=res.y[1], dense=res.sol)


def _below(shot: Shot) -> bool:
    """True when the trial eigenvalue lies strictly below the first eigenvalue."""
    return shot.node_count == 0 and shot.terminal_value > 0


@dataclass
class EigenSolution:
    """First Dirichlet eigenpair of a radial problem, ``u`` normalized by ``u(0) = 1``."""

    lam: float
    r: float
    grid: np.ndarray
    u_samples: np.ndarray
    du_samples: np.ndarray
    node_count: int
    bracket_width: float
    tol: float
    pole_order: float
    eps: float = 0.0
    shots: int = 0
    coeff: RadialCoefficient | None = field(default=None, repr=False, compare=False)
    shot: Shot | None = field(default=None, repr=False, compare=False)

    @property
    def lam_eigenfunction(self) -> float:
        """Trial eigenvalue of the stored trajectory (lower bracket end)."""
        return self.shot.lam if self.shot is not None else self.lam

    def state(self, t):
        """``(u(t), u'(t))`` from the integrator's dense output."""
        t = float(t)
        if t < 0 or t > self.r:
            raise DomainError(f"t={t} outside [0, {self.r}]")
        if t <= self.eps or self.shot is None or self.shot.dense is None:
            if t <= self.eps:
                lam, p = self.lam_eigenfunction, self.pole_order
                return 1.0 - lam * t * t / (2 * (p + 1)), -lam * t / (p + 1)
            u = float(np.interp(t, self.grid, self.u_samples))
            du = float(np.interp(t, self.grid, self.du_samples))
            return u, du
        y = self.shot.dense(t)
        return float(y[0]), float(y[1])

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "r": self.r,
            "node_count": self.node_count,
            "bracket_width": self.bracket_width,
            "tol": self.tol,
            "pole_order": self.pole_order,
            "eps": self.eps,
            "shots": self.shots,
            "grid": [float(x) for x in self.grid],
            "u": [float(x) for x in self.u_samples],
            "du": [float(x) for x in self.du_samples],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EigenSolution":
        return cls(lam=d["lambda"], r=d["r"], grid=np.asarray(d["grid"], dtype=float),
                   u_samples=np.asarray(d["u"], dtype=float),
                   du_samples=np.asarray(d["du"], dtype=float),
                   node_count=d["node_count"], bracket_width=d["bracket_width"],
                   tol=d["tol"], pole_order=d["pole_order"], eps=d["eps"], shots=d["shots"])

    def __eq__(self, other):
        if not isinstance(other, EigenSolution):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def solve_first_eigenvalue(coeff: RadialCoefficient, r: float, tol: float = DEFAULT_TOL, *,
                           eps: float | None = None, lambda_max: float | None = None,
                           samples: int = DEFAULT_SAMPLES,
                           max_step: float = np.inf) -> EigenSolution:
    """Smallest ``lam`` with ``u(r; lam) = 0`` and no interior node.

    An upper bracket is found by doubling from ``1/r^2``; the bracket is then
    shrunk by bisection, switching to Illinois false-position steps once the
    upper end holds exactly one node, until its relative width is ``<= tol``.
    """
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    if not 1e-14 < tol < 1e-2:
        raise ValueError(f"tol must lie in (1e-14, 1e-2), got {tol}")
    if lambda_max is None:
        lambda_max = LAMBDA_MAX_FACTOR / (r * r)
    if eps is None:
        eps = EPS_FACTOR * r

    def fire(lam):
        nonlocal count
        count += 1
        return shoot(coeff, r, lam, tol=tol, eps=eps, max_step=max_step)

    count = 0
    lo_shot = fire(0.0)
    if not _below(lo_shot):
        raise TheoremViolation("u(r; 0) must be positive with no node")
    hi = 1.0 / (r * r)
    hi_shot = fire(hi)
    while _below(hi_shot):
        lo_shot = hi_shot
        hi *= 2.0
        if hi > lambda_max:
            raise BracketError(f"no eigenvalue bracket below lambda_max={lambda_max:g}")
        hi_shot = fire(hi)

    lo = lo_shot.lam
    flo, fhi = lo_shot.terminal_value, hi_shot.terminal_value
    side = 0
    while hi - lo > tol * hi:
        usable = hi_shot.node_count <= 1 and hi_shot.terminal_value < 0
        if usable:
            trial = (lo * fhi - hi * flo) / (fhi - flo)
            # keep the trial point well inside the bracket
            margin = 0.01 * (hi - lo)
            trial = min(max(trial, lo + margin), hi - margin)
        else:
            trial = 0.5 * (lo + hi)
        s = fire(trial)
        if _below(s):
            if side == -1 and usable:
                fhi *= 0.5
            lo_shot, lo, flo, side = s, trial, s.terminal_value, -1
        else:
            if side == 1 and usable:
                flo *= 0.5
            hi_shot, hi, fhi, side = s, trial, s.terminal_value, 1
    width = (hi - lo) / hi if hi > 0 else 0.0

    final = shoot(coeff, r, lo_shot.lam, tol=tol, eps=eps, dense=True, max_step=max_step)
    count += 1
    if final.node_count > 0:
        raise TheoremViolation(f"higher mode caught: {final.node_count} interior nodes")
    grid = np.linspace(0.0, r, samples)
    y = final.dense(np.clip(grid, eps, r))
    u_s, du_s = y[0].copy(), y[1].copy()
    u_s[0], du_s[0] = 1.0, 0.0
    u_s[-1] = final.terminal_value
    return EigenSolution(lam=0.5 * (lo + hi), r=r, grid=grid, u_samples=u_s, du_samples=du_s,
                         node_count=final.node_count, bracket_width=width, tol=tol,
                         pole_order=coeff.pole_order, eps=eps, shots=count, coeff=coeff,
                         shot=final)


def eigenfunction_log_derivative(sol: EigenSolution, t: float, *,
                                 boundary_tol: float = 1e-12) -> float:
    """``-u'(t)/u(t)``, the radial component of the comparison vector field."""
    t = float(t)
    if t <= sol.eps:
        return sol.lam_eigenfunction * t / (sol.pole_order + 1.0)
    if t >= sol.r:
        raise DomainError(f"t={t} is on the boundary, where u vanishes")
    u, du = sol.state(t)
    if u <= boundary_tol:
        raise DomainError(f"eigenfunction vanishes at t={t} (u={u:.3g})")
    return -du / u
