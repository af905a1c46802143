"""Rotationally symmetric metrics ``dt^2 + f(t)^2 dtheta^2`` and diagonal
metrics ``dt^2 + sum_i phi_i(t)^2 dtheta_i^2``.

Profiles carry closed-form (or quadrature-consistent) first and second
derivatives; nothing here differentiates numerically.

The comparison function of a profile against the space form of curvature
``kappa`` is ``psi = -f' S + f C`` (``S, C`` the generalized sine/cosine). It
controls both the mean curvature gap and the radial curvature:

    H - H_kappa = -(n-1) psi / (f S),      psi' = S f (K - kappa).

Inverting the first relation gives ``f = S (1 - int_0^t psi/S^2)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicHermiteSpline

from .errors import ConstructionError, DomainError
from .radial_ode import RadialCoefficient
from .spaceform import SpaceForm, cosine_kappa, cot_kappa, sine_kappa

Fn = Callable[[float], float]

# integrand psi/S^2 is replaced by its value at this radius closer to 0
_SMALL_S = 1e-6
_KNOT_SPACING = 1.0 / 512


@dataclass(frozen=True)
class RadialMap:
    """A positive radial function with its first two derivatives.

    ``R`` bounds the domain; ``closed`` says whether ``t = R`` itself is allowed.
    """

    f: Fn
    df: Fn
    d2f: Fn
    R: float = math.inf
    closed: bool = False
    kind: str = "custom"
    params: dict = field(default_factory=dict, compare=False)
    log_derivative: Fn | None = field(default=None, compare=False)

    def check(self, t):
        tmin, tmax = np.min(t), np.max(t)
        if tmin < 0:
            raise DomainError(f"negative radius {tmin}")
        if tmax > self.R or (tmax == self.R and not self.closed):
            raise DomainError(f"radius {tmax} beyond the profile domain R={self.R}")

    def value(self, t):
        self.check(t)
        return self.f(t)

    def d1(self, t):
        self.check(t)
        return self.df(t)

    def d2(self, t):
        self.check(t)
        return self.d2f(t)

    def dlog(self, t):
        """``f'/f``."""
        self.check(t)
        if self.log_derivative is not None:
            return self.log_derivative(t)
        return self.df(t) / self.f(t)

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}


class WarpingProfile(RadialMap):
    """Warping function ``f`` of ``dt^2 + f^2 dtheta^2`` with ``f(0)=0, f'(0)=1``."""

    def origin_ok(self, eps: float = 1e-6, tol: float = 1e-5) -> bool:
        """Numerical check of ``f(0) = 0`` and ``f(eps)/eps -> 1``."""
        return abs(self.f(0.0)) <= tol * eps and abs(self.f(eps) / eps - 1.0) <= tol

    def positive_on(self, grid) -> bool:
        grid = np.asarray(grid, dtype=float)
        return bool(np.all(np.asarray(self.value(grid[grid > 0])) > 0))


@dataclass(frozen=True)
class PsiProfile:
    """The function ``psi_kappa`` with its derivative."""

    psi: Fn
    dpsi: Fn
    kappa: float
    params: dict = field(default_factory=dict, compare=False)

    def origin_ok(self, tol: float = 1e-12) -> bool:
        return abs(self.psi(0.0)) <= tol and abs(self.dpsi(0.0)) <= tol

    def nonpositive_on(self, grid, tol: float = 0.0) -> bool:
        vals = np.array([self.psi(float(t)) for t in grid])
        return bool(np.all(vals <= tol))


def spaceform_profile(kappa: float) -> WarpingProfile:
    """``f = S_kappa``."""
    R = math.pi / math.sqrt(kappa) if kappa > 0 else math.inf
    return WarpingProfile(
        f=lambda t: sine_kappa(kappa, t),
        df=lambda t: cosine_kappa(kappa, t),
        d2f=lambda t: -kappa * sine_kappa(kappa, t),
        R=R, kind="spaceform", params={"kappa": kappa},
        log_derivative=lambda t: cot_kappa(kappa, t),
    )


def flat_profile() -> WarpingProfile:
    return spaceform_profile(0.0)


def psi_exponential(c: float, kappa: float) -> PsiProfile:
    """``psi(t) = -c t^2 exp(-2t)``: nonpositive, ``psi(0) = psi'(0) = 0`` and
    ``psi' > 0`` exactly for ``t > 1``."""
    if c < 0:
        raise ConstructionError(f"c must be non-negative, got {c}")

    def psi(t):
        return -c * t * t * np.exp(-2.0 * t)

    def dpsi(t):
        return -c * np.exp(-2.0 * t) * (2.0 * t - 2.0 * t * t)

    return PsiProfile(psi, dpsi, kappa, params={"family": "exponential", "c": c})


def constant_map(c: float) -> RadialMap:
    """The constant radial function ``g = c > 0``."""
    if not c > 0:
        raise ConstructionError(f"constant must be positive, got {c}")
    return RadialMap(f=lambda t: c + 0.0 * np.asarray(t) if np.ndim(t) else c,
                     df=lambda t: 0.0 * np.asarray(t) if np.ndim(t) else 0.0,
                     d2f=lambda t: 0.0 * np.asarray(t) if np.ndim(t) else 0.0,
                     kind="constant", params={"c": c})


def radial_curvature(p: RadialMap, t):
    """Sectional curvature ``-f''/f`` of planes containing the radial direction."""
    p.check(t)
    return -p.d2f(t) / p.f(t)


def mean_curvature(p: RadialMap, n: int, t):
    """Mean curvature ``(n-1) f'/f`` of the distance sphere of radius ``t``."""
    if np.min(t) <= 0:
        raise DomainError("mean curvature has a pole at t = 0")
    return (n - 1) * p.dlog(t)


def psi_of_profile(p: RadialMap, kappa: float) -> PsiProfile:
    """``psi = -f' S + f C`` and ``psi' = -S (f'' + kappa f)`` from stored derivatives."""

    def psi(t):
        p.check(t)
        return -p.df(t) * sine_kappa(kappa, t) + p.f(t) * cosine_kappa(kappa, t)

    def dpsi(t):
        p.check(t)
        return -sine_kappa(kappa, t) * (p.d2f(t) + kappa * p.f(t))

    return PsiProfile(psi, dpsi, kappa, params={"source": p.kind, **p.params})


class _UniformHermite:
    """Piecewise cubic Hermite interpolant on uniform knots; cheap scalar calls."""

    def __init__(self, x0, h, y, dy):
        self.x0, self.h = float(x0), float(h)
        self.y = np.asarray(y, dtype=float)
        self.dy = np.asarray(dy, dtype=float)
        self._yl, self._dyl = self.y.tolist(), self.dy.tolist()
        self.n = len(self._yl) - 1

    def __call__(self, x):
        if np.ndim(x) == 0:
            s = (float(x) - self.x0) / self.h
            i = min(max(int(s), 0), self.n - 1)
            s -= i
            y0, y1 = self._yl[i], self._yl[i + 1]
            m0, m1 = self._dyl[i] * self.h, self._dyl[i + 1] * self.h
            s2 = s * s
            s3 = s2 * s
            return ((2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0
                    + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * m1)
        x = np.asarray(x, dtype=float)
        s = (x - self.x0) / self.h
        i = np.clip(s.astype(int), 0, self.n - 1)
        s = s - i
        y0, y1 = self.y[i], self.y[i + 1]
        m0, m1 = self.dy[i] * self.h, self.dy[i + 1] * self.h
        return ((2 * s ** 3 - 3 * s ** 2 + 1) * y0 + (s ** 3 - 2 * s ** 2 + s) * m0
                + (-2 * s ** 3 + 3 * s ** 2) * y1 + (s ** 3 - s ** 2) * m1)


def profile_from_psi(psi: PsiProfile, kappa: float | None = None, R: float = 1.0, *,
                     quad_tol: float = 1e-12) -> WarpingProfile:
    """Reconstruct ``f = S (1 - J)`` with ``J(t) = int_0^t psi/S^2``.

    ``J`` is accumulated segment by segment with adaptive quadrature and
    stored as a Hermite interpolant whose knot slopes are the exact integrand.
    ``f'`` and ``f''`` are then closed-form in ``J``, ``psi`` and ``psi'``:

        f'  = C (1 - J) - psi/S,     f'' = -kappa f - psi'/S.
    """
    if kappa is None:
        kappa = psi.kappa
    if not (R > 0 and math.isfinite(R)):
        raise ConstructionError(f"profile radius R must be positive and finite, got {R}")
    if kappa > 0 and not R < math.pi / math.sqrt(kappa):
        raise ConstructionError(f"R={R} must stay below pi/sqrt(kappa)")
    if not psi.origin_ok(tol=1e-10):
        raise ConstructionError("psi must satisfy psi(0) = psi'(0) = 0", t=0.0)
    P, dP = psi.psi, psi.dpsi
    s0 = _SMALL_S
    g0 = P(s0) / sine_kappa(kappa, s0) ** 2

    def integrand(s):
        if s < s0:
            return g0
        return P(s) / sine_kappa(kappa, s) ** 2

    nseg = max(64, int(math.ceil(R / _KNOT_SPACING)))
    h = R / nseg
    knots = np.linspace(0.0, R, nseg + 1)
    J = np.zeros(nseg + 1)
    for i in range(nseg):
        a, b = knots[i], knots[i + 1]
        val, err = quad(integrand, a, b, epsabs=quad_tol * h, epsrel=quad_tol, limit=100)
        if not math.isfinite(val):
            raise ConstructionError("psi/S^2 is not integrable near the origin", t=float(a))
        J[i + 1] = J[i] + val
    slopes = np.array([integrand(float(s)) for s in knots])
    bad = np.nonzero(1.0 - J <= 0)[0]
    if bad.size:
        t_bad = float(knots[bad[0]])
        raise ConstructionError(f"1 - int psi/S^2 <= 0 at t={t_bad:.6g}", t=t_bad)
    Jf = _UniformHermite(0.0, h, J, slopes)
    dpsi0 = dP(s0) / s0

    def f(t):
        return sine_kappa(kappa, t) * (1.0 - Jf(t))

    def df(t):
        S = sine_kappa(kappa, t)
        C = cosine_kappa(kappa, t)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(S > 0, P(t) / S, 0.0) if np.ndim(t) else (P(t) / S if S > 0 else 0.0)
        return C * (1.0 - Jf(t)) - q

    def d2f(t):
        S = sine_kappa(kappa, t)
        with np.errstate(divide="ignore", invalid="ignore"):
            if np.ndim(t):
                q = np.where(S > 0, dP(t) / S, dpsi0)
            else:
                q = dP(t) / S if S > 0 else dpsi0
        return -kappa * f(t) - q

    def dlog(t):
        S = sine_kappa(kappa, t)
        return cot_kappa(kappa, t) - P(t) / (S * S * (1.0 - Jf(t)))

    params = {"kappa": kappa, "R": R, **psi.params}
    prof = WarpingProfile(f=f, df=df, d2f=d2f, R=R, closed=True, kind="psi",
                          params=params, log_derivative=dlog)
    object.__setattr__(prof, "_J", Jf)
    return prof


def sampled_profile(rows: Sequence[Sequence[float]], *, kind: str = "sampled",
                    params: dict | None = None) -> WarpingProfile:
    """Profile interpolated from ``(t, f, f', f'')`` rows sorted by ``t``.

    ``f`` and ``f'`` are cubic Hermite interpolants (slopes ``f'`` and ``f''``);
    ``f''`` is piecewise linear.
    """
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 4 or arr.shape[0] < 4:
        raise ConstructionError("sampled profiles need at least four (t, f, f', f'') rows")
    t, fv, dfv, d2fv = arr.T
    if np.any(np.diff(t) <= 0):
        raise ConstructionError("sample radii must be strictly increasing")
    F = CubicHermiteSpline(t, fv, dfv)
    DF = CubicHermiteSpline(t, dfv, d2fv)

    def f(x):
        return F(x) if np.ndim(x) else float(F(x))

    def df(x):
        return DF(x) if np.ndim(x) else float(DF(x))

    def d2f(x):
        return np.interp(x, t, d2fv) if np.ndim(x) else float(np.interp(x, t, d2fv))

    return WarpingProfile(f=f, df=df, d2f=d2f, R=float(t[-1]), closed=True, kind=kind,
                          params=params or {})


def profile_rows(p: RadialMap, grid) -> list[tuple[float, float, float, float]]:
    grid = np.asarray(grid, dtype=float)
    return [(float(t), float(p.f(float(t))), float(p.df(float(t))), float(p.d2f(float(t))))
            for t in grid]


def read_profile_csv(path) -> WarpingProfile:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != ["t", "f", "df", "d2f"]:
            raise ConstructionError(f"unexpected profile CSV header {header}")
        rows = [[float(x) for x in row] for row in reader if row]
    return sampled_profile(rows, params={"path": str(path)})


def write_profile_csv(p: RadialMap, grid, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "f", "df", "d2f"])
        for row in profile_rows(p, grid):
            w.writerow([f"{x:.17g}" for x in row])


# ---------------------------------------------------------------------------
# diagonal metrics


@dataclass(frozen=True)
class DiagonalMetric:
    """``dt^2 + sum_i phi_i(t)^2 dtheta_i^2`` with one radial profile per
    angular direction; ``dim = len(profiles) + 1``."""

    profiles: tuple
    kind: str = "diagonal"
    params: dict = field(default_factory=dict, compare=False)

    @property
    def dim(self) -> int:
        return len(self.profiles) + 1

    @property
    def R(self) -> float:
        return min(p.R for p in self.profiles)

    def density(self, t):
        out = 1.0
        for p in self.profiles:
            out = out * p.value(t)
        return out

    def curvatures(self, t):
        """Radial sectional curvatures ``-phi_i''/phi_i``, one per direction."""
        return [radial_curvature(p, t) for p in self.profiles]

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}


def _phi2_example43(kappa: float) -> RadialMap:
    """``phi = S^2/t`` with series for the derivatives where they cancel."""
    k = kappa

    def f(t):
        if np.ndim(t) == 0:
            return sine_kappa(k, t) ** 2 / t if t > 0 else 0.0
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(t > 0, sine_kappa(k, t) ** 2 / t, 0.0)

    def df(t):
        if np.ndim(t) == 0:
            x = k * t * t
            if abs(x) < 1e-2:
                return 1 - x + 2 * x * x / 9 - x ** 3 / 45 + 2 * x ** 4 / 1575
            S = sine_kappa(k, t)
            return S * (2 * cosine_kappa(k, t) - S / t) / t
        t = np.asarray(t, dtype=float)
        return np.array([df(float(x)) for x in t])

    def d2f(t):
        if np.ndim(t) == 0:
            x = k * t * t
            if abs(x) < 1e-2:
                return k * t * (-2 + 8 * x / 9 - 2 * x * x / 15 + 16 * x ** 3 / 1575
                                - 4 * x ** 4 / 8505)
            S = sine_kappa(k, t)
            C = cosine_kappa(k, t)
            return 2 * (C * C - k * S * S) / t - 4 * S * C / t ** 2 + 2 * S * S / t ** 3
        t = np.asarray(t, dtype=float)
        return np.array([d2f(float(x)) for x in t])

    def dlog(t):
        return 2 * cot_kappa(k, t) - 1.0 / t

    R = math.pi / math.sqrt(k) if k > 0 else math.inf
    return RadialMap(f=f, df=df, d2f=d2f, R=R, kind="example43-phi2",
                     params={"kappa": k}, log_derivative=dlog)


def example43_metric(kappa: float, n: int) -> DiagonalMetric:
    """Profiles ``phi_2 = S^2/t``, ``phi_3 = t``, ``phi_i = S`` for ``4 <= i <= n``.

    The radial density is ``S^(n-1)``, identical to the space form, while the
    radial curvatures differ whenever ``kappa != 0``.
    """
    if int(n) != n or n < 3:
        raise ValueError(f"the construction needs n >= 3, got {n}")
    sf = spaceform_profile(kappa)
    flat = flat_profile()
    phi3 = RadialMap(f=flat.f, df=flat.df, d2f=flat.d2f, R=sf.R, kind="flat",
                     log_derivative=flat.log_derivative)
    profiles = (_phi2_example43(kappa), phi3) + (sf,) * (n - 3)
    return DiagonalMetric(profiles, kind="example43", params={"kappa": kappa, "n": n})


def spaceform_diagonal(kappa: float, n: int) -> DiagonalMetric:
    """The space form written as a diagonal metric (all ``phi_i = S``)."""
    return DiagonalMetric((spaceform_profile(kappa),) * (n - 1), kind="spaceform-diagonal",
                          params={"kappa": kappa, "n": n})


def diagonal_density_log_derivative(m: DiagonalMetric, t):
    """``sum_i phi_i'/phi_i``: the mean curvature of the distance sphere."""
    if np.min(t) <= 0:
        raise DomainError("density log-derivative has a pole at t = 0")
    return sum(p.dlog(t) for p in m.profiles)


def nonisometry_witness(m: DiagonalMetric, kappa: float, t: float) -> float:
    """Largest deviation of a radial sectional curvature from ``kappa`` at ``t``.

    Positive values certify that the metric is not the space form of curvature
    ``kappa``.
    """
    if t <= 0:
        raise DomainError("witness radius must be positive")
    return max(abs(float(K) - kappa) for K in m.curvatures(t))


# ---------------------------------------------------------------------------
# coefficients and (de)serialization


def radial_coefficient(geometry, dim: int | None = None) -> RadialCoefficient:
    """Density log-derivative of a geometry, as fed to the radial solver.

    ``geometry`` is a ``SpaceForm``, a ``DiagonalMetric``, a ``RadialCoefficient``
    or a warping profile (which then needs ``dim``).
    """
    if isinstance(geometry, RadialCoefficient):
        return geometry
    if isinstance(geometry, SpaceForm):
        return RadialCoefficient.spaceform(geometry)
    if isinstance(geometry, DiagonalMetric):
        ps = geometry.profiles
        logs = [p.log_derivative or (lambda t, p=p: p.df(t) / p.f(t)) for p in ps]
        R = geometry.R

        def a(t):
            if t > R:
                raise DomainError(f"radius {t} beyond R={R}")
            return sum(g(t) for g in logs)

        return RadialCoefficient(a, float(geometry.dim - 1), name=geometry.kind)
    if isinstance(geometry, RadialMap):
        if dim is None:
            raise ValueError("a warping profile needs an explicit dimension")
        p = float(dim - 1)
        g = geometry.log_derivative or (lambda t: geometry.df(t) / geometry.f(t))
        R, closed = geometry.R, geometry.closed

        def a(t):
            if t > R or (t == R and not closed):
                raise DomainError(f"radius {t} beyond R={R}")
            return p * g(t)

        return RadialCoefficient(a, p, name=geometry.kind)
    raise TypeError(f"cannot build a radial coefficient from {type(geometry).__name__}")


def geometry_dim(geometry, dim: int | None = None) -> int:
    if isinstance(geometry, (SpaceForm, DiagonalMetric)):
        return geometry.dim
    if isinstance(geometry, RadialCoefficient):
        return int(round(geometry.pole_order)) + 1
    if dim is None:
        raise ValueError("a warping profile needs an explicit dimension")
    return dim


def profile_from_dict(d: dict):
    """Rebuild a profile or diagonal metric from its JSON description."""
    kind = d.get("kind")
    if kind == "spaceform":
        return spaceform_profile(float(d["kappa"]))
    if kind == "psi":
        if d.get("family", "exponential") != "exponential":
            raise ConstructionError(f"unknown psi family {d.get('family')}")
        psi = psi_exponential(float(d["c"]), float(d["kappa"]))
        return profile_from_psi(psi, float(d["kappa"]), float(d["R"]))
    if kind == "example43":
        return example43_metric(float(d["kappa"]), int(d["n"]))
    if kind == "sampled":
        if "path" in d:
            return read_profile_csv(Path(d["path"]))
        return sampled_profile(d["rows"])
    raise ConstructionError(f"unknown profile kind {kind!r}")
