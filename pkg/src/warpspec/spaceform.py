"""Closed-form radial functions of the simply connected space forms M(kappa).

``S_kappa`` is the generalized sine solving ``S'' + kappa*S = 0`` with
``S(0) = 0, S'(0) = 1`` and ``C_kappa = S_kappa'`` the generalized cosine.
Everything here accepts floats or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# below this value of |kappa| t^2 the branch formulas are replaced by series
SERIES_THRESHOLD = 1e-6


def _is_scalar(t):
    return np.ndim(t) == 0


def sine_kappa(kappa: float, t):
    """Generalized sine ``S_kappa(t)`` with no domain checking."""
    if _is_scalar(t):
        t = float(t)
        x = kappa * t * t
        if abs(x) < SERIES_THRESHOLD:
            return t * (1.0 - x / 6.0 + x * x / 120.0)
        if kappa > 0:
            k = math.sqrt(kappa)
            return math.sin(k * t) / k
        k = math.sqrt(-kappa)
        return math.sinh(k * t) / k
    t = np.asarray(t, dtype=float)
    x = kappa * t * t
    series = t * (1.0 - x / 6.0 + x * x / 120.0)
    if kappa > 0:
        k = math.sqrt(kappa)
        exact = np.sin(k * t) / k
    elif kappa < 0:
        k = math.sqrt(-kappa)
        exact = np.sinh(k * t) / k
    else:
        return t.copy()
    return np.where(np.abs(x) < SERIES_THRESHOLD, series, exact)


def cosine_kappa(kappa: float, t):
    """Generalized cosine ``C_kappa(t) = S_kappa'(t)``."""
    if _is_scalar(t):
        t = float(t)
        x = kappa * t * t
        if abs(x) < SERIES_THRESHOLD:
            return 1.0 - x / 2.0 + x * x / 24.0
        if kappa > 0:
            return math.cos(math.sqrt(kappa) * t)
        return math.cosh(math.sqrt(-kappa) * t)
    t = np.asarray(t, dtype=float)
    x = kappa * t * t
    series = 1.0 - x / 2.0 + x * x / 24.0
    if kappa > 0:
        exact = np.cos(math.sqrt(kappa) * t)
    elif kappa < 0:
        exact = np.cosh(math.sqrt(-kappa) * t)
    else:
        return np.ones_like(t)
    return np.where(np.abs(x) < SERIES_THRESHOLD, series, exact)


def cot_kappa(kappa: float, t):
    """``C_kappa/S_kappa`` evaluated without forming the two factors.

    Stays accurate for large hyperbolic radii where sinh and cosh overflow.
    """
    if _is_scalar(t):
        t = float(t)
        x = kappa * t * t
        if abs(x) < SERIES_THRESHOLD:
            return 1.0 / t - kappa * t / 3.0 - kappa * kappa * t ** 3 / 45.0
        if kappa > 0:
            k = math.sqrt(kappa)
            return k / math.tan(k * t)
        k = math.sqrt(-kappa)
        return k / math.tanh(k * t)
    t = np.asarray(t, dtype=float)
    x = kappa * t * t
    with np.errstate(divide="ignore", invalid="ignore"):
        series = 1.0 / t - kappa * t / 3.0 - kappa * kappa * t ** 3 / 45.0
        if kappa > 0:
            k = math.sqrt(kappa)
            exact = k / np.tan(k * t)
        elif kappa < 0:
            k = math.sqrt(-kappa)
            exact = k / np.tanh(k * t)
        else:
            return 1.0 / t
    return np.where(np.abs(x) < SERIES_THRESHOLD, series, exact)


@dataclass(frozen=True)
class SpaceForm:
    """The simply connected ``dim``-dimensional space of constant curvature ``kappa``.

    ``margin`` shrinks the admissible radial interval for ``kappa > 0`` to
    ``t < pi/sqrt(kappa) - margin``.
    """

    kappa: float
    dim: int = 2
    margin: float = 0.0

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.dim}")
        if not math.isfinite(self.kappa):
            raise ValueError("kappa must be finite")
        if self.margin < 0:
            raise ValueError("margin must be non-negative")

    @property
    def radius_limit(self) -> float:
        """Supremum of admissible radii (``inf`` unless ``kappa > 0``)."""
        if self.kappa > 0:
            return math.pi / math.sqrt(self.kappa) - self.margin
        return math.inf

    def check(self, t, *, allow_zero=True):
        tmin = np.min(t) if not _is_scalar(t) else t
        tmax = np.max(t) if not _is_scalar(t) else t
        if tmin < 0 or (not allow_zero and tmin == 0):
            raise DomainError(f"radius must be {'>=' if allow_zero else '>'} 0, got {tmin}")
        if not tmax < self.radius_limit:
            raise DomainError(
                f"radius {tmax} outside the space form domain t < {self.radius_limit}"
            )

    def s(self, t):
        self.check(t)
        return sine_kappa(self.kappa, t)

    def c(self, t):
        self.check(t)
        return cosine_kappa(self.kappa, t)

    def mean_curvature(self, t):
        """Mean curvature ``(n-1) C/S`` of the distance sphere of radius ``t``."""
        self.check(t, allow_zero=False)
        return (self.dim - 1) * cot_kappa(self.kappa, t)

    def ricci(self) -> float:
        return (self.dim - 1) * self.kappa

    def tone(self) -> float:
        """McKean fundamental tone ``(n-1)^2 |kappa| / 4`` (requires ``kappa <= 0``)."""
        if self.kappa > 0:
            raise DomainError("the fundamental tone is only defined here for kappa <= 0")
        return (self.dim - 1) ** 2 * abs(self.kappa) / 4.0


def s_kappa(sf: SpaceForm, t):
    return sf.s(t)


def c_kappa(sf: SpaceForm, t):
    return sf.c(t)


def reference_mean_curvature(sf: SpaceForm, t):
    return sf.mean_curvature(t)


def mckean_tone(sf: SpaceForm) -> float:
    return sf.tone()
