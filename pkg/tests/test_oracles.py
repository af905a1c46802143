"""The oracles agree with unrelated library implementations."""

import math

import mpmath as mp
import pytest
from scipy import special

import oracles


def test_j0_series_matches_scipy():
    for x in (0.0, 0.5, 1.7, 2.4, 4.0):
        assert float(oracles.bessel_j0_series(x)) == pytest.approx(special.j0(x), abs=1e-14)


def test_j0_first_zero_matches_mpmath():
    assert oracles.bessel_j0_first_zero() == pytest.approx(float(mp.besseljzero(0, 1)),
                                                            rel=1e-15)


def test_phi2_curvature_closed_form():
    # phi = sinh^2 t / t: phi'' = 2cosh(2t)/t - 2sinh(2t)/t^2 + 2sinh^2 t/t^3
    t = 1.0
    s, c = math.sinh(t), math.cosh(t)
    phi = s * s / t
    d2 = 2 * (c * c + s * s) / t - 4 * s * c / t ** 2 + 2 * s * s / t ** 3
    assert oracles.phi2_curvature(-1.0, t) == pytest.approx(-d2 / phi, rel=1e-13)


def test_witness_is_positive():
    assert oracles.example43_witness(-1.0, 3, 1.0) > 0
