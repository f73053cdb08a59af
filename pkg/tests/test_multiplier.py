import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st
from scipy.special import k0

from wavekit import geometry as geo
from wavekit.multiplier import (MultiplierKernel, abel_kappa, analytic_C, convolve, default_ell,
                                fourier_abel, kernel_consistency_check, kernel_derivatives,
                                kernel_kappa)
from wavekit.specfun import bessel_potential_symbol, gaussian_symbol
from wavekit.spherical import RadialProfile, inverse_transform, spherical_transform

finite = dict(allow_nan=False, allow_infinity=False)


def gauss_n2(r):
    return np.sqrt(np.pi) / 4 * r * np.exp(-r ** 2 / 4) / np.sinh(r)


def test_gaussian_kernel_n2_both_routes():
    g = gaussian_symbol(1.0)
    r = np.array([0.05, 0.4, 1.0, 2.5, 5.0])
    np.testing.assert_allclose(kernel_kappa(2, g, r, 10.0), gauss_n2(r), rtol=1e-9)
    np.testing.assert_allclose(abel_kappa(2, g, r), gauss_n2(r), rtol=1e-9)


@given(st.floats(0.05, 8.0, **finite))
@settings(max_examples=30, deadline=None)
def test_resolvent_kernel_n2(r):
    # psi = (1 + lam^2)^{-1}: kappa = (pi/2) e^{-r} / sinh r
    m = bessel_potential_symbol(-2.0)
    exact = np.pi / 2 * np.exp(-r) / np.sinh(r)
    assert float(abel_kappa(2, m, r)[0]) == pytest.approx(exact, rel=1e-9)
    d_exact = -np.pi / 2 * np.exp(-r) * (1 + 1 / np.tanh(r)) / np.sinh(r)
    assert float(abel_kappa(2, m, r, derivative=1)[0]) == pytest.approx(d_exact, rel=1e-8)


@pytest.mark.parametrize("n", [1, 3])
def test_abel_and_spectral_routes_agree(n):
    g = gaussian_symbol(1.0)
    r = np.array([0.2, 1.0, 3.0])
    np.testing.assert_allclose(abel_kappa(n, g, r), kernel_kappa(n, g, r, 10.0), rtol=1e-8)


def test_kernel_derivatives_consistent():
    m = bessel_potential_symbol(-1.0)
    r = np.array([0.5, 2.0])
    k, d1, d2 = kernel_derivatives(1, m, r)
    h = 1e-5
    fd = (abel_kappa(1, m, r + h) - abel_kappa(1, m, r - h)) / (2 * h)
    np.testing.assert_allclose(d1, fd, rtol=1e-6)
    assert np.all(np.isfinite(d2))


def test_kappa_needs_positive_radius():
    with pytest.raises(ValueError):
        kernel_kappa(2, gaussian_symbol(1.0), [0.0])


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_default_ell(n):
    ell = default_ell(n)
    assert ell >= 1 and ell > n / 2 - 1 and ell - 1 <= max(n / 2 - 1, 0)


@pytest.mark.parametrize("n", [1, 2])
def test_calibrated_constant_matches_analytic(n):
    rep = kernel_consistency_check(n, gaussian_symbol(1.0), bessel_potential_symbol(-(n + 3)),
                                   np.linspace(0.5, 3.0, 6))
    assert rep.passed
    assert rep.params["C_calibrated_im"] == pytest.approx(analytic_C(n, default_ell(n)).imag, rel=1e-4)
    assert abs(rep.params["C_calibrated_re"]) < 1e-6 * abs(rep.params["C_calibrated_im"])


@pytest.mark.parametrize("sigma, exact", [
    (-2.0, lambda r: np.pi * np.exp(-r)),
    (-1.0, lambda r: 2 * k0(r)),
])
def test_fourier_abel_closed_forms(sigma, exact):
    m = bessel_potential_symbol(sigma)
    for r in (0.01, 0.5, 3.0):
        assert fourier_abel(m, r)[0] == pytest.approx(exact(r), rel=1e-6)


def test_fourier_abel_matches_analytic_transform():
    m = bessel_potential_symbol(-0.5)
    for r in (0.001, 0.1, 2.0):
        assert fourier_abel(m, r)[0] == pytest.approx(float(m.fourier(0, r)), rel=1e-6)


@pytest.mark.parametrize("n", [1, 2])
def test_convolution_matches_spectral_multiplier(n):
    psi = gaussian_symbol(1.0)
    k = MultiplierKernel.build(n, psi, 8.0)
    f0 = RadialProfile(lambda r: (1 - (r / 0.8) ** 2) ** 3, (0.0, 0.8))
    f = lambda x, y: x ** (-n / 2) * f0(geo.dist_xy(x, np.sum(y ** 2, axis=-1)))
    G = inverse_transform(n, spherical_transform(n, f0, 60.0).multiply(psi, -50.0), 60.0, r_max=3.0)
    for g in (geo.GroupElement.identity(n), geo.GroupElement(n, 2.0, (0.5,) * n)):
        got = convolve(n, f, k, g, 0.8)
        want = g.x ** (-n / 2) * float(G(geo.dist_to_identity(g))[0])
        assert got == pytest.approx(want, rel=1e-6)
