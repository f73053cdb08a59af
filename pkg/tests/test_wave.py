import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st
from scipy.integrate import quad

from wavekit.experiments import wave
from wavekit.spherical import RadialProfile, lambda_rule, spherical_transform

finite = dict(allow_nan=False, allow_infinity=False)


@pytest.fixture(scope="module")
def bump_n2():
    f0 = wave.bump(0.5)
    return f0, spherical_transform(2, f0, 200.0, decay_order=-5.0)


@pytest.fixture(scope="module")
def abel_grid_n2():
    return wave.AbelGrid.from_radial(2, wave.bump(0.5), 16.0, 0.01)


@given(st.floats(0.0, 30.0, **finite))
@settings(max_examples=30, deadline=None)
def test_energy_is_conserved(t):
    f0 = wave.bump(0.5)
    F = spherical_transform(1, f0, 60.0, decay_order=-4.5)
    G = spherical_transform(1, wave.bump(0.25), 60.0, decay_order=-4.5)
    state = wave.WaveState(1, F, G, 0.0)
    lam, w = lambda_rule(60.0, 1.0)
    e0 = wave.spectral_energy(state, lam, w)
    e1 = wave.spectral_energy(wave.evolve(state, t), lam, w)
    assert e1 == pytest.approx(e0, rel=1e-12)


def _disk_integral(R):
    # int of x^{-3} over the hyperbolic disk of radius R: Euclidean disk centered (cosh R, 0)
    c, s = np.cosh(R), np.sinh(R)
    g = lambda x: 2 * np.sqrt(max(s * s - (x - c) ** 2, 0.0)) * x ** -3
    return quad(g, c - s, c + s, epsabs=0, epsrel=1e-13, limit=200)[0]


def test_l4_norm_of_annulus_against_planar_integral():
    # n = 1, p = 4: ||delta^{1/2} 1_[1,2]||_4^4 = int_{1 <= R <= 2} x^{-2} x^{-1} dx dy
    u = RadialProfile(lambda r: np.ones_like(r), (1.0, 2.0))
    brute = _disk_integral(2.0) - _disk_integral(1.0)
    assert wave.lp_norm(1, u, 4.0) ** 4 == pytest.approx(brute, rel=1e-4)
    assert brute == pytest.approx(36.98602865783672, rel=1e-12)


@pytest.mark.parametrize("n, p", [(1, 2.0), (2, 2.0), (1, 4.0), (2, 3.0), (3, 4.0)])
def test_lp_weight_paths_agree(n, p):
    from wavekit.geometry import sphere_weight
    r = np.array([0.1, 1.0, 4.0])
    beta = n * (p / 2 - 1)
    ref = np.array([sphere_weight(n, beta, ri) for ri in r]) * np.sinh(r) ** n
    np.testing.assert_allclose(wave.lp_weight(n, p, r), ref, rtol=1e-11)


@pytest.mark.parametrize("n", [1, 2])
def test_plancherel_l2(n):
    f0 = wave.bump(0.5)
    F = spherical_transform(n, f0, 100.0, decay_order=-4.0 - n / 2)
    spec = wave.spectral_l2_squared(n, F, 100.0)
    assert wave.lp_norm(n, f0, 2.0) ** 2 == pytest.approx(spec, rel=1e-3)


def test_abel_transform_n2_closed_form():
    # n = 2: A f(s) = 2 pi int_s^b f(r) sinh r dr; for f = 1 on [0, b] this is 2 pi (cosh b - cosh s)
    f = RadialProfile(lambda r: np.ones_like(r), (0.0, 1.5))
    s = np.array([0.0, 0.4, 1.2, 1.6])
    exact = np.where(s < 1.5, 2 * np.pi * (np.cosh(1.5) - np.cosh(s)), 0.0)
    np.testing.assert_allclose(wave.abel_transform(2, f, s), exact, rtol=1e-12, atol=1e-12)


def test_fft_of_abel_transform_is_spherical_transform(abel_grid_n2, bump_n2):
    _, F = bump_n2
    grid = abel_grid_n2
    H = np.fft.fft(np.fft.ifftshift(grid.h)).real * grid.ds
    k = np.array([3, 20, 50])
    np.testing.assert_allclose(H[k], F(grid.lam[k]), rtol=1e-9, atol=1e-12)


def test_abel_and_spectral_wave_agree(abel_grid_n2, bump_n2):
    _, F = bump_n2
    state = wave.evolve(wave.WaveState(2, F, F.scale(0.0), 0.0), 2.0)
    G = wave.spatial_field(state, 200.0, 4.0)
    r = np.array([1.6, 2.0, 2.3])
    np.testing.assert_allclose(abel_grid_n2.wave(2.0).radial(r), G(r), atol=2e-7)


@pytest.mark.parametrize("t", [3.0, 6.0])
def test_n2_front_travels_at_unit_speed(abel_grid_n2, t):
    r = np.linspace(0.05, 9.0, 900)
    a = np.abs(abel_grid_n2.wave(t).radial(r)) * np.sinh(r)
    assert abs(r[np.argmax(a)] - t) <= 0.5
    # sinh r |u| keeps its amplitude along the front
    assert np.max(a) == pytest.approx(0.0598, rel=0.01)


def test_inverse_abel_round_trip_n1():
    f0 = wave.bump(0.5)
    grid = wave.AbelGrid.from_radial(1, f0, 16.0, 0.01)
    r = np.array([0.05, 0.2, 0.4])
    np.testing.assert_allclose(grid.radial(r), f0(r), atol=1e-6)


def test_sobolev_norm_zero_order_is_lp_norm(bump_n2):
    f0, F = bump_n2
    assert wave.sobolev_norm(2, F, 4.0, 0.0, 1.0) == pytest.approx(wave.lp_norm(2, f0, 4.0), rel=1e-5)


def test_p2_growth_is_contraction():
    fam = [wave.bump(0.5), wave.bump(0.25)]
    rep = wave.growth_experiment(1, 2.0, 0.0, fam, np.array([1.0, 2.0, 4.0]), "f")
    assert rep.passed
    assert np.max(rep.columns["sup_Q"]) <= 1 + 1e-10


def test_p4_growth_small_family():
    fam = [wave.bump(0.5), wave.bump(0.25)]
    rep = wave.growth_experiment(1, 4.0, 0.25, fam, np.array([1.0, 2.0, 4.0, 8.0]), "f")
    assert rep.passed
    assert "lower-bound" in str(rep.params)
