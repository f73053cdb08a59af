import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from wavekit.spherical import (RadialProfile, displayed_leading_constant, inverse_transform,
                               leading_constant, phi, phi_leading, phi_prime, reconstruct_cos,
                               spherical_transform)

finite = dict(allow_nan=False, allow_infinity=False)

# phi_lam(t) = 2F1((n/2 + i lam)/2, (n/2 - i lam)/2; (n+1)/2; -sinh^2 t), evaluated with mpmath
FROZEN_PHI = [
    (1, 0.0, 1.0, 0.9408621592493498),
    (1, 5.0, 0.5, -0.04538312397493779),
    (1, 40.0, 3.0, 0.03929035794419057),
    (3, 0.0, 2.0, 0.37004106611712934),
    (3, 2.5, 1.0, 0.2991589915068687),
    (3, 100.0, 0.2, 0.006620858201599005),
    (4, 7.0, 1.5, 0.004455793143356787),
]


def hyp_phi(n, lam, t):
    with mpmath.workdps(30):
        v = mpmath.hyp2f1((n / 2 + 1j * lam) / 2, (n / 2 - 1j * lam) / 2, (n + 1) / 2,
                          -mpmath.sinh(t) ** 2)
    return float(mpmath.re(v))


def envelope(n, lam, t):
    return (t / np.sinh(t)) ** (n / 2) * (1 + t) * min(1.0, max(lam * t, 1.0) ** (-n / 2))


@pytest.mark.parametrize("n, lam, t, value", FROZEN_PHI)
def test_phi_frozen_values(n, lam, t, value):
    assert float(phi(n, lam, t)) == pytest.approx(value, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@given(lam=st.floats(0.0, 200.0, **finite), t=st.floats(0.01, 8.0, **finite))
@settings(max_examples=25, deadline=None)
def test_phi_matches_hypergeometric(n, lam, t):
    err = abs(float(phi(n, lam, t)) - hyp_phi(n, lam, t))
    assert err <= 1e-8 * envelope(n, lam, t)


def test_phi_n2_closed_form_grid():
    lam = np.geomspace(0.1, 50, 20)
    t = np.geomspace(0.01, 10, 20)
    L, T = np.meshgrid(lam, t, indexing="ij")
    got = np.array([phi(2, lam, ti) for ti in t]).T
    exact = np.sin(L * T) / (L * np.sinh(T))
    assert np.max(np.abs(got - exact) * np.sinh(T) / T) <= 1e-8


@given(st.integers(1, 4), st.floats(0.0, 100.0, **finite), st.floats(0.05, 6.0, **finite))
@settings(max_examples=40, deadline=None)
def test_phi_is_even_in_lambda(n, lam, t):
    assert float(phi(n, -lam, t)) == pytest.approx(float(phi(n, lam, t)), rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("lam", [0.0, 1.0, 10.0])
def test_phi_normalization(n, lam):
    assert float(phi(n, lam, 1e-9)) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("lam, t", [(0.5, 0.3), (3.0, 1.0), (30.0, 2.0)])
def test_phi_prime_and_eigen_equation(n, lam, t):
    # phi'' + n coth t phi' = -(lam^2 + n^2/4) phi
    with mpmath.workdps(30):
        f = lambda s: mpmath.re(mpmath.hyp2f1((n / 2 + 1j * lam) / 2, (n / 2 - 1j * lam) / 2,
                                              (n + 1) / 2, -mpmath.sinh(s) ** 2))
        d1 = float(mpmath.diff(f, t))
        d2 = float(mpmath.diff(f, t, 2))
    scale = envelope(n, lam, t) * (1 + lam)
    assert abs(float(phi_prime(n, lam, t)) - d1) <= 1e-8 * scale
    resid = d2 + n / np.tanh(t) * d1 + (lam ** 2 + n ** 2 / 4) * hyp_phi(n, lam, t)
    assert abs(resid) <= 1e-6 * scale * (1 + lam)


def test_leading_constants():
    assert leading_constant(2) == pytest.approx(1.0, abs=1e-15)
    assert leading_constant(1) == pytest.approx(np.sqrt(2 / np.pi))
    assert displayed_leading_constant(2) == pytest.approx(np.sqrt(np.pi))


def test_leading_term_exact_for_n2():
    lam = np.linspace(5, 60, 12)
    lead, dlead = phi_leading(2, lam, 2.0)
    np.testing.assert_allclose(lead, phi(2, lam, 2.0), atol=1e-14)
    with pytest.raises(ValueError):
        phi_leading(2, np.array([0.1]), 2.0)


@pytest.mark.parametrize("n", [1, 3])
def test_reconstruction_error_decays(n):
    lam = np.array([50.0, 400.0])
    t = 2.0
    err = np.abs(reconstruct_cos(n, lam, t) - np.cos(t * lam))
    assert np.all(err < 2.0 / lam)


def test_transform_of_bump_n2_against_quadrature():
    from scipy.integrate import quad
    f = RadialProfile(lambda r: (1 - (r - 1) ** 2 / 0.25) ** 3, (0.5, 1.5))
    F = spherical_transform(2, f)
    for lam in (0.0, 3.0, 17.0):
        g = (lambda r: f(r) * np.sinh(r) * r) if lam == 0 else \
            (lambda r: f(r) * np.sinh(r) * np.sin(lam * r) / lam)
        exact = 4 * np.pi * quad(g, 0.5, 1.5, epsabs=1e-14, limit=200)[0]
        assert float(F(lam)) == pytest.approx(exact, rel=1e-10, abs=1e-13)


@pytest.mark.parametrize("n", [1, 2])
def test_round_trip(n):
    f = RadialProfile(lambda r: (1 - (r - 1) ** 2 / 0.25) ** 3, (0.5, 1.5))
    F = spherical_transform(n, f, 200.0, decay_order=-4.0 - n / 2)
    g = inverse_transform(n, F, 200.0, r_max=2.0)
    r = np.linspace(0.1, 2.0, 15)
    assert np.max(np.abs(g(r) - f(r))) <= 1e-4


def test_inverse_needs_decay_or_damping():
    f = RadialProfile(lambda r: np.ones_like(r), (1.0, 2.0))
    with pytest.raises(ValueError):
        inverse_transform(2, spherical_transform(2, f), 50.0)
