import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st
from scipy.integrate import quad
from scipy.special import gamma as G

from wavekit.experiments import sharpness as sh
from wavekit.specfun import CutoffSpec, make_cutoff

finite = dict(allow_nan=False, allow_infinity=False)


def trig_power(g, x, kind):
    # int_0^inf lam^g trig(lam x) dlam = Gamma(g+1) trig(pi (g+1)/2) x^{-1-g}
    f = np.cos if kind == "cos" else np.sin
    return G(g + 1) * f(np.pi * (g + 1) / 2) * x ** (-1 - g)


@given(st.floats(-0.9, 2.9, **finite), st.sampled_from(["cos", "sin"]))
def test_model_constant_matches_gamma_formula(g, kind):
    if abs(g - round(g)) < 1e-3:
        return
    assert sh.model_constant(g, kind) == pytest.approx(trig_power(g, 1.0, kind), rel=1e-11)


@pytest.mark.parametrize("kind", ["cos", "sin"])
@pytest.mark.parametrize("g", [1 / 8, 1 / 4, 3 / 8])
@pytest.mark.parametrize("R", [0.5, 3.0])
def test_model_integral(kind, g, R):
    res = sh.model_integral(g, R, kind)
    assert res.rel_dev <= 1e-6
    assert res.value == pytest.approx(trig_power(g, R, kind), rel=1e-6)


def test_model_integral_rejects_bad_gamma():
    with pytest.raises(ValueError):
        sh.model_integral(1.0, 1.0, "cos")


def kappa_n2(t, alpha0, r):
    # n = 2: phi_lam(r) = sin(lam r)/(lam sinh r); split cos(t lam) sin(lam r)
    cut = make_cutoff(CutoffSpec(1.0, 2.0, "vanish-inside"))
    g = 1.0 - alpha0
    tot = 0.0
    for x in (r + t, r - t):
        low = quad(lambda l: (1 - cut(l)) * l ** g * np.sin(l * x), 0, 2, limit=200)[0]
        tot += 0.5 * (trig_power(g, x, "sin") - low)
    return tot / np.sinh(r)


@pytest.mark.parametrize("r", [2.01, 2.1, 2.5, 4.0])
def test_kappa_t_n2_closed_form(r):
    assert float(sh.kappa_t(2, 2.0, 0.8, r)[0]) == pytest.approx(kappa_n2(2.0, 0.8, r), rel=1e-9)


@pytest.mark.parametrize("n, alpha0", [(1, 0.25), (3, 1.25)])
def test_kappa_t_matches_spectral_route(n, alpha0):
    for r in (2.1, 2.5):
        want = sh.kappa_t_spectral(n, 2.0, alpha0, r)
        assert float(sh.kappa_t(n, 2.0, alpha0, r)[0]) == pytest.approx(want, rel=1e-7)


@pytest.mark.parametrize("n, alpha0", [(1, 0.25), (2, 0.8)])
def test_leading_coefficient(n, alpha0):
    A = sh.leading_coefficient(n, 2.0, alpha0)
    eps = np.array([1e-5, 1e-4])
    k = np.array([float(sh.kappa_t(n, 2.0, alpha0, 2.0 + e)[0]) for e in eps])
    ratio = k / eps ** (alpha0 - n / 2 - 1) / A
    # the relative correction shrinks like eps
    assert abs(ratio[0] - 1) <= 0.02
    assert abs(ratio[0] - 1) < abs(ratio[1] - 1)


def test_kappa_t_rejects_unsupported_order():
    with pytest.raises(ValueError):
        sh.kappa_t(3, 2.0, 0.5, 2.5)


def test_kappa_expansion_report():
    rep = sh.kappa_t_expansion(1, 2.0, 0.25)
    assert rep.passed


def test_family_support_and_norm():
    spec = sh.SharpnessFamily(1, 2.0, 0.01, 0.25)
    assert spec.p == 4.0
    assert spec.support == pytest.approx((2.01, 2.03))
    assert spec.gamma == pytest.approx(0.75)
    f0, F, norm = sh.sharpness_family(spec, 60.0)
    assert f0(np.array([2.0, 2.02, 2.04])).tolist() == [0.0, 1.0, 0.0]
    # ||.||_4^4 = pi (sinh^2 b - sinh^2 a) for n = 1
    exact = (np.pi * (np.sinh(2.03) ** 2 - np.sinh(2.01) ** 2)) ** 0.25
    assert norm == pytest.approx(exact, rel=1e-12)
    with pytest.raises(ValueError):
        sh.SharpnessFamily(1, 2.0, 0.5, 0.25)


def test_symbol_vanishes_near_zero():
    m = sh.SharpnessFamily(1, 2.0, 0.01, 0.25).m
    assert np.all(m(np.array([0.0, 0.5, 1.0])) == 0.0)
    assert m(5.0) > 0


def test_blowup_at_endpoint_is_flat():
    eps = 2.0 ** -np.arange(12, 6, -1)
    spec = sh.SharpnessFamily(1, 2.0, float(eps[0]), 0.25, 4.0)
    rep = sh.blowup_measure(spec, eps)
    assert rep.passed
