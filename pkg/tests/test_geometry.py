import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
import hypothesis.strategies as st

from wavekit import geometry as geo
from wavekit.specfun import sphere_area

finite = dict(allow_nan=False, allow_infinity=False)


@st.composite
def elements(draw, n):
    x = math.exp(draw(st.floats(-3.0, 3.0, **finite)))
    y = draw(st.lists(st.floats(-5.0, 5.0, **finite), min_size=n, max_size=n))
    return geo.GroupElement(n, x, tuple(y))


def _vec(g):
    return np.array([g.x, *g.y])


@pytest.mark.parametrize("n", [1, 2, 3])
@given(data=st.data())
@settings(max_examples=60, deadline=None)
def test_group_laws(n, data):
    g, h, k = (data.draw(elements(n)) for _ in range(3))
    lhs = geo.multiply(geo.multiply(g, h), k)
    rhs = geo.multiply(g, geo.multiply(h, k))
    np.testing.assert_allclose(_vec(lhs), _vec(rhs), rtol=1e-12, atol=1e-12 * np.abs(_vec(rhs)).max())
    e = geo.multiply(g, geo.inverse(g))
    np.testing.assert_allclose(_vec(e), _vec(geo.GroupElement.identity(n)), atol=1e-12 * max(1, np.abs(_vec(g)).max() / g.x))
    assert geo.modular(geo.multiply(g, h)) == pytest.approx(geo.modular(g) * geo.modular(h), rel=1e-12)


@given(data=st.data())
@settings(max_examples=60, deadline=None)
def test_distance_is_left_invariant(data):
    g, h, k = (data.draw(elements(2)) for _ in range(3))
    d0 = geo.dist(h, k)
    d1 = geo.dist(geo.multiply(g, h), geo.multiply(g, k))
    assert d1 == pytest.approx(d0, rel=1e-9, abs=1e-9)


def test_distance_closed_form():
    # distance from (1, 0) to (x, 0) is |log x|; to (1, y) is 2 asinh(|y|/2)
    assert geo.dist_to_identity(geo.GroupElement(1, 5.0, (0.0,))) == pytest.approx(math.log(5.0))
    assert geo.dist_to_identity(geo.GroupElement(2, 1.0, (3.0, 4.0))) == pytest.approx(2 * math.asinh(2.5))


def test_dimension_mismatch():
    with pytest.raises(geo.DimensionError):
        geo.multiply(geo.GroupElement.identity(1), geo.GroupElement.identity(2))
    with pytest.raises(geo.DimensionError):
        geo.GroupElement(2, 1.0, (0.0,))


@pytest.mark.parametrize("n", [1, 2, 3])
@given(r=st.floats(1e-3, 15.0, **finite), data=st.data())
@settings(max_examples=40, deadline=None)
def test_polar_round_trip(n, r, data):
    raw = np.array(data.draw(st.lists(st.floats(-1, 1, **finite), min_size=n + 1, max_size=n + 1)))
    assume(np.linalg.norm(raw) > 0.1)
    om = raw / np.linalg.norm(raw)
    # keep omega_{n+1} away from -1 where x = e^{r} overflows relative precision
    assume(om[-1] > -0.999)
    p = geo.PolarPoint(r, tuple(om))
    g = geo.polar_to_group(p)
    assert geo.dist_to_identity(g) == pytest.approx(r, rel=1e-9)
    q = geo.group_to_polar(g)
    assert q.r == pytest.approx(r, rel=1e-9)
    np.testing.assert_allclose(q.omega, om, atol=1e-7)


def test_group_to_polar_at_identity():
    with pytest.raises(ValueError):
        geo.group_to_polar(geo.GroupElement.identity(2))


@pytest.mark.parametrize("beta", [-2.0, -1.0, -0.5, 0.0, 1.0, 2.5])
@pytest.mark.parametrize("r", [0.01, 1.0, 8.0])
def test_sphere_weight_n2_closed_form(beta, r):
    # 2 pi int_{-1}^{1} (u sinh r + cosh r)^beta du
    if beta == -1.0:
        exact = 4 * np.pi * r / np.sinh(r)
    else:
        b = beta + 1
        exact = 2 * np.pi * 2 * np.sinh(b * r) / (b * np.sinh(r))
    assert geo.sphere_weight(2, beta, r) == pytest.approx(exact, rel=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_sphere_weight_zero_power_is_area(n):
    assert geo.sphere_weight(n, 0.0, 3.0) == pytest.approx(sphere_area(n), rel=1e-12)


def test_sphere_weight_n1_closed_form():
    # int_0^{2 pi} (cos t sinh r + cosh r)^{-1} dt = 2 pi
    assert geo.sphere_weight(1, -1.0, 5.0) == pytest.approx(2 * np.pi, rel=1e-10)


def test_right_haar_volume_of_ball():
    # for n = 1 both Haar measures of the geodesic ball equal 2 pi (cosh R - 1)
    R = 1.5
    one = lambda x, y: np.ones_like(x)
    exact = 2 * np.pi * (np.cosh(R) - 1)
    assert geo.right_haar_integral(one, 1, R) == pytest.approx(exact, rel=1e-9)
    assert geo.right_haar_integral(one, 1, R, measure="left") == pytest.approx(exact, rel=1e-9)
    # n = 2 left measure is hyperbolic volume pi (sinh 2R - 2R)
    v = geo.right_haar_integral(one, 2, R, measure="left", nodes=24)
    assert v == pytest.approx(np.pi * (np.sinh(2 * R) - 2 * R), rel=1e-9)


def test_lemma22_density_n2():
    # A(r) = sinh^2 r * 4 pi r / sinh r
    for r in (0.1, 1.0, 6.0):
        assert geo.lemma22_density(2, r) == pytest.approx(4 * np.pi * r * np.sinh(r), rel=1e-10)


def test_lemma22_density_matches_haar_integral():
    f = lambda x, y: x ** -1.0 * np.exp(-geo.dist_xy(x, np.sum(y ** 2, axis=-1)) ** 2)
    from scipy.integrate import quad
    exact = quad(lambda r: np.exp(-r * r) * geo.lemma22_density(2, r), 0, 6)[0]
    # the sphere rule is not graded, so x = 1/(u sinh r + cosh r) needs many nodes
    got = geo.right_haar_integral(f, 2, 6.0, nodes=64, tol=1e-9)
    assert got == pytest.approx(exact, rel=1e-6)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_radial_envelopes(n):
    rep = geo.verify_lemma21(n, r_grid=np.geomspace(0.01, 20, 17), nodes=48)
    assert rep.passed, rep.summary_lines()


def test_cz_admissibility_and_split():
    R = geo.CZSet(1.0, 1.0, (0.0,), np.e ** 3)
    assert geo.cz_admissible(R)
    kids = geo.cz_split(R)
    assert all(geo.cz_admissible(c) for c in kids)
    assert sum(geo.cz_measure(c) for c in kids) == pytest.approx(geo.cz_measure(R))
    bad = geo.CZSet(1.0, 1.0, (0.0,), 1.0)
    assert geo.cz_violations(bad)


def test_group_to_polar_on_the_x_axis():
    # (e, 0) lies at distance 1 straight "down" the x-axis: omega = (0, -1)
    p = geo.group_to_polar(geo.GroupElement(1, np.e, (0.0,)))
    assert p.r == pytest.approx(1.0, rel=1e-14)
    np.testing.assert_allclose(p.omega, (0.0, -1.0), atol=1e-12)
