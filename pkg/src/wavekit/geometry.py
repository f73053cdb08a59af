"""Group law, hyperbolic distance, Haar measures and polar coordinates on R+ x| R^n.

Points are written (x, y) with x > 0 and y in R^n; the product is
(x, y)(x', y') = (x x', y + x y').  Polar coordinates (r, omega) about the
identity use omega in S^n split as (omega', omega_{n+1}).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .quadrature import (QuadratureError, composite_legendre, gauss_jacobi,
                         jacobi_on_interval)
from .specfun import sphere_area


class DimensionError(ValueError):
    """Operands live in groups of different dimension."""


@dataclass(frozen=True)
class GroupElement:
    n: int
    x: float
    y: tuple

    def __post_init__(self):
        y = tuple(float(v) for v in np.atleast_1d(self.y))
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", float(self.x))
        if self.n < 1 or len(y) != self.n:
            raise DimensionError(f"y has length {len(y)}, expected n={self.n}")
        if not self.x > 0:
            raise ValueError("x must be positive")

    @classmethod
    def identity(cls, n):
        return cls(n, 1.0, (0.0,) * n)

    @property
    def yvec(self):
        return np.asarray(self.y)


@dataclass(frozen=True)
class PolarPoint:
    r: float
    omega: tuple

    def __post_init__(self):
        om = tuple(float(v) for v in self.omega)
        object.__setattr__(self, "omega", om)
        if self.r < 0:
            raise ValueError("r must be nonnegative")
        if abs(math.hypot(*om) - 1.0) > 1e-12:
            raise ValueError("omega must be a unit vector")

    @property
    def n(self):
        return len(self.omega) - 1


def _same_dim(g, h):
    if g.n != h.n:
        raise DimensionError(f"dimension mismatch: {g.n} vs {h.n}")


def multiply(g, h):
    _same_dim(g, h)
    return GroupElement(g.n, g.x * h.x, g.yvec + g.x * h.yvec)


def inverse(g):
    return GroupElement(g.n, 1.0 / g.x, -g.yvec / g.x)


def dist_xy(x, y2):
    """Vectorized distance to the identity from x and |y|^2."""
    x = np.asarray(x, dtype=float)
    # arcosh(1 + d) with d = ((x-1)^2 + |y|^2) / (2x) >= 0, no cancellation near 0
    d = np.maximum(((x - 1.0) ** 2 + np.asarray(y2, dtype=float)) / (2.0 * x), 0.0)
    return np.log1p(d + np.sqrt(d * (d + 2.0)))


def dist_to_identity(g):
    return float(dist_xy(g.x, float(g.yvec @ g.yvec)))


def dist(g, h):
    _same_dim(g, h)
    return dist_to_identity(multiply(inverse(g), h))


def modular(g):
    """delta(x, y) = x^{-n}."""
    return g.x ** (-g.n)


def polar_xy(r, u, omega_prime):
    """Vectorized (pol): x and y from r, omega_{n+1} = u and omega'."""
    r = np.asarray(r, dtype=float)
    den = np.asarray(u) * np.sinh(r) + np.cosh(r)
    x = 1.0 / den
    y = np.asarray(omega_prime) * (np.sinh(r) * x)[..., None]
    return x, y


def polar_to_group(p):
    om = np.asarray(p.omega)
    x, y = polar_xy(p.r, om[-1], om[:-1])
    return GroupElement(p.n, float(x), y)


def group_to_polar(g, min_radius=1e-10):
    r = dist_to_identity(g)
    if r < min_radius:
        raise ValueError("polar angle undefined at (or numerically at) the identity")
    sh = math.sinh(r)
    last = (1.0 - g.x * math.cosh(r)) / (g.x * sh)
    prime = g.yvec / (g.x * sh)
    om = np.append(prime, last)
    norm = float(np.linalg.norm(om))
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"recovered omega has norm {norm!r}")
    return PolarPoint(r, tuple(om / norm))


# ---------------------------------------------------------------------------
# Sphere integrals
# ---------------------------------------------------------------------------

def _coth_minus_one(r):
    return 2.0 / np.expm1(2.0 * r)


def zonal_rule(n, r=None, nodes=64, extra_breaks=()):
    """Rule for int_{S^n} g(omega_{n+1}) d omega in the variable v = 1 + omega_{n+1}.

    Returned weights include nu_{n-1} (v (2-v))^{(n-2)/2}.  When ``r`` is
    given the panels are graded towards v = 0 at the scale coth r - 1, where
    (omega_{n+1} sinh r + cosh r)^beta is nearly singular.  Working in v
    keeps that scale representable for large r.
    """
    a = (n - 2) / 2.0
    scale = 2.0 if r is None else min(2.0, float(_coth_minus_one(r)))
    breaks = [0.0]
    if scale < 1.0:
        h = scale
        while breaks[-1] + h < 1.0:
            breaks.append(breaks[-1] + h)
            h *= 2.0
        breaks.append(1.0)
    breaks.append(2.0)
    breaks = sorted(set(breaks) | {float(b) for b in extra_breaks if 0.0 < b < 2.0})
    vs, ws = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        alpha = a if hi == 2.0 else 0.0
        beta = a if lo == 0.0 else 0.0
        v, w = jacobi_on_interval(lo, hi, nodes, alpha, beta)
        if alpha == 0.0:
            w = w * (2.0 - v) ** a
        if beta == 0.0:
            w = w * v ** a
        vs.append(v)
        ws.append(w)
    return np.concatenate(vs), sphere_area(n - 1) * np.concatenate(ws)


def polar_base(r, v):
    """omega_{n+1} sinh r + cosh r = e^{-r} + v sinh r, with v = 1 + omega_{n+1}."""
    return np.exp(-r) + v * np.sinh(r)


def sphere_weight(n, beta, r, nodes=64):
    """int_{S^n} ((omega_{n+1} + coth r) sinh r)^beta d omega."""
    if r <= 0:
        return sphere_area(n)
    v, w = zonal_rule(n, r, nodes)
    return float(np.sum(w * polar_base(r, v) ** beta))


@lru_cache(maxsize=16)
def _sphere_points(n, nodes):
    """Product Gauss rule on S^n: points (M, n+1), weights (M,)."""
    if n == 0:
        return np.array([[-1.0], [1.0]]), np.array([1.0, 1.0])
    pts, wts = _sphere_points(n - 1, nodes)
    u, w = gauss_jacobi(nodes, (n - 2) / 2.0, (n - 2) / 2.0)
    c = np.sqrt(1.0 - u ** 2)
    out = np.concatenate([c[:, None, None] * pts[None, :, :],
                          np.broadcast_to(u[:, None, None], (len(u), len(pts), 1))], axis=2)
    return out.reshape(-1, n + 1), (w[:, None] * wts[None, :]).ravel()


def _haar_once(f, n, r_lo, r_hi, panels, nodes, zonal, right):
    rb = np.linspace(r_lo, r_hi, panels + 1)
    rr, wr = composite_legendre(rb, nodes)
    if zonal:
        v, wu = zonal_rule(n, None, nodes)
        u = v - 1.0
        om = np.zeros((len(u), n + 1))
        om[:, 0] = np.sqrt(1.0 - u ** 2)
        om[:, -1] = u
    else:
        om, wu = _sphere_points(n, nodes)
    R = rr[:, None]
    x, y = polar_xy(R, om[None, :, -1], om[None, :, :-1])
    dens = np.sinh(R) ** n * (x ** n if right else 1.0)
    vals = np.asarray(f(x, y))
    return np.sum(wr[:, None] * wu[None, :] * dens * vals)


def right_haar_integral(f, n, r_max, r_min=0.0, nodes=32, tol=1e-10, max_levels=6,
                        zonal=False, measure="right"):
    """int f d rho over the polar shell r_min <= r <= r_max.

    ``f(x, y)`` is vectorized: x has shape S, y shape S + (n,).  With
    ``zonal=True`` f must depend only on (r, omega_{n+1}) and the sphere is
    reduced to a single Jacobi-weighted integral.  ``measure="left"`` gives
    int f dV instead.  Radial panels are doubled until two levels agree to
    ``tol``; the sphere rule is fixed at ``nodes`` per direction and is not
    graded, so integrands peaked in omega at large r need more nodes.
    """
    right = measure == "right"
    prev = None
    for level in range(max_levels):
        val = _haar_once(f, n, r_min, r_max, 2 ** level, nodes, zonal, right)
        if prev is not None and abs(val - prev) <= tol * max(abs(val), 1e-300):
            return val
        prev = val
    raise QuadratureError(f"Haar integral not converged: last change {abs(val - prev):.3g}")


def lemma21_terms(n, r, nodes=64):
    """S(r) = int (..)^{-n/2} d omega and D(r) = int |d/dr (..)^{-n/2}| d omega."""
    ch = np.cosh(r)
    # u cosh r + sinh r = v cosh r - e^{-r} changes sign at v = 1 - tanh r
    v, w = zonal_rule(n, r, nodes, extra_breaks=(2.0 / (np.exp(2.0 * r) + 1.0),))
    base = polar_base(r, v)
    S = float(np.sum(w * base ** (-n / 2.0)))
    D = float(np.sum(w * (n / 2.0) * base ** (-n / 2.0 - 1.0) * np.abs(v * ch - np.exp(-r))))
    return S, D


def lemma22_density(n, r, nodes=64):
    """A(r) with int delta^{1/2} f d rho = int_0^inf f(r) A(r) dr for radial f."""
    return sphere_weight(n, -n / 2.0, r, nodes) * np.sinh(r) ** n


def _lemma21_envelopes(n, r, nodes):
    sd = np.array([sum(lemma21_terms(n, ri, nodes)) for ri in r])
    # the large-r envelope is taken over [1, r_max]: for n = 1 its sup sits at r -> 1+
    small, large = r <= 1.0, r >= 1.0
    ratio = sd[large] / (r[large] * np.exp(-n * r[large] / 2.0))
    return sd, ratio, float(np.max(sd[small])), float(np.max(ratio))


def verify_lemma21(n, r_grid=None, nodes=64, stability=0.05, trend_tol=0.05):
    """sup_{r<=1} (S + D) and sup_{r>1} (S + D)/(r e^{-nr/2}), with refinement stability.

    Refinement doubles both the r-grid density and the angular nodes.
    """
    from .quadrature import fit_power_law
    from .report import ExperimentReport
    r = np.geomspace(0.01, 20.0, 41) if r_grid is None else np.asarray(r_grid, dtype=float)
    r = np.union1d(r, [1.0])
    fine = np.sort(np.concatenate([r, np.sqrt(r[1:] * r[:-1])]))
    sd, ratio, c_small, c_large = _lemma21_envelopes(n, r, nodes)
    _, _, f_small, f_large = _lemma21_envelopes(n, fine, 2 * nodes)
    rep = ExperimentReport(f"lemma21_n{n}", {"n": n, "C_small": c_small, "C_large": c_large})
    rep.add_column("r", r)
    rep.add_column("S_plus_D", sd)
    rep.add_column("r_large", r[r >= 1.0])
    rep.add_column("ratio_large", ratio)
    rep.add_verdict("sup_{r<=1} (S+D) refinement change", abs(f_small / c_small - 1.0), stability)
    rep.add_verdict("sup_{r>=1} (S+D)/(r e^(-nr/2)) refinement change",
                    abs(f_large / c_large - 1.0), stability)
    tail = r >= 2.0
    if n == 1 and np.count_nonzero(tail) >= 3:
        fit = fit_power_law(r[tail], sd[tail] / (r[tail] * np.exp(-r[tail] / 2.0)))
        rep.add_fit("ratio_large", fit, x="r_large")
        rep.add_verdict("log-log trend of the r>1 ratio on [2, 20]", fit.slope, trend_tol)
    return rep


def verify_lemma22(n, r_grid=None, nodes=64, stability=0.05):
    """A(r)/r^n on (0,1] and A(r)/(r e^{nr/2}) on (1,20]: sups and refinement stability."""
    from .report import ExperimentReport
    r = np.geomspace(0.01, 20.0, 41) if r_grid is None else np.sort(np.asarray(r_grid, dtype=float))

    def sups(nd):
        A = np.array([lemma22_density(n, ri, nd) for ri in r])
        sm, lg = r <= 1.0, r > 1.0
        return A, float(np.max(A[sm] / r[sm] ** n)), float(np.max(A[lg] / (r[lg] * np.exp(n * r[lg] / 2.0))))

    A, c1, c2 = sups(nodes)
    _, d1, d2 = sups(2 * nodes)
    rep = ExperimentReport(f"lemma22_n{n}", {"n": n, "C_small": c1, "C_large": c2})
    rep.add_column("r", r)
    rep.add_column("A", A)
    rep.add_verdict("sup A/r^n on (0,1] refinement change", abs(d1 / c1 - 1.0), stability)
    rep.add_verdict("sup A/(r e^(nr/2)) on (1,20] refinement change", abs(d2 / c2 - 1.0), stability)
    return rep


# ---------------------------------------------------------------------------
# Calderon-Zygmund sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CZSet:
    """[x e^{-s}, x e^{s}] x Q with Q the cube [corner, corner + ell]^n."""

    x: float
    s: float
    corner: tuple
    ell: float

    def __post_init__(self):
        object.__setattr__(self, "corner", tuple(float(c) for c in np.atleast_1d(self.corner)))
        if not (self.x > 0 and self.s > 0 and self.ell > 0):
            raise ValueError("CZ set needs x, s, ell > 0")

    @property
    def n(self):
        return len(self.corner)


def cz_violations(R):
    """Admissibility inequalities that fail, as readable strings."""
    if R.s <= 1:
        lo, hi, tag = math.e ** 2 * R.x * R.s, math.e ** 8 * R.x * R.s, "e^2 x s <= ell <= e^8 x s"
    else:
        lo, hi, tag = math.e ** (2 * R.s) * R.x, math.e ** (8 * R.s) * R.x, \
            "e^{2s} x <= ell <= e^{8s} x"
    out = []
    if not lo <= R.ell:
        out.append(f"{tag}: lower bound {lo:.6g} > ell={R.ell:.6g}")
    if not R.ell <= hi:
        out.append(f"{tag}: upper bound {hi:.6g} < ell={R.ell:.6g}")
    return out


def cz_admissible(R):
    return not cz_violations(R)


def cz_measure(R):
    """Right Haar measure: int x^{-1} dx over the interval (= 2s) times |Q|."""
    return 2.0 * R.s * R.ell ** R.n


class CZSplitError(ValueError):
    pass


def cz_split(R):
    """Split into admissible children of equal measure, R+ split first."""
    halves = [CZSet(R.x * math.exp(-R.s / 2), R.s / 2, R.corner, R.ell),
              CZSet(R.x * math.exp(R.s / 2), R.s / 2, R.corner, R.ell)]
    if all(cz_admissible(c) for c in halves):
        return halves
    h = R.ell / 2.0
    cubes = [CZSet(R.x, R.s, tuple(c + h * b for c, b in zip(R.corner, bits)), h)
             for bits in itertools.product((0, 1), repeat=R.n)]
    if all(cz_admissible(c) for c in cubes):
        return cubes
    msgs = [f"R+ split: {v}" for c in halves for v in cz_violations(c)]
    msgs += [f"cube split: {v}" for c in cubes[:1] for v in cz_violations(c)]
    raise CZSplitError("no admissible splitting; " + "; ".join(msgs))
