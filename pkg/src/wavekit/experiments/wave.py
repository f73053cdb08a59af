"""Wave propagation for delta^{1/2}-radial data, L^p and Sobolev norms, growth probes.

Two representations are used.  The spectral one stores the spherical
transform of the radial factor and evolves it by cos(t lam), sin(t lam)/lam.
The Abel one stores h = A f0 on a uniform periodic s-grid: since the
spherical transform is the Euclidean Fourier transform of A f0, every
multiplier m(sqrt L) acts on h as the 1-D Fourier multiplier m(lam) (FFT),
and the wave group acts by d'Alembert shifts.  Radial profiles are recovered
by the inverse Abel transform, implemented for n = 1 and n = 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from ..geometry import polar_base, sphere_weight, zonal_rule
from ..quadrature import composite_legendre, fit_power_law, gauss_legendre, jacobi_on_interval
from ..report import ExperimentReport
from ..spherical import (RadialProfile, SpectralProfile, inverse_transform, lambda_rule,
                         phi_constant)
from ..specfun import inversion_constant, plancherel_density, sphere_area


# ---------------------------------------------------------------------------
# spectral representation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WaveState:
    n: int
    f0_hat: SpectralProfile
    g0_hat: SpectralProfile
    t: float = 0.0


def _sinc_t(t, lam):
    lam = np.asarray(lam, dtype=float)
    safe = np.where(lam == 0, 1.0, lam)
    return np.where(lam == 0, t, np.sin(t * lam) / safe)


def evolve(state, t):
    """Advance by time t: u_hat = cos(t lam) f_hat + sin(t lam)/lam g_hat, and u_t likewise."""
    f, g = state.f0_hat, state.g0_hat
    if t == 0:
        return state

    def u(lam):
        lam = np.asarray(lam, dtype=float)
        return np.cos(t * lam) * f(lam) + _sinc_t(t, lam) * g(lam)

    def ut(lam):
        lam = np.asarray(lam, dtype=float)
        return -lam * np.sin(t * lam) * f(lam) + np.cos(t * lam) * g(lam)

    order = max(f.decay_order, g.decay_order + 1.0)
    return WaveState(state.n, SpectralProfile(u, order), SpectralProfile(ut, order - 1.0),
                     state.t + t)


def spectral_energy(state, lam, w):
    """int (lam^2 |f_hat|^2 + |g_hat|^2) |c|^{-2} dlam on a given rule."""
    dens = plancherel_density(state.n, lam)
    return float(np.sum(w * (lam ** 2 * np.abs(state.f0_hat(lam)) ** 2
                             + np.abs(state.g0_hat(lam)) ** 2) * dens))


def spatial_field(state, lam_max=200.0, r_max=10.0, damping=False):
    """Radial factor u0 of u(t) = delta^{1/2} u0 (spectral inversion)."""
    return inverse_transform(state.n, state.f0_hat, lam_max, r_max, damping=damping)


def spectral_l2_squared(n, f_hat, lam_max, r_scale=1.0, nodes=16):
    """||delta^{1/2} f0||_2^2 = K_n int |F f0|^2 |c|^{-2} dlam (Plancherel)."""
    lam, w = lambda_rule(lam_max, r_scale, nodes)
    return inversion_constant(n) * float(np.sum(w * np.abs(f_hat(lam)) ** 2
                                                * plancherel_density(n, lam)))


# ---------------------------------------------------------------------------
# L^p and Sobolev norms
# ---------------------------------------------------------------------------

def lp_weight(n, p, r):
    """W_p(r) with ||delta^{1/2} u0||_p^p = int |u0(r)|^p W_p(r) dr."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    beta = n * (p / 2.0 - 1.0)
    if beta == 0:
        return sphere_area(n) * np.sinh(r) ** n
    if float(beta).is_integer() and beta > 0:
        # polynomial in v: one fixed rule is exact for every r
        v, w = zonal_rule(n, None, max(8, int(beta) + 2))
        return (polar_base(r[:, None], v[None, :]) ** beta @ w) * np.sinh(r) ** n
    return np.array([sphere_weight(n, beta, ri) for ri in r]) * np.sinh(r) ** n


def radial_nodes(breaks, width=0.25, nodes=16):
    """Composite rule on the given breakpoints with panels no wider than ``width``."""
    pts = []
    breaks = sorted(set(float(b) for b in breaks))
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        k = max(1, int(np.ceil((hi - lo) / width)))
        pts.extend(np.linspace(lo, hi, k + 1)[:-1])
    pts.append(breaks[-1])
    return composite_legendre(np.asarray(pts), nodes)


def lp_norm(n, u0, p, r_max=None, breaks=(), width=0.1, nodes=16):
    """||delta^{1/2} u0||_{L^p(G)} for a radial profile u0."""
    a, b = u0.interval
    b = b if r_max is None else min(b, r_max)
    r, w = radial_nodes([a, b, *[x for x in breaks if a < x < b]], width, nodes)
    return float(np.sum(w * np.abs(u0(r)) ** p * lp_weight(n, p, r)) ** (1.0 / p))


def sobolev_norm(n, f0_hat, p, alpha, r_max, lam_max=200.0, width=0.1):
    """||(Id + L)^{alpha/2} delta^{1/2} f0||_{L^p}: multiply, invert, integrate."""
    prof = f0_hat.multiply(lambda lam: (1.0 + np.asarray(lam) ** 2) ** (alpha / 2.0), alpha)
    u = inverse_transform(n, prof, lam_max, r_max)
    return lp_norm(n, RadialProfile(u.eval, (0.0, r_max)), p, r_max, width=width)


# ---------------------------------------------------------------------------
# Abel representation
# ---------------------------------------------------------------------------

def abel_transform(n, f0, s, nodes=48):
    """A f0(s) = nu_n C_n int_{|s|}^b f0(r) (cosh r - cosh s)^{n/2-1} sinh r dr."""
    a, b = f0.interval
    s = np.abs(np.atleast_1d(np.asarray(s, dtype=float)))
    e = n / 2.0 - 1.0
    pref = sphere_area(n) * phi_constant(n)
    out = np.zeros(s.shape)
    cb = np.cosh(b)
    for i, si in enumerate(s.ravel()):
        lo = max(si, a)
        if lo >= b:
            continue
        # in c = cosh r the weight is (c - cosh s)^e and f0 is smooth in c
        cs = np.cosh(si)
        if lo == si:
            c, w = jacobi_on_interval(cs, cb, nodes, 0.0, e)
        else:
            c, w = jacobi_on_interval(np.cosh(lo), cb, nodes, 0.0, 0.0)
            w = w * (c - cs) ** e
        out.flat[i] = pref * np.sum(w * f0(np.arccosh(c)))
    return out


@dataclass
class AbelGrid:
    """Even function h(s) sampled on the periodic grid s_k = (k - N/2) ds."""

    n: int
    ds: float
    h: np.ndarray
    fine: list = field(default_factory=list)   # s-intervals with structure at scale ``scale``
    scale: float = 0.1

    @property
    def s(self):
        N = len(self.h)
        return (np.arange(N) - N // 2) * self.ds

    @property
    def lam(self):
        return 2.0 * np.pi * np.fft.fftfreq(len(self.h), self.ds)

    @classmethod
    def from_radial(cls, n, f0, half_width, ds):
        N = 2 * int(np.ceil(half_width / ds))
        N = 1 << int(np.ceil(np.log2(N)))
        s = (np.arange(N) - N // 2) * ds
        a, b = f0.interval
        h = np.zeros(N)
        inside = np.abs(s) < b
        h[inside] = abel_transform(n, f0, s[inside])
        return cls(n, ds, h, [(0.0, b)], (b - a) / 4.0)

    def multiply(self, m, fine=None):
        """Apply the even Fourier multiplier m(lam)."""
        H = np.fft.fft(np.fft.ifftshift(self.h))
        out = np.fft.fftshift(np.fft.ifft(H * m(self.lam))).real
        return AbelGrid(self.n, self.ds, out, self.fine if fine is None else fine, self.scale)

    def derivative(self):
        H = np.fft.fft(np.fft.ifftshift(self.h))
        return np.fft.fftshift(np.fft.ifft(H * 1j * self.lam)).real

    def wave(self, t, branch="f"):
        """cos(t sqrt L) (branch f) or sin(t sqrt L)/sqrt L (branch g) in the Abel picture."""
        if branch == "f":
            m = lambda lam: np.cos(t * lam)
        else:
            m = lambda lam: _sinc_t(t, lam)
        fine = [(max(0.0, t - b), t + b) for a, b in self.fine]
        return self.multiply(m, fine)

    def radial(self, r, s_end=None, nodes=24):
        """Inverse Abel transform at the points r (n = 1, 2)."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        dh = CubicSpline(self.s, self.derivative())
        if self.n == 2:
            # f0 = -h'(r) / (2 pi sinh r)
            return -dh(r) / (2.0 * np.pi * np.sinh(r))
        if self.n != 1:
            raise NotImplementedError("inverse Abel transform on the grid is implemented for n = 1, 2")
        s_end = self.s[-1] if s_end is None else s_end
        glob = _global_breaks(0.0, s_end, self.fine, self.scale / 4.0)
        out = np.empty(r.shape)
        for i, ri in enumerate(r.ravel()):
            s, w = self._n1_rule(ri, s_end, nodes, glob)
            out.flat[i] = np.sum(w * -dh(s))
        return out / (np.sqrt(2.0) * np.pi)

    def _n1_rule(self, r, s_end, nodes, glob):
        """Nodes and weights for int_r^s_end q(s) (cosh s - cosh r)^{-1/2} ds."""
        d = min(self.scale, 0.5)
        xs, ws = gauss_legendre(nodes)
        # [r, r + d]: s = r + v^2 removes the inverse square root
        vmax = np.sqrt(d)
        v = 0.5 * vmax * (xs + 1.0)
        s0 = r + v ** 2
        gap = 2.0 * np.sinh(0.5 * (s0 + r)) * np.sinh(0.5 * (s0 - r))
        safe = np.where(v == 0, 1.0, v)
        w0 = 0.5 * vmax * ws * 2.0 * np.where(v == 0, 0.0, safe / np.sqrt(np.maximum(gap, 1e-300)))
        # remaining range: global panels, graded away from the weight singularity
        a = r + d
        near = a + d * (2.0 ** np.arange(12) - 1.0)
        breaks = np.union1d(near[near < s_end], glob[glob > a])
        if breaks[-1] < s_end:
            breaks = np.append(breaks, s_end)
        s1, w1 = composite_legendre(breaks, nodes)
        w1 = w1 / np.sqrt(2.0 * np.sinh(0.5 * (s1 + r)) * np.sinh(0.5 * (s1 - r)))
        return np.concatenate([s0, s1]), np.concatenate([w0, w1])


def _global_breaks(lo, hi, fine, fine_width, cap=0.5, ratio=1.5):
    """Panels of width ``fine_width`` on the fine intervals, graded away from them up to ``cap``."""
    pts = [lo, hi]
    for a, b in fine:
        a, b = max(a, lo), min(b, hi)
        if a >= b:
            continue
        pts.extend(np.arange(a, b, fine_width))
        for edge, sign in ((a, -1.0), (b, 1.0)):
            x, h = edge, fine_width
            while lo < x < hi or x == edge:
                pts.append(x)
                x += sign * h
                h = min(h * ratio, cap)
    pts = np.unique(np.clip(pts, lo, hi))
    # fill coarse gaps
    out = [pts[0]]
    for x in pts[1:]:
        k = int(np.ceil((x - out[-1]) / cap))
        out.extend(np.linspace(out[-1], x, k + 1)[1:])
    return np.asarray(out)


def abel_lp_norm(grid, p, r_max, front=None, width=None, nodes=16):
    """||delta^{1/2} u0||_p with u0 the inverse Abel transform of ``grid``.

    The r-rule is fine (panel ``width``) near the front interval and graded
    towards it from both sides.
    """
    width = grid.scale / 4.0 if width is None else width
    fine = grid.fine if front is None else [front]
    pts = [0.0]
    lo_f = max(0.0, min(a for a, _ in fine))
    hi_f = min(r_max, max(b for _, b in fine))
    # graded panels from 0 up to the front, refining towards it
    left = []
    x, h = lo_f, width
    while x - h > 0:
        x -= h
        left.append(x)
        h = min(2 * h, 0.5)
    pts += sorted(left)
    pts += list(np.arange(lo_f, hi_f, width)) + [hi_f]
    x, h = hi_f, width
    while x < r_max:
        x = min(x + h, r_max)
        pts.append(x)
        h = min(2 * h, 0.5)
    pts = np.unique(np.asarray(pts))
    r, w = composite_legendre(pts, nodes)
    u = grid.radial(r)
    return float(np.sum(w * np.abs(u) ** p * lp_weight(grid.n, p, r)) ** (1.0 / p))


# ---------------------------------------------------------------------------
# growth experiment
# ---------------------------------------------------------------------------

def bump(width):
    """C^2 bump (1 - (r/w)^2)^3 on [0, w]."""
    return RadialProfile(lambda r: (1.0 - (np.asarray(r) / width) ** 2) ** 3, (0.0, width),
                         label=f"bump({width:g})")


def growth_experiment(n, p, alpha0, family, t_grid, branch="f", half_width=None,
                      points_per_scale=32, r_tail=12.0, tol=0.2):
    """Q(t) = ||u(t)||_p / ||data||_{L^p_alpha0} over a family; fitted exponent in 1 + t.

    branch "f": u = cos(t sqrt L) f; target 2|1/p - 1/2|.
    branch "g": u = sin(t sqrt L)/sqrt L g with alpha0 playing alpha_1; target 1.
    p = 2 uses the exact spectral Plancherel route.  A lower-bound probe of
    the operator norm, not a proof.
    """
    t_grid = np.asarray(sorted(t_grid), dtype=float)
    target = 2.0 * abs(1.0 / p - 0.5) if branch == "f" else 1.0
    rep = ExperimentReport(f"wave_growth_{branch}_n{n}_p{p:g}",
                           {"n": n, "p": p, "alpha": alpha0, "branch": branch,
                            "target_exponent": target, "label": "lower-bound probe"})
    rep.add_column("t", t_grid)
    Qs = []
    for k, f0 in enumerate(family):
        if p == 2:
            Q = _growth_l2(n, alpha0, f0, t_grid, branch)
        else:
            Q = _growth_abel(n, p, alpha0, f0, t_grid, branch, half_width, points_per_scale, r_tail)
        Qs.append(Q)
        rep.add_column(f"Q_{k}", Q)
    sup = np.max(np.array(Qs), axis=0)
    rep.add_column("sup_Q", sup)
    if p == 2 and branch == "f":
        rep.add_verdict("max Q(t) (spectral contraction)", float(np.max(sup)), 1.0 + 1e-10, "<=")
    fit = fit_power_law(1.0 + t_grid, sup)
    rep.add_column("one_plus_t", 1.0 + t_grid)
    rep.add_fit("sup_Q", fit, x="one_plus_t")
    rep.add_verdict("fitted growth exponent of sup Q", fit.slope, target + tol, "<=")
    # members whose own trend exceeds the target would contradict the estimate
    worst = max(fit_power_law(1.0 + t_grid, Q).slope for Q in Qs)
    rep.params["max member exponent"] = worst
    return rep


def _growth_l2(n, alpha, f0, t_grid, branch):
    from ..spherical import spherical_transform
    a, b = f0.interval
    lam_max = 60.0 / (b - a)
    F = spherical_transform(n, f0, lam_max, decay_order=-4.0 - n / 2.0)
    lam, w = lambda_rule(lam_max, b, 16)
    base = w * np.abs(F(lam)) ** 2 * plancherel_density(n, lam)
    denom = np.sum(base * (1.0 + lam ** 2) ** alpha)
    out = []
    for t in t_grid:
        m = np.cos(t * lam) if branch == "f" else _sinc_t(t, lam)
        out.append(np.sqrt(np.sum(base * m ** 2) / denom))
    return np.array(out)


def _growth_abel(n, p, alpha, f0, t_grid, branch, half_width, pps, r_tail):
    a, b = f0.interval
    ds = (b - a) / pps
    half = (t_grid[-1] + b + r_tail + 4.0) if half_width is None else half_width
    grid = AbelGrid.from_radial(n, f0, half, ds)
    sob = grid.multiply(lambda lam: (1.0 + lam ** 2) ** (alpha / 2.0))
    denom = abel_lp_norm(sob, p, r_tail, front=(0.0, b))
    out = []
    for t in t_grid:
        u = grid.wave(t, branch)
        out.append(abel_lp_norm(u, p, t + b + r_tail * (branch == "g") + 1e-12,
                                front=(max(0.0, t - b), t + b)) / denom)
    return np.array(out)
