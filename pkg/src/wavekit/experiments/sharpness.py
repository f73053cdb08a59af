"""The sharpness construction: annular data near the light cone and its focusing at the identity.

f_t^eps = delta^{1/2} 1{|R - t - 2 eps| < eps} is propagated by
cos(t sqrt L) eta(sqrt L) m(sqrt L) with m = |c|^2 lam^n lam^{-alpha0}.  The
kernel of that operator is kappa_t(R) = int cos(t lam) eta lam^gamma
phi_lam(R) dlam with gamma = n - alpha0, which blows up like
(R - t)^{alpha0 - n/2 - 1} as R -> t+.  That singularity sends mass from the
annulus back to the identity.

kappa_t is evaluated through the Abel representation of phi_lam,
phi_lam(R) = C_n sinh^{1-n} R int_{-R}^{R} cos(lam s)(cosh R - cosh s)^{n/2-1} ds,
which turns the lam-integral into int_0^inf cos(lam x) lam^gamma dlam
= M_gamma |x|^{-1-gamma} (a Hadamard finite part at x = 0) minus a
low-frequency correction from 1 - eta, supported in lam <= 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..geometry import zonal_rule
from ..quadrature import (abel_limit, composite_legendre, damped_fourier, fit_power_law,
                          jacobi_on_interval)
from ..report import ExperimentReport
from ..specfun import (CutoffSpec, SpectralSymbol, gamma_real, inversion_constant, make_cutoff,
                       plancherel_density)
from ..spherical import (RadialProfile, SpectralProfile, lambda_rule, phi, phi_constant,
                         spherical_transform)
from .wave import lp_weight

_VANISH_INSIDE = CutoffSpec(1.0, 2.0, "vanish-inside")


@dataclass(frozen=True)
class SharpnessFamily:
    n: int
    t: float
    eps: float
    alpha0: float
    p: float = None
    eta: CutoffSpec = field(default=_VANISH_INSIDE)

    def __post_init__(self):
        if self.p is None:
            object.__setattr__(self, "p", 4.0 * self.n)
        if not (self.t > 0 and 0 < self.eps < self.t / 10.0):
            raise ValueError("need t > 0 and 0 < eps < t/10")

    @property
    def gamma(self):
        return self.n - self.alpha0

    @property
    def support(self):
        return (self.t + self.eps, self.t + 3.0 * self.eps)

    @property
    def m(self):
        """|c|^2 lam^n lam^{-alpha0}, smoothly cut off near lam = 0 by eta."""
        cut = make_cutoff(self.eta)
        n, g = self.n, self.gamma

        def m(lam):
            lam = np.abs(np.asarray(lam, dtype=float))
            dens = plancherel_density(n, lam)
            safe = np.where(dens > 0, dens, 1.0)
            return np.where(dens > 0, cut(lam) * lam ** g / safe, 0.0)
        return SpectralSymbol(m, -self.alpha0, label=f"sharpness m (alpha0={self.alpha0:g})")


def sharpness_family(spec, lam_max=200.0):
    """Radial factor 1_[t+eps, t+3eps], its spherical transform, and ||f||_p."""
    a, b = spec.support
    f0 = RadialProfile(lambda r: np.ones_like(np.asarray(r, dtype=float)), (a, b),
                       label=f"annulus eps={spec.eps:g}")
    F = spherical_transform(spec.n, f0, lam_max, decay_order=-1.0 - spec.n / 2.0)
    return f0, F, annulus_norm(spec.n, spec.p, a, b)


def annulus_norm(n, p, a, b, nodes=24):
    r, w = composite_legendre(np.array([a, b]), nodes)
    return float(np.sum(w * lp_weight(n, p, r)) ** (1.0 / p))


# ---------------------------------------------------------------------------
# the model integral
# ---------------------------------------------------------------------------

def model_constant(gamma, kind="cos"):
    """M with int_0^inf trig(lam R) lam^gamma dlam = M R^{-1-gamma}."""
    c = gamma_real((gamma + 1.0) / 2.0) / gamma_real(-gamma / 2.0) * 2.0 ** gamma * np.sqrt(np.pi)
    if kind == "cos":
        return c
    if kind == "sin":
        return -c / np.tan(np.pi * gamma / 2.0)
    raise ValueError(f"unknown kind {kind!r}")


@dataclass(frozen=True)
class ModelIntegral:
    value: float
    closed_form: float
    rel_dev: float
    extrapolation_error: float


def model_integral(gamma, R, kind="cos", levels=7, nodes=12):
    """Abel-regularized int_0^inf trig(lam R) lam^gamma dlam against its closed form."""
    if not -1.0 < gamma < 3.0 or (kind == "cos" and float(gamma).is_integer() and gamma % 2 == 1):
        raise ValueError("gamma must lie in (-1, 3) and avoid odd integers")
    g = lambda lam: lam ** gamma
    res = abel_limit(lambda e: damped_fourier(g, R, e, 1.0 / R, nodes, kind, singular_power=gamma),
                     0.2 * R, levels, rtol=1e-10)
    closed = model_constant(gamma, kind) * R ** (-1.0 - gamma)
    v = float(res.value.real)
    return ModelIntegral(v, closed, abs(v / closed - 1.0), res.error)


# ---------------------------------------------------------------------------
# kappa_t near the light cone
# ---------------------------------------------------------------------------

def _cosh_gap(r, s):
    """cosh r - cosh s without cancellation."""
    return 2.0 * np.sinh(0.5 * (r + s)) * np.sinh(0.5 * (r - s))


def _finite_part(n, t, gamma, r, nodes):
    """FP int_{-r}^{r} (cosh r - cosh s)^{n/2-1} |s - t|^{-1-gamma} ds for t < r."""
    e = n / 2.0 - 1.0
    a = 0.5 * (r - t)
    # near side [t + a, r]: weight (r - s)^e
    s, w = jacobi_on_interval(t + a, r, nodes, e, 0.0)
    near = np.sum(w * (_cosh_gap(r, s) / (r - s)) ** e * (s - t) ** (-1.0 - gamma))
    # finite part on [t - a, t + a]
    g0 = _cosh_gap(r, t)
    x, w = jacobi_on_interval(0.0, a, nodes, 0.0, 1.0 - gamma)
    if e == 0.0:
        second = np.zeros_like(x)
    else:
        dp = 2.0 * np.sinh(t + 0.5 * x) * np.sinh(0.5 * x) / g0
        dm = -2.0 * np.sinh(t - 0.5 * x) * np.sinh(0.5 * x) / g0
        second = (np.expm1(e * np.log1p(-dp)) + np.expm1(e * np.log1p(-dm))) / x ** 2
    g0e = g0 ** e
    fp = g0e * (np.sum(w * second) - 2.0 * a ** (-gamma) / gamma)
    # far side [-r, t - a] in z = log(t - s): |s - t|^{-1-gamma} ds = e^{-gamma z} dz
    z0, z1 = np.log(a), np.log(t + r)
    k = max(2, int(np.ceil((z1 - z0) / 0.5)))
    zb = np.linspace(z0, z1, k + 1)
    z, w = composite_legendre(zb[:-1], nodes)
    s = t - np.exp(z)
    far = np.sum(w * _cosh_gap(r, s) ** e * np.exp(-gamma * z))
    # last panel carries (z1 - z)^e from r + s = -(t + r) expm1(z - z1)
    z, w = jacobi_on_interval(zb[-2], z1, nodes, e, 0.0)
    rps = -(t + r) * np.expm1(z - z1)
    s = rps - r
    gap = 2.0 * np.sinh(0.5 * rps) * np.sinh(0.5 * (r - s))
    far += np.sum(w * (gap / (z1 - z)) ** e * np.exp(-gamma * z))
    return near + fp + far


def kappa_t(n, t, alpha0, r, eta=_VANISH_INSIDE, nodes=24):
    """kappa_t(r) = int_0^inf cos(t lam) eta(lam) lam^{n - alpha0} phi_lam(r) dlam for r > t."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= t):
        raise ValueError("kappa_t is evaluated on the outer side r > t")
    gamma = n - alpha0
    if not 0.0 < gamma < 2.0:
        # the finite part subtracts only the value at s = t
        raise ValueError("kappa_t needs 0 < n - alpha0 < 2")
    M = model_constant(gamma)
    cut = make_cutoff(eta)
    # low-frequency correction: int_0^outer cos(t lam)(1 - eta) lam^gamma phi dlam
    l0, w0 = jacobi_on_interval(0.0, eta.inner, nodes, 0.0, gamma)
    # the smooth step is steep inside its ramp: several panels
    l1, w1 = composite_legendre(np.linspace(eta.inner, eta.outer, 9), nodes)
    lam = np.concatenate([l0, l1])
    wl = np.concatenate([w0, w1 * l1 ** gamma]) * np.cos(t * lam) * (1.0 - cut(lam))
    Cn = phi_constant(n)
    out = np.empty(r.shape)
    for i, ri in enumerate(r.ravel()):
        lead = Cn * np.sinh(ri) ** (1 - n) * M * _finite_part(n, t, gamma, ri, nodes)
        out.flat[i] = lead - wl @ phi(n, lam, ri)
    return out


def kappa_t_spectral(n, t, alpha0, r, eta=_VANISH_INSIDE, levels=7, nodes=16):
    """Independent route: Abel-regularized lam-integral of cos(t lam) eta lam^gamma phi_lam(r)."""
    gamma = n - alpha0
    cut = make_cutoff(eta)
    eta0 = min(0.2 * (r - t), 0.25)
    # the cutoff ramp gets its own fine panels
    l0, w0 = composite_legendre(np.linspace(eta.inner, eta.outer, 9), nodes)
    l1, w1 = lambda_rule(45.0 / (eta0 / 2 ** (levels - 1)), r + t, nodes, lam_min=eta.outer)
    lam, w = np.concatenate([l0, l1]), np.concatenate([w0, w1])
    base = w * np.cos(t * lam) * cut(lam) * lam ** gamma * phi(n, lam, r)
    res = abel_limit(lambda e: base @ np.exp(-e * lam), eta0, levels, rtol=1e-8)
    return float(res.value.real)


def leading_coefficient(n, t, alpha0):
    """A with kappa_t(t + eps) = A eps^{alpha0 - n/2 - 1} (1 + o(1)).

    Near s = t the Abel weight is (sinh t (r - s))^{n/2-1}, and the finite
    part of int_{-inf}^{r} (r - s)^e |s - t|^{-1-gamma} ds is
    eps^{e-gamma} [B(-gamma, e+1) + B(-gamma, gamma-e)].
    """
    e, g = n / 2.0 - 1.0, n - alpha0
    G = gamma_real
    B = G(-g) * G(e + 1.0) / G(e + 1.0 - g) + G(-g) * G(g - e) / G(-e) if e != 0 else \
        G(-g) / G(1.0 - g)
    return phi_constant(n) * np.sinh(t) ** (1 - n + e) * model_constant(g) * B


def kappa_t_expansion(n, t, alpha0, eps_grid=None, nodes=24, tol=0.1):
    """Fit kappa_t(t + eps) ~ eps^{alpha0 - n/2 - 1} and the remainder ~ eps^{alpha0 - n/2}."""
    lo, hi = n / 2.0 - 3.0 / 8.0, n / 2.0 - 1.0 / 8.0
    if not lo < alpha0 < hi:
        raise ValueError(f"alpha0 must lie in ({lo}, {hi})")
    eps = np.geomspace(1e-4, 1e-2, 9) if eps_grid is None else np.asarray(eps_grid, dtype=float)
    k = kappa_t(n, t, alpha0, t + eps, nodes=nodes)
    lead = alpha0 - n / 2.0 - 1.0
    rep = ExperimentReport(f"kappa_t_n{n}_alpha{alpha0:g}",
                           {"n": n, "t": t, "alpha0": alpha0, "expected_slope": lead})
    rep.add_column("eps", eps)
    rep.add_column("kappa", k)
    fit = fit_power_law(eps, k)
    rep.add_fit("kappa", fit, x="eps")
    rep.add_verdict("|slope - (alpha0 - n/2 - 1)|", abs(fit.slope - lead), tol, "<=")
    # kappa = A eps^lead + B eps^{lead+1} + C; remove the fitted leading term
    A = np.vstack([eps ** lead, eps ** (lead + 1.0), np.ones_like(eps)]).T
    coef, *_ = np.linalg.lstsq(A / np.abs(k)[:, None], k / np.abs(k), rcond=None)
    resid = k - coef[0] * eps ** lead
    rep.add_column("residual", resid)
    rfit = fit_power_law(eps, resid)
    rep.add_fit("residual", rfit, x="eps")
    rep.params["leading coefficient"] = float(coef[0])
    rep.params["leading coefficient (analytic)"] = float(leading_coefficient(n, t, alpha0))
    rep.add_verdict("residual slope", rfit.slope, alpha0 - n / 2.0 - tol, ">=")
    return rep


# ---------------------------------------------------------------------------
# blow-up at the identity
# ---------------------------------------------------------------------------

def _distance(rho, s, u):
    """d with cosh d = cosh rho cosh s - sinh rho sinh s u."""
    x = 2.0 * np.sinh(0.5 * (s - rho)) ** 2 + np.sinh(rho) * np.sinh(s) * (1.0 - u)
    return np.log1p(x + np.sqrt(x * (x + 2.0)))


def focused_profile(spec, rho, s_nodes=24, u_nodes=8, nodes=24):
    """u0(rho) = radial factor of T f_t^eps at radius rho, T = cos(t sqrt L) eta(sqrt L) m(sqrt L).

    T f = delta^{1/2} (f0 * K kappa_t); with f0 the annulus indicator
    u0(rho) = K int_annulus kappa_t(d(rho, s, omega)) sinh^n s ds d omega.
    """
    n = spec.n
    a, b = spec.support
    s, ws = jacobi_on_interval(a, b, s_nodes, 0.0, 0.0)
    v, wv = zonal_rule(n, None, u_nodes)
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    d = _distance(rho[:, None, None], s[None, :, None], v[None, None, :] - 1.0)
    k = kappa_t(n, spec.t, spec.alpha0, d.ravel(), spec.eta, nodes).reshape(d.shape)
    inner = k @ wv
    return inversion_constant(n) * inner @ (ws * np.sinh(s) ** n)


def blowup_measure(spec, eps_list, rho_nodes=6, min_points=4, tol=0.05):
    """Ratio ||T f||_{L^p(B(e, eps/100))} / ||f||_{L^p} across eps, and its log-log slope."""
    n, p = spec.n, spec.p
    endpoint = n * abs(1.0 / p - 0.5)
    expected = spec.alpha0 - n / 2.0 + n / p
    rep = ExperimentReport(f"blowup_n{n}_alpha{spec.alpha0:g}",
                           {"n": n, "p": p, "t": spec.t, "alpha0": spec.alpha0,
                            "endpoint": endpoint, "expected_slope": expected})
    used, ratios = [], []
    for eps in sorted(eps_list, reverse=True):
        try:
            fam = SharpnessFamily(n, spec.t, eps, spec.alpha0, p, spec.eta)
            rho, w = jacobi_on_interval(0.0, eps / 100.0, rho_nodes, 0.0, 0.0)
            u0 = focused_profile(fam, rho)
            num = np.sum(w * np.abs(u0) ** p * lp_weight(n, p, rho)) ** (1.0 / p)
            den = annulus_norm(n, p, *fam.support)
        except (ValueError, ArithmeticError) as exc:
            rep.notes.append(f"eps={eps:g} dropped: {exc}")
            continue
        if not np.isfinite(num) or num == 0:
            rep.notes.append(f"eps={eps:g} dropped: non-finite focused norm")
            continue
        used.append(eps)
        ratios.append(num / den)
    if len(used) < min_points:
        raise ValueError(f"only {len(used)} usable eps values (need {min_points})")
    rep.add_column("eps", used)
    rep.add_column("ratio", ratios)
    fit = fit_power_law(used, ratios)
    rep.add_fit("ratio", fit, x="eps")
    rep.add_verdict("|slope - expected|", abs(fit.slope - expected), tol, "<=")
    if spec.alpha0 < endpoint - tol:
        rep.add_verdict("slope (blow-up below the endpoint)", fit.slope, 0.0, "<")
    elif abs(spec.alpha0 - endpoint) <= 1e-12:
        rep.add_verdict("slope at the endpoint", fit.slope, -tol, ">=")
    else:
        rep.add_verdict("slope (no blow-up above the endpoint)", fit.slope, 0.0, ">")
    return rep
