"""Elementary spherical functions, their leading asymptotics, and the spherical transform.

phi_lam(t) is evaluated in two ways:

* quadrature of C_n (sinh t)^{1-n} int_{-t}^{t} cos(lam s) (cosh t - cosh s)^{n/2-1} ds
  after s = t x, where cosh t - cosh s = t^2 (1 - x^2) G(x) with G smooth and
  positive, so a Gauss-Gegenbauer rule removes both endpoint singularities;
* the Harish-Chandra expansion phi = 2 Re(c(lam) Phi_lam) for t away from 0
  and lam t large, where quadrature would need many nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import gammaln

from .quadrature import QuadratureError, gauss_jacobi
from .specfun import harish_chandra_c

MAX_NODES = 4096
# Harish-Chandra expansion is used when t >= HC_T_MIN and lam t >= HC_LT_MIN
HC_T_MIN = 0.5
HC_LAM_MIN = 1.0
HC_LT_MIN = 40.0


def phi_constant(n):
    """C_n = 2^{n/2-1} Gamma((n+1)/2) / (sqrt(pi) Gamma(n/2))."""
    return float(np.exp((n / 2.0 - 1.0) * np.log(2.0) + gammaln((n + 1) / 2.0)
                        - 0.5 * np.log(np.pi) - gammaln(n / 2.0)))


def leading_constant(n):
    """A_n = 2^{n/2} Gamma((n+1)/2) / sqrt(pi); equals 1 for n = 2."""
    return float(np.exp((n / 2.0) * np.log(2.0) + gammaln((n + 1) / 2.0) - 0.5 * np.log(np.pi)))


def displayed_leading_constant(n):
    """2^{n/2} Gamma((n+1)/2), the constant without the 1/sqrt(pi)."""
    return leading_constant(n) * np.sqrt(np.pi)


# ---------------------------------------------------------------------------
# helpers: log sinhc and its derivative
# ---------------------------------------------------------------------------

def _log_sinhc(z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = z < 1.0
    zs = z[small]
    out[small] = np.log(np.where(zs == 0, 1.0, np.sinh(zs) / np.where(zs == 0, 1.0, zs)))
    zl = z[~small]
    out[~small] = zl - np.log(2.0 * zl) + np.log1p(-np.exp(-2.0 * zl))
    return out


def _dlog_sinhc(z):
    """coth z - 1/z, with its series near 0."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = z < 1e-2
    zs = z[small]
    out[small] = zs / 3.0 - zs ** 3 / 45.0
    zl = z[~small]
    out[~small] = 1.0 / np.tanh(zl) - 1.0 / zl
    return out


def node_count(lam_t, t):
    """Gauss nodes needed for cos(lam t x) against a smooth weight on [-1, 1]."""
    return int(30 + np.ceil(0.6 * abs(lam_t) + 2.0 * t))


def _x_integrals(n, lam, t, nodes=None, derivative=False):
    """int_{-1}^{1} (1-x^2)^a G^a cos(lam t x) dx times (t/sinh t)^{n-1}, a = n/2 - 1.

    With ``derivative=True`` also returns the t-derivative of the same expression.
    """
    a = n / 2.0 - 1.0
    lam = np.atleast_1d(np.abs(np.asarray(lam, dtype=float)))
    N = node_count(np.max(lam) * t, t) if nodes is None else int(nodes)
    if N > MAX_NODES:
        raise QuadratureError(
            f"phi needs about {N} nodes at lam*t={np.max(lam) * t:.3g}; cap is {MAX_NODES}")
    x, w = gauss_jacobi(N, a, a)
    A = 0.5 * t * (1.0 + x)
    B = 0.5 * t * (1.0 - x)
    logG = _log_sinhc(A) + _log_sinhc(B) - np.log(2.0)
    logpref = (n - 1) * (np.log(t) - np.log(np.sinh(t))) if n != 1 else 0.0
    weight = w * np.exp(a * logG + logpref)
    arg = np.outer(lam, t * x)
    c = np.cos(arg)
    val = c @ weight
    if not derivative:
        return val
    dlogG = 0.5 * (1.0 + x) * _dlog_sinhc(A) + 0.5 * (1.0 - x) * _dlog_sinhc(B)
    dlogpref = (n - 1) * (1.0 / t - 1.0 / np.tanh(t))
    dval = c @ (weight * (a * dlogG + dlogpref)) - (lam[:, None] * np.sin(arg)) @ (weight * x)
    return val, dval


def _hc_coefficients(n, lam, tol, t):
    """Gamma_k(lam) until |Gamma_k| e^{-2kt} falls below tol."""
    rho = n / 2.0
    il = 1j * lam
    coefs = [np.ones_like(il)]
    acc = (il - rho) * coefs[0]
    decay = np.exp(-2.0 * t)
    k = 1
    while True:
        g = -n / (2.0 * k * (k - il)) * acc
        coefs.append(g)
        acc = acc + (il - rho - 2.0 * k) * g
        if np.max(np.abs(g)) * decay ** k < tol or k > 400:
            break
        k += 1
    return coefs


def _phi_hc(n, lam, t, derivative=False):
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    sign = np.sign(lam)
    lam = np.abs(lam)
    coefs = _hc_coefficients(n, lam, 1e-17, t)
    rho = n / 2.0
    il = 1j * lam
    Phi = np.zeros_like(il)
    dPhi = np.zeros_like(il)
    for k, g in enumerate(coefs):
        mu = il - rho - 2.0 * k
        term = g * np.exp(mu * t)
        Phi += term
        dPhi += mu * term
    c = harish_chandra_c(n, lam)
    val = 2.0 * np.real(c * Phi)
    if not derivative:
        return val
    return val, 2.0 * np.real(c * dPhi)


def _use_hc(lam, t):
    lam = np.abs(lam)
    return (t >= HC_T_MIN) & (lam >= HC_LAM_MIN) & (lam * t >= HC_LT_MIN)


def _phi_fixed_t(n, lam, t, derivative=False):
    lam = np.abs(np.atleast_1d(np.asarray(lam, dtype=float)))
    out = np.empty(lam.shape)
    dout = np.empty(lam.shape)
    if t == 0.0:
        out[:] = 1.0
        dout[:] = 0.0
        return (out, dout) if derivative else out
    hc = _use_hc(lam, t)
    Cn = phi_constant(n)
    if np.any(~hc):
        res = _x_integrals(n, lam[~hc], t, derivative=derivative)
        if derivative:
            out[~hc], dout[~hc] = Cn * res[0], Cn * res[1]
        else:
            out[~hc] = Cn * res
    if np.any(hc):
        res = _phi_hc(n, lam[hc], t, derivative=derivative)
        if derivative:
            out[hc], dout[hc] = res
        else:
            out[hc] = res
    return (out, dout) if derivative else out


def _broadcast_apply(fn, lam, t):
    lam_b, t_b = np.broadcast_arrays(np.asarray(lam, dtype=float), np.asarray(t, dtype=float))
    if np.any(t_b < 0):
        raise ValueError("t must be nonnegative")
    out = np.empty(lam_b.shape)
    flat_l, flat_t, flat_o = lam_b.ravel(), t_b.ravel(), out.reshape(-1)
    for tv in np.unique(flat_t):
        sel = flat_t == tv
        flat_o[sel] = fn(flat_l[sel], float(tv))
    return out if out.ndim else float(out)


def phi(n, lam, t):
    """Elementary spherical function phi_lam(t); broadcasts over lam and t."""
    return _broadcast_apply(lambda l, tv: _phi_fixed_t(n, l, tv), lam, t)


def phi_and_prime(n, lam, t):
    """(phi_lam(t), d/dt phi_lam(t)) for scalar t, array lam."""
    return _phi_fixed_t(n, lam, float(t), derivative=True)


def phi_prime_terms(n, lam, t):
    """The split d/dt phi = I_t + J_t with J_t = (1-n) coth t phi.

    For n >= 3, I_t = (n-1)/sinh t * phi^{(n-2)}_lam(t); for n = 1, 2 it is the
    t-derivative of the integral at fixed Jacobi weight.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    t = float(t)
    if t <= 0:
        raise ValueError("phi_prime needs t > 0")
    val, dval = phi_and_prime(n, lam, t)
    J = (1.0 - n) / np.tanh(t) * val
    if n >= 3:
        I = (n - 1.0) / np.sinh(t) * phi(n - 2, lam, t)
    else:
        I = dval - J
    return I, J


def phi_prime(n, lam, t):
    """d/dt phi_lam(t); broadcasts over lam and t."""
    def one(l, tv):
        I, J = phi_prime_terms(n, l, tv)
        return I + J
    return _broadcast_apply(one, lam, t)


# ---------------------------------------------------------------------------
# Leading asymptotics
# ---------------------------------------------------------------------------

def _check_regime(lam, t):
    lam = np.asarray(lam, dtype=float)
    if t <= 0 or np.any(lam < max(1.0, 1.0 / t)):
        raise ValueError("leading asymptotics need lam >= max(1, 1/t)")
    return lam


def phi_leading(n, lam, t):
    """Leading terms of phi and phi' for large lam.

    phi  ~  A_n (sinh t)^{-n/2} lam^{-n/2} cos(t lam - n pi/4)
    phi' ~ -A_n (sinh t)^{-n/2} lam^{1-n/2} sin(t lam - n pi/4)
    """
    lam = _check_regime(lam, t)
    A = leading_constant(n)
    amp = A * np.sinh(t) ** (-n / 2.0) * lam ** (-n / 2.0)
    theta = t * lam - n * np.pi / 4.0
    return amp * np.cos(theta), -amp * lam * np.sin(theta)


def reconstruction_coefficients(n):
    A = leading_constant(n)
    return np.cos(n * np.pi / 4.0) / A, np.sin(n * np.pi / 4.0) / A


def reconstruct_cos(n, lam, t):
    """c1 (sinh t)^{n/2} lam^{n/2} phi + c2 (sinh t)^{n/2} lam^{n/2-1} phi'.

    Equals cos(t lam) up to a remainder of order 1/lam.
    """
    lam = np.atleast_1d(_check_regime(lam, t))
    c1, c2 = reconstruction_coefficients(n)
    val, dval = phi_and_prime(n, lam, t)
    s = np.sinh(t) ** (n / 2.0)
    return c1 * s * lam ** (n / 2.0) * val + c2 * s * lam ** (n / 2.0 - 1.0) * dval


# ---------------------------------------------------------------------------
# Profiles and the spherical transform
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialProfile:
    """A function of r >= 0; ``support`` is (a, b) or None for decaying data up to r_max."""

    eval: Callable
    support: Optional[tuple] = None
    r_max: float = 30.0
    label: str = ""

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.asarray(self.eval(r))
        if self.support is not None:
            a, b = self.support
            out = np.where((r >= a) & (r <= b), out, 0.0)
        return out

    @property
    def interval(self):
        return self.support if self.support is not None else (0.0, self.r_max)


@dataclass(frozen=True)
class SpectralProfile:
    """A function of lam with |eval| <~ (1 + lam)^decay_order."""

    eval: Callable
    decay_order: float
    even: bool = True
    label: str = ""

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        return self.eval(np.abs(lam) if self.even else lam)

    def __add__(self, other):
        return SpectralProfile(lambda l: self.eval(l) + other.eval(l),
                               max(self.decay_order, other.decay_order), self.even and other.even)

    def scale(self, a):
        return SpectralProfile(lambda l: a * self.eval(l), self.decay_order, self.even)

    def multiply(self, m, order=0.0):
        """Product with a multiplier m(lam) of symbol order ``order``."""
        return SpectralProfile(lambda l: m(l) * self.eval(l), self.decay_order + order, self.even)


def radial_rule(a, b, lam_max, nodes=16, breaks=()):
    """Composite Gauss-Legendre rule in r resolving phi_lam(r) up to lam_max."""
    from .quadrature import composite_legendre
    width = min(0.5, 10.0 / max(lam_max, 1.0))
    pts = sorted({a, b} | {float(c) for c in breaks if a < c < b})
    out = []
    for lo, hi in zip(pts[:-1], pts[1:]):
        k = max(1, int(np.ceil((hi - lo) / width)))
        out.extend(np.linspace(lo, hi, k + 1)[:-1])
    out.append(b)
    return composite_legendre(np.asarray(out), nodes)


def spherical_transform(n, f, lam_max=200.0, nodes=16, breaks=(), decay_order=None):
    """F f(lam) = nu_n int_0^inf f(r) phi_lam(r) (sinh r)^n dr.

    The r-rule resolves phi_lam up to ``lam_max``; beyond that the returned
    profile is still evaluated but loses accuracy.  ``decay_order`` declares
    how fast the transform decays; the default -1 - n/2 fits data with jumps,
    and C^k data with a jump in the (k+1)-th derivative decay like lam^{-k-2-n/2}.
    """
    from .specfun import sphere_area
    a, b = f.interval
    r, w = radial_rule(a, b, lam_max, nodes, breaks)
    wf = sphere_area(n) * w * np.asarray(f(r)) * np.sinh(r) ** n
    keep = wf != 0
    r, wf = r[keep], wf[keep]

    def F(lam):
        lam = np.asarray(lam, dtype=float)
        flat = np.abs(lam).ravel()
        out = np.zeros(flat.shape, dtype=wf.dtype)
        for ri, wi in zip(r, wf):
            out += wi * _phi_fixed_t(n, flat, float(ri))
        return out.reshape(lam.shape)

    order = -n / 2.0 - 1.0 if decay_order is None else decay_order
    return SpectralProfile(F, order, True, f"transform[{f.label}]")


def lambda_rule(lam_max, r_scale, nodes=16, lam_min=0.0):
    """Composite Gauss-Legendre rule on [lam_min, lam_max] resolving cos(r_scale lam)."""
    from .quadrature import composite_legendre
    width = min(2.0, 10.0 / max(r_scale, 1e-3))
    k = max(1, int(np.ceil((lam_max - lam_min) / width)))
    return composite_legendre(np.linspace(lam_min, lam_max, k + 1), nodes)


def inverse_transform(n, F, lam_max=200.0, r_max=10.0, nodes=16, damping=False,
                      eta0=None, levels=5):
    """r -> K_n int_0^lam_max F(lam) phi_lam(r) |c(lam)|^{-2} dlam.

    Plain truncation requires F.decay_order < -n/2 - 1.  With ``damping``
    the integral is Abel-regularized: e^{-eta lam} damping over a geometric
    eta ladder and polynomial extrapolation to eta = 0.
    """
    from .quadrature import abel_limit
    from .specfun import inversion_constant, plancherel_density
    K = inversion_constant(n)
    if not damping:
        if F.decay_order >= -n / 2.0 - 1.0:
            raise ValueError(
                f"profile decays like lam^{F.decay_order}; truncation needs order < {-n / 2 - 1}"
                " (enable damping)")
        lam, w = lambda_rule(lam_max, r_max, nodes)
        wl = K * w * np.asarray(F(lam)) * plancherel_density(n, lam)

        def f(r):
            r = np.atleast_1d(np.asarray(r, dtype=float))
            return np.array([wl @ _phi_fixed_t(n, lam, float(ri)) for ri in r.ravel()]
                            ).reshape(r.shape)
        return RadialProfile(f, None, r_max, "inverse")

    eta0 = 20.0 / lam_max if eta0 is None else eta0
    lam_end = 45.0 / (eta0 / 2 ** (levels - 1))
    lam, w = lambda_rule(lam_end, r_max, nodes)
    base = K * w * np.asarray(F(lam)) * plancherel_density(n, lam)

    def f_damped(r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = []
        for ri in r.ravel():
            ph = _phi_fixed_t(n, lam, float(ri))
            res = abel_limit(lambda e: base @ (ph * np.exp(-e * lam)), eta0, levels, rtol=1e-5)
            out.append(res.value.real)
        return np.array(out).reshape(r.shape)

    return RadialProfile(f_damped, None, r_max, "inverse (Abel)")
