"""Quadrature rules, panel builders, Abel regularization and power-law fits.

Everything in here is shared infrastructure: Gauss rules are cached per
(order, exponents), so repeated calls with the same node budget are cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special


class QuadratureError(RuntimeError):
    """Raised when a quadrature or extrapolation fails to converge."""


@lru_cache(maxsize=256)
def _jacobi_rule(n: int, alpha: float, beta: float):
    x, w = special.roots_jacobi(n, alpha, beta)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_jacobi(n, alpha=0.0, beta=0.0):
    """Nodes/weights on [-1, 1] for the weight (1-x)^alpha (1+x)^beta."""
    if alpha == 0.0 and beta == 0.0:
        return gauss_legendre(n)
    return _jacobi_rule(int(n), float(alpha), float(beta))


@lru_cache(maxsize=64)
def _legendre_rule(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n):
    return _legendre_rule(int(n))


def jacobi_on_interval(a, b, n, alpha=0.0, beta=0.0):
    """Gauss-Jacobi rule on [a, b] with weight (b-s)^alpha (s-a)^beta.

    The weight is *not* included in the returned weights' integrand; i.e.
    ``sum(w * f(s))`` approximates ``int_a^b (b-s)^alpha (s-a)^beta f(s) ds``.
    """
    x, w = gauss_jacobi(n, alpha, beta)
    half = 0.5 * (b - a)
    s = a + half * (x + 1.0)
    return s, w * half ** (1.0 + alpha + beta)


def composite_legendre(breaks, n=16):
    """Composite Gauss-Legendre rule on consecutive breakpoints."""
    breaks = np.asarray(breaks, dtype=float)
    x, w = gauss_legendre(n)
    a = breaks[:-1, None]
    h = (breaks[1:] - breaks[:-1])[:, None]
    nodes = a + 0.5 * h * (x + 1.0)
    weights = 0.5 * h * w
    return nodes.ravel(), weights.ravel()


def graded_breaks(a, b, h0, ratio=2.0):
    """Breakpoints on [a, b] growing geometrically from width h0 at ``a``."""
    if b <= a:
        return np.array([a, b])
    out = [a]
    h = h0
    while out[-1] + h < b:
        out.append(out[-1] + h)
        h *= ratio
    if b - out[-1] < 0.5 * (out[-1] - out[-2] if len(out) > 1 else h0) and len(out) > 1:
        out[-1] = b
    else:
        out.append(b)
    return np.asarray(out)


def oscillatory_breaks(omega, lam_end, lam_scale=1.0):
    """Breakpoints on [0, lam_end] for an integrand ~ cos(omega lam) g(lam).

    The first panel is [0, lam_scale] (or shorter when the oscillation is
    faster); panels then double in width until they reach half a period of
    the oscillation, which resolves power-law behaviour of g in between,
    and stay at half a period up to ``lam_end``.
    """
    omega = abs(float(omega))
    width = np.pi / max(omega, 1e-300)
    x = min(lam_scale, width, lam_end)
    pts = [0.0, x]
    while 2.0 * x < min(width, lam_end):
        x *= 2.0
        pts.append(x)
    if lam_end > pts[-1]:
        npan = int(np.ceil((lam_end - pts[-1]) / width))
        pts.extend(np.linspace(pts[-1], lam_end, npan + 1)[1:])
    return np.asarray(pts)


# ---------------------------------------------------------------------------
# Abel regularization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AbelResult:
    value: complex
    error: float
    etas: tuple
    samples: tuple


def neville_at_zero(h, y):
    """Polynomial extrapolation of samples y(h) to h = 0 (Neville).

    Returns the extrapolated value and the magnitude of the last correction,
    which serves as an error estimate.
    """
    h = np.asarray(h, dtype=float)
    p = np.array(y, dtype=complex)
    m = len(h)
    prev = last = p[0]
    for k in range(1, m):
        for i in range(m - k):
            p[i] = (h[i] * p[i + 1] - h[i + k] * p[i]) / (h[i] - h[i + k])
        prev, last = last, p[0]
    return p[0], float(abs(last - prev))


def abel_limit(damped, eta0, levels=6, ratio=2.0, rtol=1e-6, atol=0.0):
    """Abel-regularized value lim_{eta->0} damped(eta) by Richardson.

    ``damped(eta)`` must return the e^{-eta*lam}-damped integral; it is
    analytic in eta near zero for the oscillatory integrals used here, so
    polynomial extrapolation from a geometric eta ladder converges fast.
    """
    etas = eta0 / ratio ** np.arange(levels)
    samples = [complex(damped(e)) for e in etas]
    value, err = neville_at_zero(etas, samples)
    scale = max(abs(value), max(abs(s) for s in samples))
    if not np.isfinite(value) or err > max(rtol * scale, atol) * 1e3:
        raise QuadratureError(
            f"Abel extrapolation did not settle: estimate {value}, correction {err:.3g}")
    return AbelResult(value, err, tuple(etas), tuple(samples))


def damped_fourier(g, omega, eta, lam_scale=1.0, nodes=12, kind="cos", tail=45.0,
                   singular_power=0.0):
    """int_0^inf g(lam) e^{-eta lam} trig(omega lam) dlam by panel quadrature.

    The range is cut at tail/eta.  ``singular_power`` p > -1 declares
    g ~ lam^p at the origin: the first panel then uses a Gauss-Jacobi rule
    carrying lam^p, and g(lam)/lam^p is integrated against it.
    """
    lam_end = tail / eta
    breaks = np.asarray(oscillatory_breaks(omega, lam_end, lam_scale))
    total = 0.0
    if singular_power != 0.0:
        b0 = breaks[1]
        s, w = jacobi_on_interval(0.0, b0, nodes + 8, 0.0, singular_power)
        vals = g(s) / s ** singular_power
        total += np.sum(w * vals * np.exp(-eta * s) * _trig(kind, omega * s))
        breaks = breaks[1:]
    lam, w = composite_legendre(breaks, nodes)
    total += np.sum(w * g(lam) * np.exp(-eta * lam) * _trig(kind, omega * lam))
    return total


def _trig(kind, x):
    if kind == "cos":
        return np.cos(x)
    if kind == "sin":
        return np.sin(x)
    return np.exp(1j * x)


# ---------------------------------------------------------------------------
# Power-law fitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerFit:
    slope: float
    intercept: float
    halfwidth: float   # 95% half-width of the slope

    def __call__(self, x):
        return np.exp(self.intercept) * np.asarray(x) ** self.slope


def fit_power_law(x, y):
    """Least-squares fit of log|y| = intercept + slope * log x."""
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    keep = (x > 0) & (y > 0) & np.isfinite(y)
    lx, ly = np.log(x[keep]), np.log(y[keep])
    if lx.size < 2:
        raise ValueError("need at least two positive samples for a power-law fit")
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    half = 0.0
    if lx.size > 2:
        resid = ly - A @ coef
        s2 = resid @ resid / (lx.size - 2)
        cov = s2 * np.linalg.inv(A.T @ A)
        half = 1.96 * float(np.sqrt(cov[0, 0]))
    return PowerFit(float(coef[0]), float(coef[1]), half)
