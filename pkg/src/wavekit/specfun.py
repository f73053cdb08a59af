"""Special functions: complex Gamma, the Harish-Chandra c-function, cutoffs, symbols."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

# Lanczos approximation, g = 7, nine coefficients
_LANCZOS_G = 7.0
_LANCZOS_COEF = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


class PoleError(ValueError):
    """Gamma evaluated at a non-positive integer."""


def _check_poles(z):
    z = np.asarray(z, dtype=complex)
    bad = (z.imag == 0) & (z.real <= 0) & (np.round(z.real) == z.real)
    if np.any(bad):
        raise PoleError(f"Gamma has a pole at {z[bad].ravel()[0].real:g}")
    return z


def _log_gamma_right(z):
    # valid for Re z >= 1/2
    zm = z - 1.0
    x = np.full(zm.shape, _LANCZOS_COEF[0], dtype=complex)
    for k in range(1, len(_LANCZOS_COEF)):
        x = x + _LANCZOS_COEF[k] / (zm + k)
    t = zm + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (zm + 0.5) * np.log(t) - t + np.log(x)


def _log_sin_pi(z):
    """log(sin(pi z)) without overflow for large |Im z| (branch unspecified)."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    up = z.imag >= 0
    # sin(pi z) = (e^{i pi z} - e^{-i pi z}) / (2i); factor out the dominant exponential
    zu = z[up]
    out[up] = -1j * np.pi * zu + np.log((np.exp(2j * np.pi * zu) - 1.0) / 2j)
    zd = z[~up]
    out[~up] = 1j * np.pi * zd + np.log((1.0 - np.exp(-2j * np.pi * zd)) / 2j)
    return out


def log_gamma_complex(z):
    """log Gamma(z) for complex z (any branch; exp() of it is Gamma)."""
    z = _check_poles(z)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    right = z.real >= 0.5
    out[right] = _log_gamma_right(z[right])
    zl = z[~right]
    out[~right] = np.log(np.pi) - _log_sin_pi(zl) - _log_gamma_right(1.0 - zl)
    return out[0] if scalar else out


def gamma_complex(z):
    """Gamma(z), Lanczos with reflection for Re z < 1/2."""
    z = _check_poles(z)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    right = z.real >= 0.5
    out[right] = np.exp(_log_gamma_right(z[right]))
    zl = z[~right]
    out[~right] = np.pi / (np.sin(np.pi * zl) * np.exp(_log_gamma_right(1.0 - zl)))
    return out[0] if scalar else out


def sphere_area(n):
    """Surface area nu_n of the unit sphere S^n in R^{n+1}; nu_0 = 2."""
    from scipy.special import gamma
    return 2.0 * np.pi ** ((n + 1) / 2.0) / gamma((n + 1) / 2.0)


def _c_prefactor(n):
    from scipy.special import gamma
    return 2.0 ** (n - 1) * gamma((n + 1) / 2.0) / np.sqrt(np.pi)


def harish_chandra_c(n, lam):
    """c(lam) = 2^{n-1} Gamma((n+1)/2)/sqrt(pi) * Gamma(i lam)/Gamma(n/2 + i lam)."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam == 0):
        raise PoleError("c-function has a pole at lambda = 0")
    z = 1j * lam
    return _c_prefactor(n) * np.exp(log_gamma_complex(z) - log_gamma_complex(n / 2.0 + z))


def plancherel_density(n, lam):
    """|c(lam)|^{-2}, even in lam, continuously extended by 0 at lam = 0."""
    lam = np.abs(np.asarray(lam, dtype=float))
    scalar = lam.ndim == 0
    lam = np.atleast_1d(lam)
    out = np.zeros_like(lam)
    nz = lam > 0
    z = 1j * lam[nz]
    logratio = (log_gamma_complex(n / 2.0 + z) - log_gamma_complex(z)).real
    out[nz] = np.exp(2.0 * logratio) / _c_prefactor(n) ** 2
    return out[0] if scalar else out


def inversion_constant(n):
    """Constant K_n with f(r) = K_n int_0^inf Ff(lam) phi_lam(r) |c(lam)|^{-2} dlam.

    Matches the transform Ff = nu_n int f phi (sinh r)^n dr.
    """
    return 2.0 ** (n - 1) / (np.pi * sphere_area(n))


# ---------------------------------------------------------------------------
# Symbols and cutoffs
# ---------------------------------------------------------------------------

def _fd_weights(k):
    # central-difference stencils for derivatives of order k (second-order accurate)
    table = {
        1: ([-1, 1], [-0.5, 0.5]),
        2: ([-1, 0, 1], [1.0, -2.0, 1.0]),
        3: ([-2, -1, 1, 2], [-0.5, 1.0, -1.0, 0.5]),
        4: ([-2, -1, 0, 1, 2], [1.0, -4.0, 6.0, -4.0, 1.0]),
    }
    return table[k]


@dataclass(frozen=True)
class SpectralSymbol:
    """A function of lambda with declared symbol order.

    ``derivative(k, lam)`` uses ``analytic`` when supplied (a callable
    ``(k, lam) -> value``), otherwise central finite differences.
    ``fourier``, when known, is a callable ``(j, s) -> u^{(j)}(s)`` for
    u(s) = int_R m(lam) e^{i lam s} dlam at s > 0.
    """

    eval: Callable
    order: float
    max_derivative: int = 4
    analytic: Optional[Callable] = None
    even: bool = True
    label: str = ""
    fourier: Optional[Callable] = None

    def __call__(self, lam):
        return self.eval(np.asarray(lam, dtype=float))

    def fd_step(self, k, lam):
        """Step for the order-k difference at lam; balances truncation and roundoff."""
        return np.finfo(float).eps ** (1.0 / (k + 2)) * np.maximum(1.0, np.abs(lam))

    def derivative(self, k, lam, step=None):
        lam = np.asarray(lam, dtype=float)
        if k == 0:
            return self(lam)
        if self.analytic is not None:
            return self.analytic(k, lam)
        offs, wts = _fd_weights(k)
        out = np.zeros(lam.shape, dtype=complex if np.iscomplexobj(self(lam[:1])) else float)
        h = self.fd_step(k, lam) if step is None else step
        for o, w in zip(offs, wts):
            out = out + w * self(lam + o * h)
        return out / h ** k


@dataclass(frozen=True)
class SeminormReport:
    seminorms: tuple
    extended: tuple
    fd_flags: tuple
    member: bool
    grid: tuple = field(repr=False)


def default_symbol_grid(lo=1e-2, hi=1e4, num=200):
    pos = np.logspace(np.log10(lo), np.log10(hi), num)
    return np.concatenate([-pos[::-1], pos])


def symbol_seminorms(m, k_max, grid=None, growth_tol=0.1):
    """Seminorm estimates sup (1+lam^2)^{(k-sigma)/2} |m^{(k)}| for k <= k_max.

    Membership in S^sigma is declared when every seminorm is finite and
    grows by less than ``growth_tol`` (relative) when the grid is extended
    tenfold; this is a numerical verdict over the grid, not a proof.
    """
    if k_max > m.max_derivative:
        raise ValueError("k_max exceeds the symbol's declared max_derivative")
    grid = default_symbol_grid() if grid is None else np.asarray(grid, dtype=float)
    hi = np.max(np.abs(grid))
    ext = np.concatenate([grid, np.logspace(np.log10(hi), np.log10(hi) + 1, 40)[1:],
                          -np.logspace(np.log10(hi), np.log10(hi) + 1, 40)[1:]])
    sem, sem_ext, flags = [], [], []
    for k in range(k_max + 1):
        weight = lambda x: (1.0 + x ** 2) ** ((k - m.order) / 2.0)
        d = np.abs(m.derivative(k, grid))
        sem.append(float(np.max(weight(grid) * d)))
        sem_ext.append(float(np.max(weight(ext) * np.abs(m.derivative(k, ext)))))
        flag = False
        if k > 0 and m.analytic is None:
            h = m.fd_step(k, grid)
            d2 = np.abs(m.derivative(k, grid, step=2.0 * h))
            scale = np.max(weight(grid) * d) + 1e-300
            flag = bool(np.max(weight(grid) * np.abs(d2 - d)) > 0.01 * scale)
        flags.append(flag)
    finite = all(np.isfinite(s) for s in sem_ext)
    stable = all(e <= s * (1.0 + growth_tol) for s, e in zip(sem, sem_ext))
    return SeminormReport(tuple(sem), tuple(sem_ext), tuple(flags), finite and stable,
                          tuple(grid))


def _q(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    with np.errstate(over="ignore"):
        out[pos] = np.exp(-1.0 / s[pos])
    return out


def smoothstep(s):
    """C^infinity step: 0 for s <= 0, 1 for s >= 1."""
    a, b = _q(s), _q(1.0 - np.asarray(s, dtype=float))
    return a / (a + b)


@dataclass(frozen=True)
class CutoffSpec:
    inner: float
    outer: float
    orientation: str = "vanish-outside"   # or "vanish-inside"

    def __post_init__(self):
        if not 0 < self.inner < self.outer:
            raise ValueError("cutoff needs 0 < inner < outer")
        if self.orientation not in ("vanish-inside", "vanish-outside"):
            raise ValueError(f"unknown orientation {self.orientation!r}")


def make_cutoff(spec: CutoffSpec) -> SpectralSymbol:
    """Even smooth cutoff; order-0 symbol."""
    def eta(lam):
        s = (np.abs(lam) - spec.inner) / (spec.outer - spec.inner)
        h = smoothstep(s)
        return h if spec.orientation == "vanish-inside" else 1.0 - h
    return SpectralSymbol(eta, 0.0, label=f"cutoff[{spec.inner},{spec.outer}]:{spec.orientation}")


def bessel_potential_symbol(sigma, max_derivative=4):
    """m(lam) = (1 + lam^2)^{sigma/2} with analytic derivatives."""
    a = sigma / 2.0
    # m^{(k)} = P_k(lam) (1+lam^2)^{a-k},  P_{k+1} = P_k' (1+lam^2) + 2(a-k) lam P_k
    polys = [np.polynomial.Polynomial([1.0])]
    one_plus = np.polynomial.Polynomial([1.0, 0.0, 1.0])
    x = np.polynomial.Polynomial([0.0, 1.0])
    for k in range(max_derivative):
        p = polys[-1]
        polys.append(p.deriv() * one_plus + 2.0 * (a - k) * x * p)

    def analytic(k, lam):
        lam = np.asarray(lam, dtype=float)
        return polys[k](lam) * (1.0 + lam ** 2) ** (a - k)

    nu = -(sigma + 1.0) / 2.0
    scale = 2.0 * np.sqrt(np.pi) / gamma_real(-sigma / 2.0) * 2.0 ** (-nu)

    def fourier(j, s):
        # u = scale * B_nu(s),  B_mu(s) = s^mu K_mu(s),  B_mu' = -s B_{mu-1}
        terms = {(0, 0): 1.0}
        for _ in range(j):
            nxt = {}
            for (p, q), c in terms.items():
                if p:
                    nxt[(p - 1, q)] = nxt.get((p - 1, q), 0.0) + p * c
                nxt[(p + 1, q + 1)] = nxt.get((p + 1, q + 1), 0.0) - c
            terms = nxt
        s = np.asarray(s, dtype=float)
        return scale * sum(c * s ** p * _bessel_b(nu - q, s) for (p, q), c in terms.items())

    return SpectralSymbol(lambda lam: (1.0 + lam ** 2) ** a, sigma,
                          max_derivative, analytic, label=f"(1+l^2)^({sigma}/2)",
                          fourier=fourier)


def _bessel_b(mu, s):
    """s^mu K_mu(s) without overflow of the exponential factor."""
    from scipy.special import kve
    return s ** mu * kve(mu, s) * np.exp(-s)


def gamma_real(x):
    from scipy.special import gamma
    return float(gamma(x))


def gaussian_symbol(width=1.0, max_derivative=4):
    """m(lam) = exp(-(lam/width)^2); u(s) = sqrt(pi) width exp(-(width s/2)^2)."""
    from numpy.polynomial.hermite import Hermite

    def analytic(k, lam):
        lam = np.asarray(lam, dtype=float)
        x = lam / width
        # d^k/dx^k e^{-x^2} = (-1)^k H_k(x) e^{-x^2}
        return (-1) ** k * Hermite.basis(k)(x) * np.exp(-x ** 2) / width ** k

    def fourier(j, s):
        y = width * np.asarray(s, dtype=float) / 2.0
        return np.sqrt(np.pi) * width * (width / 2.0) ** j * (-1) ** j \
            * Hermite.basis(j)(y) * np.exp(-y ** 2)

    return SpectralSymbol(lambda lam: np.exp(-(np.asarray(lam) / width) ** 2), -50.0,
                          max_derivative, analytic, label=f"gauss({width})", fourier=fourier)
