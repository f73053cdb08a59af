"""Verification suites: library calls assembled into reports with pass/fail verdicts.

Each suite returns a list of :class:`~wavekit.report.ExperimentReport`.  The
command-line driver runs them, and the acceptance tests call the same
functions.
"""

from __future__ import annotations

import numpy as np

from . import geometry as geo
from .experiments import sharpness as sh
from .experiments import wave
from .multiplier import (abel_kappa, f_r, kernel_consistency_check, kernel_derivative_decay,
                         kernel_kappa, oscillatory_decay_check)
from .quadrature import fit_power_law
from .report import ExperimentReport
from .specfun import bessel_potential_symbol, gaussian_symbol, plancherel_density
from .spherical import (RadialProfile, displayed_leading_constant, inverse_transform,
                        leading_constant, phi, phi_leading, phi_prime, reconstruct_cos,
                        spherical_transform)


# ---------------------------------------------------------------------------
# geometry
# ---------------------------------------------------------------------------

def _random_elements(rng, n, size):
    x = np.exp(rng.uniform(-3.0, 3.0, size))
    y = rng.normal(0.0, 3.0, (size, n))
    return [geo.GroupElement(n, xi, yi) for xi, yi in zip(x, y)]


def _rel(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


def group_axioms(n, samples=10_000, seed=0, tol=1e-12):
    """Associativity, inverses, identity, delta homomorphism and left-invariance of dist."""
    rng = np.random.default_rng(seed)
    g, h, k = (_random_elements(rng, n, samples) for _ in range(3))
    e = geo.GroupElement.identity(n)
    assoc = inv = ident = hom = linv = 0.0
    for a, b, c in zip(g, h, k):
        lhs = geo.multiply(geo.multiply(a, b), c)
        rhs = geo.multiply(a, geo.multiply(b, c))
        assoc = max(assoc, _rel([lhs.x, *lhs.y], [rhs.x, *rhs.y]))
        ai = geo.multiply(a, geo.inverse(a))
        inv = max(inv, _rel([ai.x, *ai.y], [1.0, *[0.0] * n]))
        ae = geo.multiply(a, e)
        ident = max(ident, _rel([ae.x, *ae.y], [a.x, *a.y]))
        d = geo.modular(a) * geo.modular(b)
        hom = max(hom, abs(geo.modular(geo.multiply(a, b)) - d) / d)
        d0 = geo.dist(b, c)
        d1 = geo.dist(geo.multiply(a, b), geo.multiply(a, c))
        linv = max(linv, abs(d1 - d0) / max(1.0, d0))
    rep = ExperimentReport(f"group_axioms_n{n}", {"n": n, "samples": samples, "seed": seed})
    rep.add_verdict("associativity (relative)", assoc, tol)
    rep.add_verdict("g g^-1 = e (relative)", inv, tol)
    rep.add_verdict("g e = g (relative)", ident, tol)
    rep.add_verdict("delta homomorphism (relative)", hom, tol)
    # dist goes through arcosh, which loses digits near the diagonal
    rep.add_verdict("left-invariance of dist", linv, 1e-9)
    return rep


def cz_examples():
    R = geo.CZSet(1.0, 1.0, (0.0,), np.e ** 3)
    rep = ExperimentReport("cz_sets", {"x": 1.0, "s": 1.0, "ell": np.e ** 3})
    rep.add_verdict("admissible (violations)", len(geo.cz_violations(R)), 0, "<=")
    rep.add_verdict("|measure - 2 e^3|", abs(geo.cz_measure(R) - 2 * np.e ** 3), 1e-12)
    kids = geo.cz_split(R)
    rep.add_verdict("split: |sum of children - parent| / parent",
                    abs(sum(geo.cz_measure(c) for c in kids) / geo.cz_measure(R) - 1.0), 1e-12)
    return rep


def geometry_suite(dims=(1, 2, 3), seed=0, samples=10_000, tol=0.05, nodes=64):
    reps = [group_axioms(n, samples, seed) for n in dims]
    reps += [geo.verify_lemma21(n, nodes=nodes, stability=tol) for n in dims]
    reps += [geo.verify_lemma22(n, nodes=nodes, stability=tol) for n in dims]
    reps.append(cz_examples())
    return reps


# ---------------------------------------------------------------------------
# spherical functions
# ---------------------------------------------------------------------------

def closed_form_n2(lam_max=50.0, points=20, tol=1e-8):
    """phi against sin(lam t)/(lam sinh t) on a (lam, t) grid.

    The error is measured relative to the amplitude envelope
    t/sinh t * min(1, 1/(lam t)) so that zeros of the sine do not
    inflate it.
    """
    lam = np.geomspace(0.1, lam_max, points)
    t = np.geomspace(0.01, 10.0, points)
    L, T = np.meshgrid(lam, t, indexing="ij")
    got = np.array([phi(2, lam, ti) for ti in t]).T
    exact = np.sin(L * T) / (L * np.sinh(T))
    env = T / np.sinh(T) * np.minimum(1.0, 1.0 / (L * T))
    err = np.abs(got - exact) / env
    rep = ExperimentReport("phi_closed_form_n2", {"lambda_max": lam_max, "grid": f"{points}x{points}"})
    rep.add_column("lambda", L.ravel())
    rep.add_column("t", T.ravel())
    rep.add_column("rel_error", err.ravel())
    rep.add_verdict("max relative error of phi (n=2 closed form)", float(np.max(err)), tol)
    return rep


def normalization(dims=(1, 2, 3), tol=1e-6):
    rep = ExperimentReport("phi_normalization", {"t": 1e-9})
    worst = 0.0
    for n in dims:
        worst = max(worst, float(np.max(np.abs(phi(n, np.array([0.0, 1.0, 10.0]), 1e-9) - 1.0))))
    rep.add_verdict("max |phi_lam(0+) - 1|", worst, tol)
    return rep


def plancherel_checks(dims=(1, 2, 3), tol=0.02):
    lam = np.geomspace(0.1, 100.0, 50)
    rep = ExperimentReport("plancherel_density")
    rep.add_verdict("n=2: max |c|^-2 / lam^2 - 1", float(np.max(np.abs(plancherel_density(2, lam) / lam ** 2 - 1))),
                    1e-10)
    big = np.geomspace(1e2, 1e4, 30)
    for n in dims:
        fit = fit_power_law(big, plancherel_density(n, big))
        rep.add_verdict(f"n={n}: |large-lam exponent - n|", abs(fit.slope - n), tol)
    return rep


def _envelope(fn, lam, t):
    """sqrt(f(lam)^2 + f(lam + pi/(2t))^2): removes the oscillation before fitting."""
    a, b = fn(lam), fn(lam + np.pi / (2.0 * t))
    return np.sqrt(a ** 2 + b ** 2)


def asymptotic_orders(n, t=2.0, lam_range=(10.0, 200.0), tol=0.15):
    """Remainder orders of phi and phi' beyond their leading terms."""
    lam = np.geomspace(*lam_range, 40)
    r0 = _envelope(lambda l: phi(n, l, t) - phi_leading(n, l, t)[0], lam, t)
    r1 = _envelope(lambda l: phi_prime(n, l, t) - phi_leading(n, l, t)[1], lam, t)
    rep = ExperimentReport(f"phi_asymptotics_n{n}",
                           {"n": n, "t": t, "A_n": leading_constant(n),
                            "displayed constant": displayed_leading_constant(n)})
    rep.add_column("lambda", lam)
    rep.add_column("phi_remainder", r0)
    rep.add_column("dphi_remainder", r1)
    if np.max(r0) <= 1e-12:
        # for n = 2 the leading term is exact
        rep.notes.append("phi remainder vanishes identically (leading term exact)")
        rep.add_verdict("max phi remainder", float(np.max(r0)), 1e-12)
    else:
        fit = fit_power_law(lam, r0)
        rep.add_fit("phi_remainder", fit, x="lambda")
        rep.add_verdict("|phi remainder slope + (1 + n/2)|", abs(fit.slope + 1.0 + n / 2.0), tol)
    fit = fit_power_law(lam, r1)
    rep.add_fit("dphi_remainder", fit, x="lambda")
    rep.add_verdict("|phi' remainder slope + n/2|", abs(fit.slope + n / 2.0), tol)
    if n == 2:
        # the exact n=2 amplitude 1/(lam sinh t) fixes the constant
        rep.params["n=2 ratio exact/A_n"] = 1.0 / leading_constant(2)
        rep.params["n=2 ratio exact/displayed"] = 1.0 / displayed_leading_constant(2)
        rep.add_verdict("n=2: |exact amplitude / A_n - 1|", abs(1.0 / leading_constant(2) - 1.0), 1e-12)
    return rep


def reconstruction(n, t, lam_range=(20.0, 400.0), threshold=-0.85):
    lam = np.geomspace(*lam_range, 40)
    err = _envelope(lambda l: reconstruct_cos(n, l, t) - np.cos(t * l), lam, t)
    fit = fit_power_law(lam, err)
    rep = ExperimentReport(f"reconstruction_n{n}_t{t:g}", {"n": n, "t": t})
    rep.add_column("lambda", lam)
    rep.add_column("error", err)
    rep.add_fit("error", fit, x="lambda")
    rep.add_verdict("fitted lam-slope of |reconstruction - cos|", fit.slope, threshold)
    return rep


def c2_bump(center=1.0, half=0.5):
    return RadialProfile(lambda r: (1.0 - ((np.asarray(r) - center) / half) ** 2) ** 3,
                         (center - half, center + half), label="C2 bump")


def round_trip(n, lam_max=200.0, tol=1e-4):
    f = c2_bump()
    F = spherical_transform(n, f, lam_max, decay_order=-4.0 - n / 2.0)
    g = inverse_transform(n, F, lam_max, r_max=2.0)
    r = np.linspace(0.05, 2.0, 60)
    err = np.abs(g(r) - f(r))
    rep = ExperimentReport(f"round_trip_n{n}", {"n": n, "lambda_max": lam_max})
    rep.add_column("r", r)
    rep.add_column("error", err)
    rep.add_verdict("sup relative round-trip error", float(np.max(err) / np.max(np.abs(f(r)))), tol)
    return rep


def spherical_suite(dims=(1, 2, 3), lam_max=50.0, tol=0.15):
    """``lam_max`` sets the closed-form grid; the round trip always uses 200."""
    reps = [closed_form_n2(lam_max), normalization(dims), plancherel_checks(dims)]
    reps += [asymptotic_orders(n, tol=tol) for n in dims]
    reps += [reconstruction(n, t) for n in dims for t in (0.5, 2.0)]
    reps += [round_trip(n, 200.0) for n in dims]
    return reps


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

def gaussian_kernel_n2(tol=1e-8):
    """kappa for exp(-lam^2), n = 2, against its closed form, by both routes."""
    g = gaussian_symbol(1.0)
    r = np.array([0.3, 1.0, 2.5])
    exact = np.sqrt(np.pi) / 4.0 * r * np.exp(-r ** 2 / 4.0) / np.sinh(r)
    rep = ExperimentReport("kernel_gaussian_n2")
    rep.add_column("r", r)
    rep.add_column("kappa", exact)
    rep.add_verdict("spectral route vs closed form", _rel(kernel_kappa(2, g, r, 10.0), exact), tol)
    rep.add_verdict("Abel route vs closed form", _rel(abel_kappa(2, g, r), exact), tol)
    return rep


def f_r_checks(n=2, lam=5.0):
    rep = ExperimentReport(f"f_r_n{n}", {"n": n, "lambda": lam})
    big = np.linspace(2.0, 10.0, 9)
    env = np.array([abs(f_r(n, ri, lam)[0]) * np.exp(n * ri / 2.0) for ri in big])
    rep.add_column("r_large", big)
    rep.add_column("F_env", env)
    rep.add_verdict("sup |F_r| e^(nr/2) on [2,10]", float(np.max(env)), np.inf, "<")
    small = np.geomspace(0.01, 0.5, 12)
    v = np.array([abs(f_r(n, ri, lam)[0]) for ri in small])
    fit = fit_power_law(small, v)
    rep.add_column("r_small", small)
    rep.add_column("F_small", v)
    rep.add_fit("F_small", fit, x="r_small")
    rep.add_verdict("small-r exponent >= -1.15", fit.slope, -1.15, ">=")
    rep.add_verdict("small-r exponent <= -0.85", fit.slope, -0.85, "<=")
    lams = np.geomspace(5.0, 200.0, 30)
    fl = fit_power_law(lams, np.abs(f_r(n, 2.0, lams)))
    rep.add_column("lambda", lams)
    rep.add_verdict("lam-slope at r=2", fl.slope, -(n / 2.0 - 1.0) + 0.15)
    return rep


def kernel_suite(dims=(1, 2), tol=1e-3):
    reps = [gaussian_kernel_n2(), f_r_checks()]
    for n in dims:
        reps.append(kernel_consistency_check(n, gaussian_symbol(1.0), bessel_potential_symbol(-(n + 3)),
                                             np.linspace(0.5, 3.0, 11), tol=tol))
    for sigma in (-0.75, -0.5, -0.25):
        rep = oscillatory_decay_check(bessel_potential_symbol(sigma))
        rep.name = f"oscillatory_decay_sigma{sigma:g}"
        reps.append(rep)
    reps += [kernel_derivative_decay(n, bessel_potential_symbol(-1.0)) for n in dims]
    return reps


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def default_family(jmax=6):
    return [wave.bump(2.0 ** -j) for j in range(jmax + 1)]


def wave_suite(n=1, p=4.0, alpha0=None, alpha1=None, t_grid=None, jmax=6):
    t_grid = np.array([1, 2, 4, 6, 8, 12, 16, 20.0]) if t_grid is None else np.asarray(t_grid)
    alpha0 = n * abs(1.0 / p - 0.5) if alpha0 is None else alpha0
    alpha1 = n * abs(1.0 / p - 0.5) - 1.0 if alpha1 is None else alpha1
    fam = default_family(jmax)
    return [wave.growth_experiment(n, p, alpha0, fam, t_grid, "f"),
            wave.growth_experiment(n, p, alpha1, fam, t_grid, "g"),
            wave.growth_experiment(n, 2.0, 0.0, fam, t_grid, "f")]


def norm_scaling(n=1, t=2.0, eps=None, tol=0.05):
    eps = 2.0 ** -np.arange(4, 10) if eps is None else np.asarray(eps)
    p = 4.0 * n
    norms = np.array([sh.annulus_norm(n, p, t + e, t + 3 * e) for e in eps])
    fit = fit_power_law(eps, norms)
    rep = ExperimentReport(f"annulus_norm_n{n}", {"n": n, "p": p, "t": t})
    rep.add_column("eps", eps)
    rep.add_column("norm", norms)
    rep.add_fit("norm", fit, x="eps")
    rep.add_verdict("|eps-slope - 1/p|", abs(fit.slope - 1.0 / p), tol)
    return rep


def model_integrals(gammas=(1 / 8, 3 / 16, 1 / 4, 5 / 16, 3 / 8), radii=(0.5, 1.0, 2.0, 3.0),
                    tol=1e-6):
    rep = ExperimentReport("model_integral")
    rows = {"gamma": [], "R": [], "cos_rel_dev": [], "sin_rel_dev": []}
    for g in gammas:
        for R in radii:
            rows["gamma"].append(g)
            rows["R"].append(R)
            rows["cos_rel_dev"].append(sh.model_integral(g, R, "cos").rel_dev)
            rows["sin_rel_dev"].append(sh.model_integral(g, R, "sin").rel_dev)
    for k, v in rows.items():
        rep.add_column(k, v)
    rep.add_verdict("max relative deviation (cos)", max(rows["cos_rel_dev"]), tol)
    rep.add_verdict("max relative deviation (sin)", max(rows["sin_rel_dev"]), tol)
    return rep


def sharpness_suite(n=1, p=None, t=2.0, alpha0=None, eps_grid=None, tol=0.05):
    """Norm scaling, model integrals, kernel expansion and blow-up slopes.

    With ``alpha0`` given only that blow-up exponent is run; otherwise the
    three values endpoint - 0.1, endpoint, endpoint + 0.1.
    """
    p = 4.0 * n if p is None else p
    endpoint = n * abs(1.0 / p - 0.5)
    eps = 2.0 ** -np.arange(12, 6, -1) if eps_grid is None else np.asarray(eps_grid)
    reps = [norm_scaling(n, t), model_integrals()]
    reps += [sh.kappa_t_expansion(1, t, 0.25), sh.kappa_t_expansion(2, t, 0.8)]
    alphas = [endpoint - 0.1, endpoint, endpoint + 0.1] if alpha0 is None else [alpha0]
    for a in alphas:
        spec = sh.SharpnessFamily(n, t, float(eps[0]), float(a), p)
        reps.append(sh.blowup_measure(spec, eps, tol=tol))
    return reps


SUITES = {
    "verify-geometry": geometry_suite,
    "verify-spherical": spherical_suite,
    "verify-kernels": kernel_suite,
    "wave-growth": wave_suite,
    "sharpness": sharpness_suite,
}
