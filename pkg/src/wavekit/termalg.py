"""Closed-form bookkeeping for sums of s^a (sinh s)^{-b} (cosh s)^c (i lam)^m g^{(j)}(s).

Applying d/ds, multiplication by 1/sinh s, and D = -(1/sinh s) d/ds keeps
expressions in this span, so the operators appearing in inverse Abel
transforms and in (d/ds 1/sinh s)^l can be expanded exactly and evaluated
numerically only at the end.  g is an arbitrary function supplied through
its derivatives.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np

# key: (a, b, c, m, j)  ->  coefficient
_Key = tuple


class Terms:
    def __init__(self, terms=None):
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def g(cls):
        return cls({(0, 0, 0, 0, 0): 1.0})

    def deriv(self, oscillating=False, with_g=True):
        """d/ds; with ``oscillating`` the expression carries a factor e^{i lam s}.

        ``with_g=False`` treats g as the constant 1.
        """
        out = defaultdict(float)
        for (a, b, c, m, j), v in self.terms.items():
            if a:
                out[(a - 1, b, c, m, j)] += a * v
            if b:
                out[(a, b + 1, c + 1, m, j)] += -b * v
            if c:
                out[(a, b - 1, c - 1, m, j)] += c * v
            if with_g:
                out[(a, b, c, m, j + 1)] += v
            if oscillating:
                out[(a, b, c, m + 1, j)] += v
        return Terms(out)

    def over_sinh(self):
        return Terms({(a, b + 1, c, m, j): v for (a, b, c, m, j), v in self.terms.items()})

    def times_s(self):
        return Terms({(a + 1, b, c, m, j): v for (a, b, c, m, j), v in self.terms.items()})

    def scale(self, x):
        return Terms({k: x * v for k, v in self.terms.items()})

    def D(self):
        """-(1/sinh s) d/ds."""
        return self.deriv().over_sinh().scale(-1.0)

    def max_j(self):
        return max((k[4] for k in self.terms), default=0)

    def evaluate(self, s, g_derivs=None, lam=None):
        """Evaluate at s.  ``g_derivs[j]`` holds g^{(j)}(s); ``lam`` supplies i lam powers.

        With ``lam`` an array the result has shape (len(lam), len(s)).
        """
        s = np.asarray(s, dtype=float)
        sh, ch = np.sinh(s), np.cosh(s)
        total = 0.0
        for (a, b, c, m, j), v in self.terms.items():
            base = v * s ** a * sh ** (-b) * ch ** c
            if g_derivs is not None:
                base = base * g_derivs[j]
            elif j:
                continue  # g = 1: derivatives vanish
            if lam is not None:
                base = np.multiply.outer((1j * np.asarray(lam)) ** m, base)
            elif m:
                raise ValueError("term carries lam but none supplied")
            total = total + base
        return total


def operator_power(ell):
    """(d/ds . 1/sinh s)^ell applied to e^{i lam s}, as Terms times e^{i lam s}."""
    t = Terms({(0, 0, 0, 0, 0): 1.0})
    for _ in range(ell):
        t = t.over_sinh().deriv(oscillating=True, with_g=False)
    return t


def abel_inverse_terms(ell, extra_D=0):
    """-d/ds D^{ell+extra_D} g as Terms."""
    t = Terms.g()
    for _ in range(ell + extra_D):
        t = t.D()
    return t.deriv().scale(-1.0)
