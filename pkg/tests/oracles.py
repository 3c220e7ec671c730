"""Independent reference computations used by the tests.

Nothing here calls the package: Legendre polynomials come from Rodrigues'
formula in exact rational arithmetic, integrals from a Gauss-Legendre rule
computed at 40 significant digits.
"""
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import mpmath as mp

DPS = 40


@lru_cache(maxsize=None)
def rodrigues(n):
    """Power-basis coefficients of the classical Legendre polynomial l_n."""
    c = [Fraction(0)] * (2 * n + 1)
    for k in range(n + 1):
        c[2 * k] = Fraction(comb(n, k) * (-1) ** (n - k))
    for _ in range(n):
        c = [c[i] * i for i in range(1, len(c))]
    scale = Fraction(1, 2**n * factorial(n))
    return tuple(v * scale for v in c)


def derivative(c):
    return tuple(c[i] * i for i in range(1, len(c))) or (Fraction(0),)


def polyval(c, x):
    r = mp.mpf(0)
    for v in reversed(c):
        r = r * x + mp.mpf(v.numerator) / v.denominator
    return r


@lru_cache(maxsize=None)
def gauss_rule(n=24):
    """Gauss-Legendre nodes/weights for the uniform density on [-1, 1]."""
    with mp.workdps(DPS):
        p = rodrigues(n)
        roots = mp.polyroots([mp.mpf(v.numerator) / v.denominator for v in reversed(p)],
                             maxsteps=200, extraprec=200)
        dp = derivative(p)
        nodes = [mp.re(r) for r in roots]
        weights = [1 / ((1 - x**2) * polyval(dp, x) ** 2) for x in nodes]
    return nodes, weights


def expect(f_a, f_b, n_nodes=24):
    """E[f_a(xi) f_b(xi)] for two polynomial coefficient tuples."""
    nodes, weights = gauss_rule(n_nodes)
    with mp.workdps(DPS):
        return sum(w * polyval(f_a, x) * polyval(f_b, x) for x, w in zip(nodes, weights))


def dphi_phi_oracle(a, b):
    with mp.workdps(DPS):
        return float(mp.sqrt((2 * a + 1) * (2 * b + 1)) * expect(derivative(rodrigues(a)), rodrigues(b)))


def dphi_dphi_oracle(a, b):
    with mp.workdps(DPS):
        return float(mp.sqrt((2 * a + 1) * (2 * b + 1)) * expect(derivative(rodrigues(a)), derivative(rodrigues(b))))


def uniform_moment(powers):
    """E[prod xi_i^k_i] for xi ~ U(-1, 1)^d."""
    out = 1.0
    for k in powers:
        out *= 0.0 if k % 2 else 1.0 / (k + 1)
    return out
