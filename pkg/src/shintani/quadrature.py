"""Gauss-Legendre quadrature with high-precision nodes.

Nodes are seeded from numpy's float64 rule and Newton-polished in mpmath,
then cached per (n, dps).  Integrands may be complex valued; intervals are
finite (the analytic integrands in this package are truncated explicitly).
"""

import numpy as np
import mpmath
from mpmath import mp, mpf

_NODE_CACHE = {}


def _legendre_and_derivative(n, x):
    # P_n(x) and P_n'(x) by the three-term recurrence
    p0, p1 = mpf(1), x
    for k in range(1, n):
        p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
    dp = n * (x * p1 - p0) / (x * x - 1)
    return p1, dp


def gauss_legendre(n, dps=None):
    """Nodes and weights on [-1, 1] at dps working digits."""
    if dps is None:
        dps = mp.dps
    key = (n, dps)
    if key in _NODE_CACHE:
        return _NODE_CACHE[key]
    with mp.workdps(dps + 10):
        seeds, _ = np.polynomial.legendre.leggauss(n)
        nodes, weights = [], []
        for s in seeds:
            x = mpf(float(s))
            for _ in range(60):
                p, dp = _legendre_and_derivative(n, x)
                dx = p / dp
                x = x - dx
                if abs(dx) < mpf(10) ** (-dps - 5):
                    break
            _, dp = _legendre_and_derivative(n, x)
            nodes.append(x)
            weights.append(2 / ((1 - x * x) * dp * dp))
    _NODE_CACHE[key] = (nodes, weights)
    return nodes, weights


def integrate_gl(f, a, b, n=128):
    """Gauss-Legendre integral of f over [a, b] with n nodes."""
    a, b = mpf(a), mpf(b)
    nodes, weights = gauss_legendre(n)
    mid, half = (a + b) / 2, (b - a) / 2
    acc = 0
    for x, w in zip(nodes, weights):
        acc += w * f(mid + half * x)
    return half * acc


def integrate_gl_doubling(f, a, b, n0=64, tol=1e-20, nmax=2048):
    """Node-doubling Gauss-Legendre; returns (value, error_estimate, n_used).

    The error estimate is the change under the final doubling; failure to
    converge below tol raises.
    """
    n = n0
    prev = integrate_gl(f, a, b, n)
    while True:
        n *= 2
        cur = integrate_gl(f, a, b, n)
        err = abs(cur - prev)
        if err <= mpf(tol) * (1 + abs(cur)):
            return cur, err, n
        if n >= nmax:
            raise ArithmeticError(
                f"quadrature did not converge below {tol} with {n} nodes "
                f"(last change {float(err):.3e})")
        prev = cur
