r"""
Upper half-plane geometry attached to a binary quadratic form.

For z = x + iy with y > 0 and a form Q = (a, b, c):

    p_z(Q)  = -(a|z|^2 + b x + c)/y        (vanishes exactly on the geodesic)
    Q_z     = a z^2 + b z + c              (vanishes exactly at the CM point)
    r(Q, z) = |Q_z|^2 / y^2 = p_z(Q)^2 + disc(Q)

A positive definite form has the CM point z_Q = (-b + i sqrt(|disc|))/(2a);
an indefinite form has the oriented geodesic a|z|^2 + bx + c = 0 (semicircle
from (-b - sqrt(disc))/2a to (-b + sqrt(disc))/2a when a != 0, a vertical
line when a = 0, upward iff b > 0).

The SL_2(Z) action: gamma acts on points by fractional linear maps and on
forms by gamma . Q = Q o gamma^{-1}, so that p_{gamma z}(gamma . Q) = p_z(Q)
and z_{gamma . Q} = gamma z_Q.
"""

from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf, mpc

from .qforms import QForm, mat_inv


def form_polynomials(Q, z):
    """(p, qz, r) at z; r - p^2 = disc(Q) identically."""
    z = mpc(z)
    x, y = z.real, z.imag
    if y <= 0:
        raise ValueError("z must lie in the upper half-plane")
    p = -(Q.a * (x * x + y * y) + Q.b * x + Q.c) / y
    qz = Q.a * z * z + Q.b * z + Q.c
    r = abs(qz) ** 2 / (y * y)
    return p, qz, r


@dataclass(frozen=True)
class CMPoint:
    z: object
    source: QForm


def cm_point(Q):
    """CM point of a positive definite form: the root of Q(z, 1) in H."""
    if Q.disc >= 0:
        raise ValueError("cm_point requires disc < 0")
    if Q.a <= 0:
        raise ValueError("cm_point requires a positive definite form (a > 0)")
    z = mpc(-Q.b, mpmath.sqrt(-Q.disc)) / (2 * Q.a)
    return CMPoint(z, Q)


@dataclass(frozen=True)
class Geodesic:
    source: QForm
    kind: str            # "semicircle" | "vertical"
    start: object = None
    end: object = None
    x0: object = None
    upward: bool = None

    @property
    def center(self):
        return (self.start + self.end) / 2

    @property
    def radius(self):
        return abs(self.end - self.start) / 2


def geodesic_of(Q):
    """Oriented geodesic of an indefinite form."""
    D = Q.disc
    if D <= 0:
        raise ValueError("geodesic_of requires disc > 0")
    if Q.a != 0:
        s = mpmath.sqrt(D)
        start = (-Q.b - s) / (2 * Q.a)
        end = (-Q.b + s) / (2 * Q.a)
        return Geodesic(Q, "semicircle", start=start, end=end)
    x0 = mpf(-Q.c) / Q.b
    return Geodesic(Q, "vertical", x0=x0, upward=Q.b > 0)


def apply_moebius(gamma, z):
    """Fractional linear action of an integer matrix with det 1."""
    (a, b), (c, d) = gamma
    if a * d - b * c != 1:
        raise ValueError("apply_moebius expects det 1")
    z = mpc(z)
    return (a * z + b) / (c * z + d)


def act_on_form(gamma, Q):
    """gamma . Q = Q o gamma^{-1} (discriminant preserved)."""
    return Q.compose(mat_inv(gamma))


def moebius_j(gamma, z):
    """Automorphy factor j(gamma, z) = cz + d."""
    (_, _), (c, d) = gamma
    return c * mpc(z) + d


def reduce_to_fundamental(z, max_steps=10000):
    """Move z into F = {|x| <= 1/2, |z| >= 1} by T/S words.

    Returns (z', gamma) with gamma z = z'.  Boundary ties go to x = -1/2
    and, on |z| = 1, to Re(z) <= 0.
    """
    z = mpc(z)
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half-plane")
    g = ((1, 0), (0, 1))
    S = ((0, -1), (1, 0))
    eps = mpf(10) ** (-(mp.dps - 5))
    for _ in range(max_steps):
        n = int(mpmath.floor(z.real + mpf(1) / 2))
        # keep x = +1/2 ties on the -1/2 side
        if z.real - n > mpf(1) / 2 - eps:
            n += 1
        if n:
            T = ((1, -n), (0, 1))
            z = z - n
            g = _mat_mul(T, g)
        r2 = abs(z) ** 2
        if r2 < 1 - eps or (r2 < 1 + eps and z.real > eps):
            # inside the unit circle, or on it with Re(z) > 0
            z = -1 / z
            g = _mat_mul(S, g)
            continue
        return z, g
    raise ArithmeticError("fundamental-domain reduction did not terminate")


def _mat_mul(M, N):
    (a, b), (c, d) = M
    (e, f), (g, h) = N
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))
