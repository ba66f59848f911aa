r"""
q-expansions and concrete modular objects.

Exact integer/rational coefficients for the classical level-1 series
E4, E6, the discriminant cusp form, j and J = j - 744; the completed
weight-2 Eisenstein series E2*(z) = 1 - 24 sum sigma_1(n) q^n - 3/(pi y);
and a Fourier-data model for harmonic forms of integer weight kappa:

    G(z) = sum a+(n) e(nz)  +  a-(0) y^(1-kappa)
           + sum_{n != 0} a-(n) E_kappa(4 pi n y) e(nz),

with y^(1-kappa) read as log(y) when kappa = 1.  The antilinear operator
xi_kappa acts on the data by

    xi_kappa G = (1-kappa) conj(a-(0))
                 - sum_{n} (4 pi n)^(1-kappa) conj(a-(-n)) e(nz),

a weight 2-kappa q-series.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp, mpf, mpc

from .specfun import DEFAULT_PRECISION, e_kappa, _workdps
from .qforms import hurwitz_class_number, divisor_sigma1
from . import hyperbolic


# ---------------------------------------------------------------------------
# truncated q-series with exact coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QExpansion:
    weight: int
    coeffs: dict          # n -> coefficient (int / Fraction / mpf / mpc)
    order: int            # coefficients kept for n_min <= n <= order
    n_min: int = 0

    def coeff(self, n):
        return self.coeffs.get(n, 0)

    def to_json(self):
        def enc(v):
            if isinstance(v, Fraction):
                return str(v)
            if isinstance(v, int):
                return v
            return mpmath.nstr(v, 17)
        return {"weight": self.weight, "n_min": self.n_min, "order": self.order,
                "coeffs": {str(n): enc(v) for n, v in sorted(self.coeffs.items())}}


def _sigma(n, k):
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)


def _series_mul(A, B, order):
    out = [0] * (order + 1)
    for i, ai in enumerate(A):
        if ai == 0:
            continue
        for j in range(0, order + 1 - i):
            bj = B[j]
            if bj:
                out[i + j] += ai * bj
    return out


def _series_inv(A, order):
    # inverse of a power series with A[0] = 1, exact arithmetic
    assert A[0] == 1
    out = [0] * (order + 1)
    out[0] = 1
    for n in range(1, order + 1):
        s = 0
        for k in range(1, n + 1):
            if k < len(A) and A[k]:
                s += A[k] * out[n - k]
        out[n] = -s
    return out


def build_standard_forms(order=64):
    """E4, E6, the cusp form Delta, j and J = j - 744 to the given order."""
    if order < 2:
        raise ValueError("order must be >= 2")
    e4 = [1] + [240 * _sigma(n, 3) for n in range(1, order + 1)]
    e6 = [1] + [-504 * _sigma(n, 5) for n in range(1, order + 1)]
    e4_3 = _series_mul(_series_mul(e4, e4, order), e4, order)
    e6_2 = _series_mul(e6, e6, order)
    delta_full = [(x - y) for x, y in zip(e4_3, e6_2)]
    assert delta_full[0] == 0
    delta = [v // 1728 for v in delta_full[1:]]          # Delta / q
    assert all(x % 1728 == 0 for x in delta_full[1:])
    inv_delta = _series_inv(delta, order)                # q / Delta
    jser = _series_mul(e4_3, inv_delta, order)           # j * q
    forms = {
        "E4": QExpansion(4, {n: e4[n] for n in range(order + 1)}, order),
        "E6": QExpansion(6, {n: e6[n] for n in range(order + 1)}, order),
        "DeltaCusp": QExpansion(12, {n + 1: delta[n] for n in range(order)}, order),
        "j": QExpansion(0, {n - 1: jser[n] for n in range(order + 1)}, order - 1, n_min=-1),
    }
    jc = dict(forms["j"].coeffs)
    jc[0] = jc.get(0, 0) - 744
    forms["J"] = QExpansion(0, jc, order - 1, n_min=-1)
    return forms


class TailBoundError(ArithmeticError):
    pass


def eval_qexp(f, z, prec=DEFAULT_PRECISION):
    """Evaluate sum c_n e(nz); returns (value, tail_bound).

    The tail bound is geometric from the largest recent coefficient; an
    unusable bound (q too large for a series with a principal part)
    raises TailBoundError suggesting fundamental-domain reduction.
    """
    with _workdps(prec):
        z = mpc(z)
        if z.imag <= 0:
            raise ValueError("z must lie in the upper half-plane")
        q = mpmath.e ** (2j * mpmath.pi * z)
        absq = abs(q)
        acc = mpc(0)
        for n, cn in f.coeffs.items():
            if cn == 0:
                continue
            acc += _coerce(cn) * q ** n
        top = max((abs(_coerce(c)) for n, c in f.coeffs.items()
                   if n >= f.order - 5 and c != 0), default=mpf(0))
        # allow coefficient growth up to a factor 2 per index past the order
        ratio = 2 * absq
        if ratio >= 1:
            raise TailBoundError(
                "q-series tail does not converge at this height; "
                "reduce to the fundamental domain first")
        tail = top * 2 * absq ** (f.order + 1) / (1 - ratio)
        return acc, float(tail)


def _coerce(c):
    if isinstance(c, Fraction):
        return mpf(c.numerator) / c.denominator
    if isinstance(c, complex):
        return mpc(c)
    if isinstance(c, int):
        return mpf(c)
    return c


def eval_modular(f, z, prec=DEFAULT_PRECISION):
    """Evaluate a genuinely modular q-series after moving z into F."""
    zstar, gamma = hyperbolic.reduce_to_fundamental(z)
    val, tail = eval_qexp(f, zstar, prec)
    if f.weight:
        val = val * hyperbolic.moebius_j(gamma, z) ** (-f.weight)
    return val, tail


# ---------------------------------------------------------------------------
# harmonic Fourier data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HarmonicFourierData:
    kappa: int
    a_plus: dict = field(default_factory=dict)    # n -> complex
    a_minus: dict = field(default_factory=dict)   # n -> complex (0 allowed)
    order: int = 64
    label: str = ""

    def holomorphic_expansion(self):
        return QExpansion(self.kappa, dict(self.a_plus),
                          self.order, n_min=min(self.a_plus, default=0))


def eval_harmonic(G, z, prec=DEFAULT_PRECISION):
    """G+(z) + G-(z) from the Fourier data, E_kappa-based."""
    with _workdps(prec):
        z = mpc(z)
        y = z.imag
        if y <= 0:
            raise ValueError("z must lie in the upper half-plane")
        e = lambda n: mpmath.e ** (2j * mpmath.pi * n * z)
        acc = mpc(0)
        for n, c in G.a_plus.items():
            if c:
                acc += _coerce(c) * e(n)
        for n, c in G.a_minus.items():
            if not c:
                continue
            if n == 0:
                if G.kappa == 1:
                    acc += _coerce(c) * mpmath.log(y)
                else:
                    acc += _coerce(c) * y ** (1 - G.kappa)
            else:
                acc += _coerce(c) * e_kappa(G.kappa, 4 * mpmath.pi * n * y, prec).value * e(n)
        return acc


def xi_symbolic(G, prec=DEFAULT_PRECISION):
    """xi_kappa G as a weight (2 - kappa) q-series over the data's support."""
    with _workdps(prec):
        coeffs = {}
        zero = G.a_minus.get(0, 0)
        coeffs[0] = (1 - G.kappa) * _conj(zero)
        for m, c in G.a_minus.items():
            if m == 0 or not c:
                continue
            n = -m
            val = -(4 * mpmath.pi * n) ** (1 - G.kappa) * _conj(c)
            coeffs[n] = coeffs.get(n, 0) + val
        ns = [n for n in coeffs if coeffs[n] != 0] or [0]
        return QExpansion(2 - G.kappa, coeffs, max(ns), n_min=min(ns))


def _conj(c):
    if isinstance(c, (int, float, Fraction)):
        return c
    return mpmath.conj(_coerce(c))


# ---------------------------------------------------------------------------
# Eisenstein objects
# ---------------------------------------------------------------------------

def e2_star_data(order=64, prec=DEFAULT_PRECISION):
    """Fourier data of the completed weight-2 Eisenstein series."""
    a_plus = {0: 1}
    for n in range(1, order + 1):
        a_plus[n] = -24 * divisor_sigma1(n)
    with _workdps(prec):
        am0 = mpf(-3) / mpmath.pi
    return HarmonicFourierData(2, a_plus, {0: am0}, order, label="E2*")


def e2_star(z, order=64, prec=DEFAULT_PRECISION):
    """E2*(z) = 1 - 24 sum sigma_1(n) q^n - 3/(pi y), directly."""
    with _workdps(prec):
        z = mpc(z)
        q = mpmath.e ** (2j * mpmath.pi * z)
        acc = mpc(1)
        qn = mpc(1)
        for n in range(1, order + 1):
            qn *= q
            acc -= 24 * divisor_sigma1(n) * qn
        return acc - 3 / (mpmath.pi * z.imag)


def e2_star_modular(z, order=64, prec=DEFAULT_PRECISION):
    """E2* evaluated through the fundamental domain (weight-2 cocycle)."""
    zstar, gamma = hyperbolic.reduce_to_fundamental(z)
    return e2_star(zstar, order, prec) * hyperbolic.moebius_j(gamma, z) ** (-2)


def e32_star_coeffs(D_max, prec=DEFAULT_PRECISION):
    """Holomorphic coefficients H(D) of the weight-3/2 Eisenstein series,
    plus an evaluator (n, v) -> (1/16 pi) v^(-1/2) beta_{3/2}(4 pi n^2 v)
    for the non-holomorphic part."""
    if D_max < 0:
        raise ValueError("D_max must be >= 0")
    holo = {D: hurwitz_class_number(D) for D in range(D_max + 1)}

    def nonholo(n, v):
        from .specfun import beta_fns
        with _workdps(prec):
            vv = mpf(v)
            b = beta_fns(0, 4 * mpmath.pi * n * n * vv, "tail", prec).value
            return b / (16 * mpmath.pi * mpmath.sqrt(vv))

    return holo, nonholo
