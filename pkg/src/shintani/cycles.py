r"""
Geodesic cycle integrals: closed ones by quadrature, infinite ones (square
discriminant) by regularization, and the twisted traces built from them.

Closed case (disc > 0 non-square).  The geodesic of Q is a semicircle; the
stabilizer is generated by the fundamental automorph, and the cycle integral
is int over one automorph period of G(z) Q(z,1)^k dz along the oriented arc.

Regularized case (disc = f^2).  Normalize Q to (0, f, c); the geodesic is
the vertical line Re(z) = r with r = -c/f, an infinite geodesic running
between two cusps.  With ray data (r, c0, T) and Fourier coefficients a+-
of G, each ray contributes

    S(r, c0, T) = int_c0^T G(r + iy) y^k dy  -  a+(0) T^(k+1)/(k+1)
        + sum_{n != 0} a+(n) e(nr) Gamma(k+1, 2 pi n T)/(2 pi n)^(k+1)
        + a-(0) (T^-k / k   or  -log T  when k = 0)
        + sum_{n != 0} a-(n) e(nr) ( E_{2k+2}(4 pi n T) Gamma(k+1, 2 pi n T)
              / (2 pi n)^(k+1)
            - 2^(-2k-1) k! / (2 pi n)^(k+1)
              * sum_{j=0}^k (-1)^j / j!  E_{2k+2-j}(2 pi n T) ),

and the full integral is f^k i^(k+1) (S(r-, c-, T) + (-1)^(k+1) S(r+, c+, T)),
where the minus-ray is the transported image of the bottom end at the cusp
r+ = p/q in lowest terms, with c- = 1/(c+ q^2).  The counterterms are
antiderivatives of the integrand's Fourier modes, so the value does not
depend on T; which ray carries the unsigned slot only matters for even k
and is pinned by the weight-2 Eisenstein trace identity.

The alternative representation trades the counterterms for line integrals
of G against Bernoulli polynomials and of xi G against polygamma functions
along a horizontal period at height T.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp, mpf, mpc

from .specfun import (DEFAULT_PRECISION, gamma_upper, e_kappa,
                      kronecker_symbol, bernoulli_poly_eval, _workdps)
from .qforms import (class_reps, automorph_generator, genus_char,
                     square_normalize, _isqrt, _xgcd)
from .quadrature import gauss_legendre, integrate_gl, integrate_gl_doubling
from .hyperbolic import apply_moebius
from .forms import HarmonicFourierData, eval_harmonic, xi_symbolic, _coerce


@dataclass(frozen=True)
class CycleIntegralResult:
    value: object
    method: str
    quadrature_error: float
    T_used: float
    nodes: int = 0


# ---------------------------------------------------------------------------
# closed geodesics
# ---------------------------------------------------------------------------

def closed_cycle_integral(G_eval, Q, k=0, nodes=128, prec=DEFAULT_PRECISION,
                          base_angle=None, tol=1e-18):
    """One automorph period of G(z) Q(z,1)^k dz along the oriented geodesic.

    G_eval must evaluate an object transforming with weight 2k+2 anywhere
    in H (route through the fundamental domain for q-series objects);
    violations show up as base-point dependence.
    """
    D = Q.disc
    if D <= 0 or _isqrt(D) ** 2 == D:
        raise ValueError("closed_cycle_integral needs non-square disc > 0")
    if Q.a == 0:
        raise ValueError("a = 0 forms have square discriminant")
    with _workdps(prec):
        center = mpf(-Q.b) / (2 * Q.a)
        radius = mpmath.sqrt(D) / (2 * abs(Q.a))
        theta0 = mpmath.pi / 2 if base_angle is None else mpf(base_angle)
        z0 = center + radius * mpmath.e ** (1j * theta0)
        M = automorph_generator(Q).matrix
        # orientation: toward the endpoint (-b + sqrt D)/(2a)
        want_decreasing = Q.a > 0
        z1 = apply_moebius(M, z0)
        th1 = mpmath.arg(z1 - center)
        if (th1 < theta0) != want_decreasing:
            Minv = ((M[1][1], -M[0][1]), (-M[1][0], M[0][0]))
            z1 = apply_moebius(Minv, z0)
            th1 = mpmath.arg(z1 - center)
        assert (th1 < theta0) == want_decreasing

        def integrand(theta):
            z = center + radius * mpmath.e ** (1j * theta)
            qz = Q.a * z * z + Q.b * z + Q.c
            return G_eval(z) * qz ** k * (1j * radius * mpmath.e ** (1j * theta))

        val, err, used = integrate_gl_doubling(integrand, theta0, th1,
                                               n0=nodes, tol=tol, nmax=4096)
        return CycleIntegralResult(val, "closed-quadrature", float(err),
                                   float("nan"), used)


# ---------------------------------------------------------------------------
# regularized integrals along infinite geodesics
# ---------------------------------------------------------------------------

def _square_ray_data(Q):
    """(normal form, f, r_plus, q_denom, r_minus) for square discriminant."""
    QN, _ = square_normalize(Q)
    f = QN.b
    r_plus = Fraction(-QN.c, f)
    q = r_plus.denominator
    p = r_plus.numerator
    # sigma_minus sends infinity to the bottom cusp p/q
    g, u, v = _xgcd(p, q)
    assert g == 1
    sigma = ((p, -v), (q, u))
    Qm = QN.neg().compose(sigma)
    assert Qm.a == 0 and Qm.b == f, "orientation convention violated"
    r_minus = Fraction(-Qm.c, f)
    return QN, f, r_plus, q, r_minus


def _ray_quadrature(G_fun, r, c0, T, k, tol, nodes):
    """int_c0^T G(r + iy) y^k dy with dyadic panels toward the bottom.

    q-series objects vary fastest at small heights, so the interval below
    height 1 is split dyadically; each panel uses node-doubling GL.
    """
    lo, hi = mpf(c0), mpf(T)
    if hi == lo:
        return mpc(0), 0.0, 0
    if hi < lo:
        val, err, n = _ray_quadrature(G_fun, r, T, c0, k, tol, nodes)
        return -val, err, n
    edges = {lo, hi}
    h = min(hi, mpf(1))
    if lo < h:
        edges.add(h)
    while h / 2 > lo:
        h = h / 2
        edges.add(h)
    edges = sorted(edges)
    total = mpc(0)
    toterr = 0.0
    used = 0
    f = lambda y: G_fun(mpc(r, 0) + 1j * y) * y ** k
    for a, b in zip(edges[:-1], edges[1:]):
        val, err, n = integrate_gl_doubling(f, a, b, n0=nodes, tol=tol, nmax=4096)
        total += val
        toterr += float(err)
        used = max(used, n)
    return total, toterr, used


def _ray_counterterms(G, k, r, T, prec):
    """The T-dependent subtraction making the ray integral convergent."""
    with _workdps(prec):
        Tm = mpf(T)
        rr = _frac_to_mpf(r)
        e = lambda n: mpmath.e ** (2j * mpmath.pi * n * rr)
        acc = mpc(0)
        ap0 = _coerce(G.a_plus.get(0, 0))
        acc -= ap0 * Tm ** (k + 1) / (k + 1)
        for n, c in sorted(G.a_plus.items()):
            if n == 0 or not c:
                continue
            g = gamma_upper(k + 1, 2 * mpmath.pi * n * Tm, prec).value
            acc += _coerce(c) * e(n) * g / (2 * mpmath.pi * n) ** (k + 1)
        am0 = _coerce(G.a_minus.get(0, 0))
        if am0:
            if k == 0:
                acc += am0 * (-mpmath.log(Tm))
            else:
                acc += am0 * Tm ** (-k) / k
        kfac = mpmath.factorial(k)
        for n, c in sorted(G.a_minus.items()):
            if n == 0 or not c:
                continue
            tpn = 2 * mpmath.pi * n
            g = gamma_upper(k + 1, tpn * Tm, prec).value
            first = e_kappa(2 * k + 2, 2 * tpn * Tm, prec).value * g / tpn ** (k + 1)
            inner = mpc(0)
            for j in range(k + 1):
                inner += (mpf(-1) ** j / mpmath.factorial(j)) \
                    * e_kappa(2 * k + 2 - j, tpn * Tm, prec).value
            second = mpf(2) ** (-2 * k - 1) * kfac / tpn ** (k + 1) * inner
            acc += _coerce(c) * e(n) * (first - second)
        return acc


def _frac_to_mpf(r):
    if isinstance(r, Fraction):
        return mpf(r.numerator) / r.denominator
    return mpf(r)


def reg_cycle_integral(G, Q, k=0, T=2, c_plus=1, prec=DEFAULT_PRECISION,
                       evaluator=None, nodes=64, tol=1e-22):
    """Regularized cycle integral of G along the infinite geodesic of Q.

    Q must have square discriminant f^2 (any representative; it is
    normalized to (0, f, c) first).  G is HarmonicFourierData of weight
    2k+2; `evaluator` overrides the pointwise evaluation of G on the rays
    (pass a fundamental-domain-reducing evaluator for genuinely modular G,
    so that the quadrature stays accurate at small heights).
    """
    if T <= 0:
        raise ValueError("T must be positive")
    if c_plus <= 0:
        raise ValueError("c_plus must be positive")
    QN, f, r_plus, q, r_minus = _square_ray_data(Q)
    with _workdps(prec):
        G_fun = evaluator if evaluator is not None else (lambda z: eval_harmonic(G, z, prec))
        c_minus = Fraction(1, 1) / (Fraction(c_plus) * q * q)
        quad_p, err_p, n_p = _ray_quadrature(G_fun, _frac_to_mpf(r_plus),
                                             _frac_to_mpf(Fraction(c_plus)), mpf(T),
                                             k, tol, nodes)
        quad_m, err_m, n_m = _ray_quadrature(G_fun, _frac_to_mpf(r_minus),
                                             _frac_to_mpf(c_minus), mpf(T),
                                             k, tol, nodes)
        S_plus = quad_p + _ray_counterterms(G, k, r_plus, T, prec)
        S_minus = quad_m + _ray_counterterms(G, k, r_minus, T, prec)
        # the bottom-end chart carries the unsigned ray; only even k is
        # sensitive to this labeling, and it is pinned by the weight-2
        # Eisenstein trace identity (the odd-k combination is symmetric)
        total = mpf(f) ** k * (1j) ** (k + 1) * (S_minus + (-1) ** (k + 1) * S_plus)
        return CycleIntegralResult(total, "regularized-definition",
                                   err_p + err_m, float(T), max(n_p, n_m))


# ---------------------------------------------------------------------------
# alternative representation (Bernoulli / polygamma line integrals)
# ---------------------------------------------------------------------------

def _alt_ray(G, xiG, G_fun, k, r, c0, T, prec, nodes, tol):
    with _workdps(prec):
        Tm = mpf(T)
        rr = _frac_to_mpf(r)
        quad, err, _ = _ray_quadrature(G_fun, rr, _frac_to_mpf(c0), Tm, k, tol, nodes)
        am0 = _coerce(G.a_minus.get(0, 0))
        sgn = mpf(-1) ** k

        def xg(z):
            acc = mpc(0)
            for n, c in xiG.coeffs.items():
                if n != 0 and c != 0:
                    acc += _coerce(c) * mpmath.e ** (2j * mpmath.pi * n * z)
            return acc

        # G against B_{k+1} along the period at height T
        fB = lambda x: (G_fun(rr + x + 1j * Tm) - am0 * Tm ** (-1 - 2 * k)) \
            * bernoulli_poly_eval(k + 1, x + 1j * Tm)
        iB = integrate_gl(fB, mpf(0), mpf(1), 2 * nodes)
        acc = quad + sgn * (1j) ** (k + 1) / (k + 1) * iB

        # xi G against polygamma
        fpsi = lambda x: xg(rr + x + 1j * Tm) * (
            mpmath.psi(k, x + 1j * Tm) + sgn * mpmath.psi(k, 1 - x - 1j * Tm))
        ipsi = integrate_gl(fpsi, mpf(0), mpf(1), 2 * nodes)
        acc -= sgn * (1j) ** (-k) * mpf(2) ** (2 * k - 1) * mpmath.factorial(k) \
            / mpmath.factorial(2 * k + 1) * mpmath.conj(ipsi)

        # xi G against Bernoulli polynomials of the real part, y-powers
        for d in range(k + 1):
            comb = sum(math.comb(2 * k + 1, j) for j in range(k - d + 1))
            fBd = lambda x: xg(rr + x + 1j * Tm) * bernoulli_poly_eval(d + 1, x) \
                * (-1j * Tm) ** (-k - d - 1)
            iBd = integrate_gl(fBd, mpf(0), mpf(1), 2 * nodes)
            acc -= sgn * (1j) ** (-k) * mpmath.factorial(k) / mpmath.factorial(2 * k + 1) \
                * mpmath.factorial(d + k) / mpmath.factorial(d + 1) * comb \
                * mpmath.conj(iBd)

        if am0:
            acc += am0 * (-mpmath.log(Tm)) if k == 0 else am0 * Tm ** (-k) / k
        return acc, err


def reg_cycle_integral_alt(G, Q, k=0, T=2, c_plus=1, prec=DEFAULT_PRECISION,
                           evaluator=None, nodes=64, tol=1e-22):
    """The Bernoulli/polygamma representation of the regularized integral.

    Needs xi_{2k+2} G, taken symbolically from the Fourier data.  Agrees
    with reg_cycle_integral; for holomorphic G (xi G constant) the
    polygamma terms vanish identically.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    QN, f, r_plus, q, r_minus = _square_ray_data(Q)
    xiG = xi_symbolic(G, prec)
    with _workdps(prec):
        G_fun = evaluator if evaluator is not None else (lambda z: eval_harmonic(G, z, prec))
        c_minus = Fraction(1, 1) / (Fraction(c_plus) * q * q)
        S_plus, e1 = _alt_ray(G, xiG, G_fun, k, r_plus, Fraction(c_plus), T, prec, nodes, tol)
        S_minus, e2 = _alt_ray(G, xiG, G_fun, k, r_minus, c_minus, T, prec, nodes, tol)
        # ray labeling as in reg_cycle_integral
        total = mpf(f) ** k * (1j) ** (k + 1) * (S_minus + (-1) ** (k + 1) * S_plus)
        return CycleIntegralResult(total, "regularized-alternative",
                                   e1 + e2, float(T))


# ---------------------------------------------------------------------------
# the two evaluation lemmas (line integrals with closed forms)
# ---------------------------------------------------------------------------

def bernoulli_unit_integral(j, n, prec=DEFAULT_PRECISION, nodes=64):
    """(quadrature, closed form) for int_0^1 B_j(x) e(nx) dx."""
    with _workdps(prec):
        f = lambda x: bernoulli_poly_eval(j, x) * mpmath.e ** (2j * mpmath.pi * n * x)
        quad = integrate_gl(f, mpf(0), mpf(1), nodes)
        if n == 0:
            closed = mpc(1) if j == 0 else mpc(0)
        elif j == 0:
            closed = mpc(0)
        else:
            closed = mpf(-1) ** (j + 1) * mpmath.factorial(j) \
                / (2j * mpmath.pi * n) ** j
        return quad, closed


def bernoulli_height_integral(kk, n, y, prec=DEFAULT_PRECISION, nodes=64):
    """(quadrature, closed form) for int_{iy}^{iy+1} B_k(z) e(nz) dz."""
    with _workdps(prec):
        ym = mpf(y)
        f = lambda x: bernoulli_poly_eval(kk, x + 1j * ym) \
            * mpmath.e ** (2j * mpmath.pi * n * (x + 1j * ym))
        quad = integrate_gl(f, mpf(0), mpf(1), nodes)
        if n == 0:
            closed = (1j * ym) ** kk
        elif kk == 0:
            closed = mpc(0)
        else:
            g = gamma_upper(kk, 2 * mpmath.pi * n * ym, prec).value
            closed = -kk * (1j) ** kk * g / (2 * mpmath.pi * n) ** kk
        return quad, closed


def polygamma_height_integral(kk, n, y, prec=DEFAULT_PRECISION, nodes=64,
                              _psi_cache=None):
    """(quadrature, closed form) for
    int_{iy}^{iy+1} (psi^(k)(z) + (-1)^k psi^(k)(1-z)) e(nz) dz."""
    with _workdps(prec):
        ym = mpf(y)
        xs, ws = gauss_legendre(nodes)
        if _psi_cache is None:
            _psi_cache = {}
        key = (kk, float(ym), nodes)
        if key not in _psi_cache:
            vals = []
            for xnode in xs:
                x = (1 + xnode) / 2
                z = x + 1j * ym
                vals.append(mpmath.psi(kk, z) + mpf(-1) ** kk * mpmath.psi(kk, 1 - z))
            _psi_cache[key] = vals
        vals = _psi_cache[key]
        quad = mpc(0)
        for xnode, w, pv in zip(xs, ws, vals):
            x = (1 + xnode) / 2
            quad += w * pv * mpmath.e ** (2j * mpmath.pi * n * (x + 1j * ym))
        quad = quad / 2
        if n == 0:
            if kk == 0:
                closed = 2 * mpmath.log(ym)
            else:
                closed = 2 * mpf(-1) ** (kk + 1) * mpmath.factorial(kk - 1) \
                    * (1j * ym) ** (-kk)
        else:
            closed = -2 * (2j * mpmath.pi * n) ** kk * mpmath.factorial(kk) \
                * e_kappa(kk + 1, -2 * mpmath.pi * n * ym, prec).value
        return quad, closed


def lemma_integral_checks(k_max=4, n_max=3, ys=(0.5, 1, 2), prec=DEFAULT_PRECISION):
    """Quadrature-vs-closed-form errors for both evaluation lemmas."""
    report = []
    psi_cache = {}
    for y in ys:
        for kk in range(k_max + 1):
            for n in range(-n_max, n_max + 1):
                qa, ca = bernoulli_unit_integral(kk, n, prec)
                report.append({"lemma": "bernoulli-unit", "k": kk, "n": n, "y": None,
                               "abs_error": float(abs(qa - ca))})
                qb, cb = bernoulli_height_integral(kk, n, y, prec)
                report.append({"lemma": "bernoulli-height", "k": kk, "n": n, "y": y,
                               "abs_error": float(abs(qb - cb))})
                qp, cp = polygamma_height_integral(kk, n, y, prec,
                                                   _psi_cache=psi_cache)
                report.append({"lemma": "polygamma-height", "k": kk, "n": n, "y": y,
                               "abs_error": float(abs(qp - cp))})
    return report


# ---------------------------------------------------------------------------
# traces and L-values
# ---------------------------------------------------------------------------

def eval_harmonic_modular(G, z, prec=DEFAULT_PRECISION):
    """Evaluate genuinely modular Fourier data through the fundamental domain."""
    from .hyperbolic import reduce_to_fundamental, moebius_j
    zstar, gamma = reduce_to_fundamental(z)
    val = eval_harmonic(G, zstar, prec)
    return val * moebius_j(gamma, z) ** (-G.kappa)


def trace_cycle(G, delta, D, k=0, prec=DEFAULT_PRECISION, T=2, c_plus=1,
                nodes=128, evaluator=None):
    """tr_delta(G, D) = sum over classes of disc |delta| D of
    chi_delta(Q) times the (regularized, if needed) cycle integral."""
    delta = int(delta)
    D = int(D)
    if D <= 0:
        raise ValueError("trace_cycle needs D > 0")
    sD = D if delta > 0 else -D
    if sD % 4 not in (0, 1):
        raise ValueError("sgn(delta) D must be 0 or 1 mod 4")
    if (-1) ** (k + 1) * delta <= 0:
        raise ValueError("sign condition (-1)^(k+1) delta > 0 violated")
    disc = abs(delta) * D
    square = _isqrt(disc) ** 2 == disc
    if evaluator is None:
        evaluator = lambda z: eval_harmonic_modular(G, z, prec)
    with _workdps(prec):
        acc = mpc(0)
        qerr = 0.0
        for Q in class_reps(disc).reps:
            chi = genus_char(delta, Q)
            if chi == 0:
                continue
            if square:
                res = reg_cycle_integral(G, Q, k, T=T, c_plus=c_plus, prec=prec,
                                         evaluator=evaluator)
            else:
                res = closed_cycle_integral(evaluator, Q, k, nodes=nodes, prec=prec)
            acc += chi * res.value
            qerr += res.quadrature_error
        return acc, qerr


def l_star_value(G, delta, k=0, prec=DEFAULT_PRECISION, **kw):
    """L*_delta(G, k+1) = sqrt(|delta|) tr_delta(G, -delta) (all classes
    regularized: the discriminant is the square delta^2)."""
    delta = int(delta)
    if (-1) ** (k + 1) * delta <= 0:
        raise ValueError("sign condition violated")
    val, qerr = trace_cycle(G, delta, abs(delta), k, prec=prec, **kw)
    with _workdps(prec):
        return mpmath.sqrt(abs(delta)) * val, qerr


def sigma_exp_sum(delta, prec=DEFAULT_PRECISION):
    """(2 sqrt|delta| / pi) sum_{n>0} (delta/n) sigma_1(n)/n e^(-2 pi n/|delta|);
    an independent closed form for the square-trace L-value of the completed
    weight-2 Eisenstein series."""
    from .qforms import divisor_sigma1
    q = abs(int(delta))
    with _workdps(prec):
        acc = mpf(0)
        n = 0
        target = mpf(10) ** (-(mp.dps + 5))
        while True:
            n += 1
            chi = kronecker_symbol(delta, n)
            term = mpf(divisor_sigma1(n)) / n * mpmath.e ** (-2 * mpmath.pi * n / q)
            if chi:
                acc += chi * term
            if term < target and n > q:
                break
        return 2 * mpmath.sqrt(q) / mpmath.pi * acc


def complementary_trace(F_xi, delta, d, k=0, prec=DEFAULT_PRECISION):
    """Finite sum of principal-part coefficients against geodesic real parts:

        sum over reps (0, f, c) of disc f^2 = (|delta| d)^2 of
        sum_{n < 0} a_F(n) (4 pi n)^k e(n r),   r = -c/f.
    """
    f = abs(int(delta)) * Fraction(d)
    if f.denominator != 1:
        raise ValueError("|delta| d must be an integer at level 1")
    f = int(f)
    with _workdps(prec):
        acc = mpc(0)
        for Q in class_reps(f * f).reps:
            r = Fraction(-Q.c, Q.b)
            for n, c in F_xi.coeffs.items():
                if n >= 0 or not c:
                    continue
                acc += _coerce(c) * (4 * mpmath.pi * n) ** k \
                    * mpmath.e ** (2j * mpmath.pi * n * _frac_to_mpf(r))
        return acc


# ---------------------------------------------------------------------------
# the binomial-sum identity from the constant-term computation
# ---------------------------------------------------------------------------

def combinatorial_identity_sides(d, k):
    """Both sides of
    sum_{j=ceil(k/2)}^k C(k,j) C(2j-d, k) (-1)^j/(2j+1)
        = (-1)^k k! (d+k)! / ((2k+1)! d!) sum_{j=0}^{k-d} C(2k+1, j),
    as exact rationals (0 <= d <= k)."""
    if not 0 <= d <= k:
        raise ValueError("needs 0 <= d <= k")
    lhs = Fraction(0)
    for j in range((k + 1) // 2, k + 1):
        lhs += Fraction(math.comb(k, j) * math.comb(2 * j - d, k) * (-1) ** j,
                        2 * j + 1)
    rhs = Fraction((-1) ** k * math.factorial(k) * math.factorial(d + k),
                   math.factorial(2 * k + 1) * math.factorial(d)) \
        * sum(math.comb(2 * k + 1, j) for j in range(k - d + 1))
    return lhs, rhs
