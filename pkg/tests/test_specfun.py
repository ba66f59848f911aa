"""Special-function contracts, checked against independent quadrature and
series oracles."""

import math
import random
from fractions import Fraction

import mpmath
import pytest
from mpmath import mp, mpf, mpc

from shintani import specfun as sf

PREC = sf.DEFAULT_PRECISION


# ---------------------------------------------------------------------------
# incomplete gamma
# ---------------------------------------------------------------------------

def test_gamma_upper_trivial():
    assert abs(sf.gamma_upper(1, 0).value - 1) < 1e-25
    assert abs(sf.gamma_upper(2, 0).value - 1) < 1e-25


def test_gamma_upper_quadrature_oracle():
    # adaptive quadrature of int_1^oo e^-t t^2 dt
    oracle = mpmath.quad(lambda t: mpmath.e ** (-t) * t * t, [1, mpmath.inf])
    got = sf.gamma_upper(3, 1)
    assert abs(got.value - oracle) < 1e-25
    assert abs(got.value - 5 / mpmath.e) < 1e-25


def test_gamma_upper_recurrence():
    # Gamma(s+1, y) = s Gamma(s, y) + y^s e^-y
    rng = random.Random(5)
    for _ in range(60):
        s = rng.randint(1, 8)
        y = mpf(rng.uniform(-10, 10))
        lhs = sf.gamma_upper(s + 1, y).value
        rhs = s * sf.gamma_upper(s, y).value + y ** s * mpmath.e ** (-y)
        assert abs(lhs - rhs) <= 1e-10 * (1 + abs(lhs))


def test_gamma_upper_rejects_bad_s():
    with pytest.raises(ValueError):
        sf.gamma_upper(0, 1)


# ---------------------------------------------------------------------------
# exponential integral
# ---------------------------------------------------------------------------

def test_ei_negative_quadrature_oracle():
    # Ei(-1) = -int_1^oo e^-t/t dt
    oracle = -mpmath.quad(lambda t: mpmath.e ** (-t) / t, [1, mpmath.inf])
    assert abs(sf.exp_integral_ei(-1).value - oracle) < 1e-25
    assert abs(sf.exp_integral_ei(-10).value - mpf("-4.15696892968532438e-6")) < 1e-18


def test_ei_principal_value_oracle():
    # principal-value oracle at y = 1 via the exact-rational series
    # gamma + log y + sum y^m/(m m!) (all terms positive, no PV subtlety left)
    acc = Fraction(0)
    fact = 1
    for m in range(1, 60):
        fact *= m
        acc += Fraction(1, m * fact)
    oracle = mpmath.euler + mpf(acc.numerator) / acc.denominator
    assert abs(sf.exp_integral_ei(1).value - oracle) < 1e-25


@pytest.mark.parametrize("y", [-45, -12.5, -3, -0.7, 0.3, 8.0, 31.0, 80.0, 120.0])
def test_ei_matches_mpmath_across_branches(y):
    assert abs(sf.exp_integral_ei(y).value - mpmath.ei(y)) < 1e-25 * (1 + abs(mpmath.ei(y)))


def test_ei_rejects_zero():
    with pytest.raises(ValueError):
        sf.exp_integral_ei(0)


# ---------------------------------------------------------------------------
# E_kappa
# ---------------------------------------------------------------------------

def test_e_kappa_trivial_kappa0():
    got = sf.e_kappa(0, mpf("1.7")).value
    assert abs(got - mpmath.e ** mpf("1.7")) < 1e-24


def test_e_kappa_k2_branch():
    # kappa = 2, y = -1: -(e^-1 (-1)^-1 - Ei(-1)) = e^-1 + Ei(-1)
    expect = mpmath.e ** mpf(-1) + mpmath.ei(-1)
    assert abs(sf.e_kappa(2, -1).value - expect) < 1e-24
    assert abs(expect - mpf("0.148495506775922")) < 1e-14


def _central_derivative(f, y, h):
    d1 = (f(y + h) - f(y - h)) / (2 * h)
    d2 = (f(y + h / 2) - f(y - h / 2)) / h
    return (4 * d2 - d1) / 3


def test_e_kappa_is_antiderivative():
    # d/dy E_kappa(y) = e^y (-y)^(-kappa), Richardson central differences
    rng = random.Random(11)
    f = {}
    for kappa in range(-3, 7):
        fn = lambda y, kk=kappa: sf.e_kappa(kk, y).value
        for _ in range(20):
            y = mpf(rng.uniform(-5, 5))
            if abs(y) < 0.3:
                continue
            d = _central_derivative(fn, y, mpf("1e-5"))
            expect = mpmath.e ** y * (-y) ** (-kappa)
            assert abs(d - expect) <= 1e-7 * (1 + abs(expect)), (kappa, float(y))


def test_e_kappa_rejects_zero():
    with pytest.raises(ValueError):
        sf.e_kappa(3, 0)


# ---------------------------------------------------------------------------
# erfc
# ---------------------------------------------------------------------------

def test_erfc_values_and_reflection():
    assert abs(sf.erfc(0).value - 1) < 1e-28
    oracle = 2 / mpmath.sqrt(mpmath.pi) * mpmath.quad(
        lambda w: mpmath.e ** (-w * w), [1, mpmath.inf])
    assert abs(sf.erfc(1).value - oracle) < 1e-25
    x = mpf("0.73")
    assert abs(sf.erfc(-x).value - (2 - sf.erfc(x).value)) < 1e-12


# ---------------------------------------------------------------------------
# beta integrals
# ---------------------------------------------------------------------------

def test_beta_tail_at_zero():
    assert abs(sf.beta_fns(0, 0, "tail").value - 2) < 1e-25


def test_beta_complementary_at_zero():
    assert abs(sf.beta_fns(0, 0, "complementary").value - (-2)) < 1e-25


def test_beta_tail_quadrature_oracle():
    for k in range(5):
        for v in (mpf("0.1"), mpf(1), mpf(10)):
            oracle = mpmath.quad(
                lambda t: mpmath.e ** (-v * t) * t ** (mpf(-1.5) - k), [1, mpmath.inf])
            assert abs(sf.beta_fns(k, v, "tail").value - oracle) < 1e-10


def test_beta_complementary_matches_integral_when_defined():
    # for k = 0 the continuation is genuinely needed; compare against the
    # termwise-integrated series summed independently at higher precision
    with mp.workdps(60):
        v = mpf("0.37")
        acc = mpf(0)
        term = mpf(1)
        for m in range(0, 80):
            acc += term / (m - mpf("0.5"))
            term = term * (-v) / (m + 1)
    assert abs(sf.beta_fns(0, mpf("0.37"), "complementary").value - acc) < 1e-24


# ---------------------------------------------------------------------------
# cal_F
# ---------------------------------------------------------------------------

def test_cal_F_term_by_term_oracle():
    w = mpf(1)
    sp = mpmath.sqrt(mpmath.pi)
    t1 = sp / 2 * mpmath.e ** w * mpmath.erfc(1)
    t2 = -sp * mpmath.quad(lambda t: mpmath.e ** (t * t) * mpmath.erfc(t), [0, 1])
    t3 = mpmath.log(2) + mpmath.euler / 2
    assert abs(sf.cal_F(1).value - (t1 + t2 + t3)) < 1e-9


def test_cal_F_laplacian_relation():
    # 4 Delta_{3/2} [F(4 pi m v) e(m tau)] = -e(m tau) at m = 1
    from shintani.thetacore import fd_operators
    m = 1
    tau = mpc("0.3", "0.8")

    def f(t):
        v = t.imag
        return sf.cal_F(4 * mpmath.pi * m * v).value * mpmath.e ** (2j * mpmath.pi * m * t)

    _, lap = fd_operators(f, mpf(3) / 2, tau, step=1e-3)
    target = -mpmath.e ** (2j * mpmath.pi * m * tau)
    assert abs(4 * lap - target) < 1e-4


def test_cal_F_small_w_expansion():
    # the displayed formula diverges like (sqrt(pi)/2) w^(-1/2) as w -> 0+
    # (the erfc term contributes no log); after subtracting that and the
    # explicit log(w)/2, the remainder tends to -1 + log 2 + gamma/2
    limit = -1 + mpmath.log(2) + mpmath.euler / 2
    for w in (mpf("1e-6"), mpf("1e-7")):
        rem = sf.cal_F(w).value - mpmath.sqrt(mpmath.pi) / 2 / mpmath.sqrt(w) \
            - mpmath.log(w) / 2
        assert abs(rem - limit) < 0.01


def test_cal_F_rejects_nonpositive():
    with pytest.raises(ValueError):
        sf.cal_F(0)


# ---------------------------------------------------------------------------
# Hurwitz zeta / polygamma / polynomials
# ---------------------------------------------------------------------------

def test_hurwitz_zeta_negative_integers_exact_bernoulli():
    for j in range(9):
        for num in range(1, 6):
            rho = Fraction(num, 5)
            got = sf.hurwitz_zeta(-j, rho).value
            expect = -sf.bernoulli_poly(j + 1, rho) / (j + 1)
            ev = mpf(expect.numerator) / expect.denominator
            assert abs(got - ev) < 1e-27 * (1 + abs(ev))


def test_hurwitz_zeta_series_oracle():
    direct = sum(mpf(1) / n ** 2 for n in range(1, 4000)) + mpf(1) / 3999  # tail est
    got = sf.hurwitz_zeta(2, 1).value
    assert abs(got - mpmath.pi ** 2 / 6) < 1e-25
    assert abs(got - direct) < 1e-3
    assert abs(sf.hurwitz_zeta(0, Fraction(1, 3)).value - mpf(1) / 6) < 1e-25


def test_hurwitz_zeta_rejects_pole():
    with pytest.raises(ValueError):
        sf.hurwitz_zeta(1, 0.5)


def test_polygamma_series_oracle():
    # psi(1) = -gamma, psi'(1) = pi^2/6, against the defining series
    assert abs(sf.polygamma(0, 1).value + mpmath.euler) < 1e-25
    assert abs(sf.polygamma(1, 1).value - mpmath.pi ** 2 / 6) < 1e-25
    series = sum(mpf(1) / (1 + n) ** 2 for n in range(100000))
    assert abs(sf.polygamma(1, 1).value - series) < 1e-4


def test_polygamma_recurrence():
    k, x = 2, mpf("0.7")
    lhs = sf.polygamma(k, x + 1).value - sf.polygamma(k, x).value
    rhs = (-1) ** k * mpmath.factorial(k) / x ** (k + 1)
    assert abs(lhs - rhs) < 1e-10


def test_polygamma_rejects_poles():
    with pytest.raises(ValueError):
        sf.polygamma(1, -2)


def test_bernoulli_poly_exact():
    assert sf.bernoulli_poly(1, Fraction(0)) == Fraction(-1, 2)
    assert sf.bernoulli_poly(1, Fraction(1, 4)) == Fraction(1, 4) - Fraction(1, 2)
    # generating-function oracle: te^(xt)/(e^t - 1) expanded symbolically
    # via the defining recurrence sum_{j<n} C(n,j) B_j(x) = n x^(n-1)
    for n in range(1, 9):
        x = Fraction(2, 7)
        lhs = sum(math.comb(n, j) * sf.bernoulli_poly(j, x) for j in range(n))
        assert lhs == n * x ** (n - 1)
    assert sf.bernoulli_poly(2, 0) == Fraction(1, 6)


def test_bernoulli_reflection():
    for n in range(11):
        for x in (Fraction(0), Fraction(1, 3), Fraction(1, 2)):
            assert sf.bernoulli_poly(n, 1 - x) == (-1) ** n * sf.bernoulli_poly(n, x)


def test_hermite_values_and_addition():
    assert sf.hermite_poly(0, 0.37) == 1
    assert sf.hermite_poly(2, 0) == -2
    n, a, b = 4, mpf("0.3"), mpf("0.5")
    lhs = sf.hermite_poly(n, a + b)
    rhs = sum(math.comb(n, j) * (2 * a) ** (n - j) * sf.hermite_poly(j, b)
              for j in range(n + 1))
    assert abs(lhs - rhs) < 1e-10


# ---------------------------------------------------------------------------
# Kronecker symbol and L-series
# ---------------------------------------------------------------------------

def _residue_character(delta, n):
    # brute-force quadratic-residue character mod |delta| for odd prime |delta|
    q = abs(delta)
    r = n % q
    if r == 0:
        return 0
    return 1 if any((x * x - r) % q == 0 for x in range(1, q)) else -1


def test_kronecker_principal():
    assert all(sf.kronecker_symbol(1, n) == 1 for n in range(1, 50))


def test_kronecker_minus4_minus3():
    assert sf.kronecker_symbol(-4, 3) == -1
    # (-3/n) has period 3 with values (1, -1, 0); brute-force QR oracle
    for n in range(1, 40):
        expect = _residue_character(-3, n)
        assert sf.kronecker_symbol(-3, n) == expect


def test_kronecker_complete_multiplicativity():
    rng = random.Random(17)
    deltas = [-3, -4, 5, -8, 12, 13, -20, 21]
    for _ in range(500):
        d = rng.choice(deltas)
        m = rng.randint(-60, 60)
        n = rng.randint(-60, 60)
        assert sf.kronecker_symbol(d, m * n) == \
            sf.kronecker_symbol(d, m) * sf.kronecker_symbol(d, n)


def test_dirichlet_L_at_zero():
    assert abs(sf.dirichlet_L(-4, 0).value - mpf("0.5")) < 1e-28
    assert sf.dirichlet_L_exact_nonpositive(-4, 0) == Fraction(1, 2)


def test_dirichlet_L_at_one_accelerated_oracle():
    # averaged partial sums of sum (delta/n)/n as an independent check
    got = sf.dirichlet_L(-3, 1).value
    assert abs(got - mpmath.pi / (3 * mpmath.sqrt(3))) < 1e-25
    with mp.workdps(40):
        def full_period_partial(M):
            return sum(mpf(sf.kronecker_symbol(-3, n)) / n
                       for n in range(1, 3 * M + 1))
        S1 = full_period_partial(10000)
        S2 = full_period_partial(20000)
        extrapolated = 2 * S2 - S1   # kills the 1/M term of the tail
    assert abs(got - extrapolated) < 1e-8


def test_dirichlet_L_pole_rejected():
    with pytest.raises(ValueError):
        sf.dirichlet_L(1, 1)
    with pytest.raises(ValueError):
        sf.dirichlet_L(-7, 2)
    with pytest.raises(ValueError):
        sf.dirichlet_L(8, 1.5)


def test_dirichlet_L_rejects_nonfundamental():
    with pytest.raises(ValueError):
        sf.dirichlet_L(-12, 0)


def test_fundamental_discriminants():
    fundamentals = {1, 5, 8, 12, 13, 17, 21, 24,
                    -3, -4, -7, -8, -11, -15, -19, -20, -23, -24}
    for d in range(-25, 26):
        assert sf.is_fundamental_discriminant(d) == (d in fundamentals), d
