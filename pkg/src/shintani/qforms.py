r"""
Exact-arithmetic engine for integral binary quadratic forms.

A form (a, b, c) means Q(x, y) = a x^2 + b xy + c y^2 with discriminant
b^2 - 4ac.  SL_2(Z) acts by substitution; reduction, class enumeration for
all three discriminant regimes (definite, indefinite non-square, square),
automorphs via the Pell equation t^2 - D u^2 = 4, the genus character
attached to a fundamental discriminant, and Hurwitz class numbers all live
here.  Everything is exact integer / rational arithmetic.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .specfun import kronecker_symbol, is_fundamental_discriminant


# ---------------------------------------------------------------------------
# forms and the SL2 action
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class QForm:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a == 0 and self.b == 0 and self.c == 0:
            raise ValueError("the zero form is not allowed")

    @property
    def disc(self):
        return self.b * self.b - 4 * self.a * self.c

    @property
    def content(self):
        return math.gcd(math.gcd(abs(self.a), abs(self.b)), abs(self.c))

    def __call__(self, x, y):
        return self.a * x * x + self.b * x * y + self.c * y * y

    def compose(self, M):
        """Q o M: substitute (x, y) -> M (x, y)^T.  Preserves disc for det 1."""
        (p, q), (r, s) = M
        a2 = self(p, r)
        c2 = self(q, s)
        b2 = 2 * self.a * p * q + self.b * (p * s + q * r) + 2 * self.c * r * s
        return QForm(a2, b2, c2)

    def neg(self):
        return QForm(-self.a, -self.b, -self.c)

    def __repr__(self):
        return f"QForm({self.a},{self.b},{self.c})"


IDENTITY = ((1, 0), (0, 1))


def mat_mul(M, N):
    (a, b), (c, d) = M
    (e, f), (g, h) = N
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def mat_inv(M):
    (a, b), (c, d) = M
    det = a * d - b * c
    if det != 1:
        raise ValueError("expected det 1")
    return ((d, -b), (-c, a))


# ---------------------------------------------------------------------------
# reduction
# ---------------------------------------------------------------------------

def _isqrt(n):
    return math.isqrt(n)


def is_reduced_definite(Q):
    a, b, c = Q.a, Q.b, Q.c
    if not (-a < b <= a <= c):
        return False
    if a == c and b < 0:
        return False
    return True


def is_reduced_indefinite(Q):
    # |sqrt(D) - 2|a|| < b < sqrt(D), exact integer comparisons
    D = Q.disc
    a, b = Q.a, Q.b
    if b <= 0 or b * b >= D:
        return False
    return (2 * abs(a) - b) ** 2 < D < (2 * abs(a) + b) ** 2


def _rho_step(Q):
    """One reduction step (a,b,c) -> (c, b', *) with its SL2 matrix."""
    D = Q.disc
    c = Q.c
    if c == 0:
        raise ValueError("rho step undefined for c = 0 (square discriminant ray)")
    ac = abs(c)
    s0 = _isqrt(D) if D > 0 else None
    if D > 0 and ac < s0:
        # b' = largest value <= floor(sqrt D) congruent to -b mod 2|c|
        bp = -Q.b + 2 * ac * ((s0 + Q.b) // (2 * ac))
    else:
        # b' in (-|c|, |c|]
        bp = ((-Q.b + ac) % (2 * ac)) - ac
        if bp <= -ac:
            bp += 2 * ac
    m = (Q.b + bp) // (2 * c)
    M = ((0, -1), (1, m))
    return Q.compose(M), M


def reduce(Q):
    """Gauss reduction.  Returns (reduced form, M) with Q o M = reduced.

    Definite discriminant: the unique reduced representative (input with
    a < 0 is negated first; the matrix then reduces -Q).  Indefinite
    non-square: some reduced form on the cycle of Q.
    """
    D = Q.disc
    if D == 0:
        raise ValueError("disc = 0 forms are not supported")
    if D < 0:
        if Q.a < 0:
            Q = Q.neg()
        M = IDENTITY
        S = ((0, -1), (1, 0))
        while True:
            # translate b into (-a, a]
            t = (Q.a - Q.b) // (2 * Q.a)
            if t:
                T = ((1, t), (0, 1))
                Q, M = Q.compose(T), mat_mul(M, T)
            if Q.c < Q.a or (Q.c == Q.a and Q.b < 0):
                Q, M = Q.compose(S), mat_mul(M, S)
                continue
            break
        return Q, M
    if _isqrt(D) ** 2 == D:
        raise ValueError("square discriminant: use square_normalize")
    M = IDENTITY
    guard = 0
    while not is_reduced_indefinite(Q):
        Q, step = _rho_step(Q)
        M = mat_mul(M, step)
        guard += 1
        if guard > 10000:
            raise ArithmeticError("indefinite reduction did not terminate")
    return Q, M


def rho(Q):
    """The cycle step on reduced indefinite forms."""
    if not is_reduced_indefinite(Q):
        raise ValueError("rho expects a reduced indefinite form")
    return _rho_step(Q)


def square_normalize(Q):
    """Bring a form of square discriminant f^2 > 0 to (0, f, c), 0 <= c < f.

    Returns (normal form, M) with Q o M equal to the normal form.
    """
    D = Q.disc
    f = _isqrt(D)
    if D <= 0 or f * f != D:
        raise ValueError("square_normalize expects positive square discriminant")
    # primitive null vectors of Q from the rational roots of Q(x, 1)
    if Q.a != 0:
        vecs = []
        for num in (-Q.b + f, -Q.b - f):
            den = 2 * Q.a
            g = math.gcd(abs(num), abs(den))
            p, q = num // g, den // g
            if q < 0:
                p, q = -p, -q
            vecs.append((p, q))
    else:
        vecs = [(1, 0)]
        g = math.gcd(abs(Q.c), abs(Q.b))
        p, q = -Q.c // g, Q.b // g
        if q < 0:
            p, q = -p, -q
        vecs.append((p, q))
    for (p, q) in vecs:
        # extend (p, q) to an SL2 matrix with first column (p, q)
        g, u, v = _xgcd(p, q)
        assert g == 1
        M = ((p, -v), (q, u))
        QM = Q.compose(M)
        assert QM.a == 0 and abs(QM.b) == f
        if QM.b == f:
            # translate c into [0, f)
            t = -(QM.c // f)
            T = ((1, t), (0, 1))
            out = QM.compose(T)
            return out, mat_mul(M, T)
    raise ArithmeticError("no orientation-compatible null vector found")


def _xgcd(a, b):
    if a == 0:
        return (abs(b), 0, 1 if b > 0 else -1)
    g, x, y = _xgcd(b % a, a)
    return (g, y - (b // a) * x, x)


# ---------------------------------------------------------------------------
# class enumeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassList:
    disc: int
    reps: tuple
    regime: str

    def to_json(self):
        return {"disc": self.disc, "regime": self.regime,
                "reps": [[Q.a, Q.b, Q.c] for Q in self.reps]}

    @staticmethod
    def from_json(d):
        return ClassList(d["disc"], tuple(QForm(*t) for t in d["reps"]), d["regime"])


def class_reps(disc):
    """Gamma-inequivalence class representatives of discriminant disc.

    disc < 0: all reduced positive definite forms.  disc = f^2: the forms
    (0, f, c) with 0 <= c < f.  disc > 0 non-square: one reduced form per
    rho-cycle.  Imprimitive forms are included.
    """
    disc = int(disc)
    if disc == 0 or disc % 4 not in (0, 1):
        raise ValueError("disc must be a nonzero integer = 0, 1 mod 4")
    if disc < 0:
        reps = []
        amax = _isqrt(-disc // 3) if disc <= -3 else 1
        for a in range(1, amax + 1):
            for b in range(-a + 1, a + 1):
                num = b * b - disc
                if num % (4 * a):
                    continue
                c = num // (4 * a)
                if c < a:
                    continue
                if a == c and b < 0:
                    continue
                reps.append(QForm(a, b, c))
        return ClassList(disc, tuple(sorted(reps)), "definite")
    f = _isqrt(disc)
    if f * f == disc:
        return ClassList(disc, tuple(QForm(0, f, c) for c in range(f)), "square")
    # all reduced indefinite forms, grouped into rho-cycles
    pool = set()
    for b in range(1, f + 1):
        if (disc - b * b) % 4:
            continue
        m = (disc - b * b) // 4   # = |a c|, with a c < 0
        for a0 in _divisors(m):
            if (2 * a0 - b) ** 2 < disc < (2 * a0 + b) ** 2:
                c0 = m // a0
                pool.add(QForm(a0, b, -c0))
                pool.add(QForm(-a0, b, c0))
    reps = []
    seen = set()
    for Q in sorted(pool):
        if Q in seen:
            continue
        cycle = [Q]
        seen.add(Q)
        cur = Q
        guard = 0
        while True:
            cur, _ = rho(cur)
            if cur == Q:
                break
            cycle.append(cur)
            seen.add(cur)
            guard += 1
            if guard > 100000:
                raise ArithmeticError("rho cycle did not close")
        reps.append(min(cycle))
    return ClassList(disc, tuple(sorted(reps)), "indefinite-nonsquare")


def _divisors(m):
    ds = []
    d = 1
    while d * d <= m:
        if m % d == 0:
            ds.append(d)
            if d != m // d:
                ds.append(m // d)
        d += 1
    return sorted(ds)


# ---------------------------------------------------------------------------
# automorphs / Pell
# ---------------------------------------------------------------------------

def pell_fundamental_4(D):
    """Minimal (t, u), t, u > 0, with t^2 - D u^2 = 4 (D > 0 non-square).

    Continued-fraction convergents of sqrt(D) are scanned for values
    p^2 - D q^2 in {1, -1, 2, -2, 4, -4}; each yields a +4 solution, and
    the classical theory guarantees the fundamental one appears.  Small D
    falls back to a direct search.
    """
    D = int(D)
    s0 = _isqrt(D)
    if D <= 0 or s0 * s0 == D:
        raise ValueError("needs positive non-square D")
    if D <= 20:
        u = 1
        while True:
            t2 = 4 + D * u * u
            t = _isqrt(t2)
            if t * t == t2:
                return t, u
            u += 1
    # scan convergents of sqrt(D) over two full periods; every solution of
    # x^2 - D y^2 = N with |N| <= 4 < sqrt(D) appears among them
    cands = []
    m, d, a = 0, 1, s0
    p0, q0 = 1, 0
    p1, q1 = a, 1
    period_ends = 0
    for _ in range(4 * _cf_period_bound(D)):
        r = p1 * p1 - D * q1 * q1
        if r == 4:
            cands.append((p1, q1))
        elif r == -4:
            cands.append(((p1 * p1 + D * q1 * q1) // 2, p1 * q1))
        elif r == 1:
            cands.append((2 * p1, 2 * q1))
        elif r == -1:
            cands.append((2 * (p1 * p1 + D * q1 * q1), 4 * p1 * q1))
        elif r == 2 or r == -2:
            cands.append((p1 * p1 + D * q1 * q1, 2 * p1 * q1))
        m = d * a - m
        d = (D - m * m) // d
        a = (s0 + m) // d
        if a == 2 * s0:
            period_ends += 1
            if period_ends >= 2 and cands:
                break
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
    if not cands:
        raise ArithmeticError(f"no Pell solution found for D = {D}")
    return min(cands, key=lambda tu: tu[0])


def _cf_period_bound(D):
    return max(64, int(3 * math.isqrt(D) * (math.log(D) + 1)))


@dataclass(frozen=True)
class Automorph:
    matrix: tuple

    @property
    def trace(self):
        return self.matrix[0][0] + self.matrix[1][1]


def automorph_generator(Q):
    """Generator of the infinite cyclic stabilizer of an indefinite form.

    M = [[(t-bu)/2, -cu], [au, (t+bu)/2]] with (t, u) the fundamental
    solution of t^2 - disc u^2 = 4; fixes Q under substitution.
    """
    D = Q.disc
    if D <= 0 or _isqrt(D) ** 2 == D:
        raise ValueError("automorphs require positive non-square discriminant")
    t, u = pell_fundamental_4(D)
    a, b, c = Q.a, Q.b, Q.c
    M = (((t - b * u) // 2, -c * u), (a * u, (t + b * u) // 2))
    aut = Automorph(M)
    assert Q.compose(M) == Q
    return aut


# ---------------------------------------------------------------------------
# genus character, class numbers, sigma
# ---------------------------------------------------------------------------

class GenusCharSearchError(RuntimeError):
    pass


def genus_char(delta, Q, search_radius=50):
    """The genus character chi_delta(Q) = (delta/n) on represented values.

    Requires disc(Q) = |delta| * D with sgn(delta) D a discriminant.
    Returns 0 when gcd(a, b, c, delta) > 1; otherwise searches a growing
    coordinate box for a represented n != 0 coprime to delta and fails
    loudly if none shows up within search_radius.  Negative represented
    values go through the Kronecker symbol's sign convention, which gives
    chi(-Q) = sgn(delta) chi(Q).
    """
    delta = int(delta)
    if not is_fundamental_discriminant(delta):
        raise ValueError("delta must be a fundamental discriminant")
    q = abs(delta)
    disc = Q.disc
    if disc % q:
        raise ValueError("disc(Q) must be divisible by |delta|")
    Dq = disc // q
    sD = Dq if delta > 0 else -Dq
    if sD % 4 not in (0, 1):
        raise ValueError("disc(Q)/|delta| violates the discriminant condition")
    if delta == 1:
        return 1 if Q.content >= 1 else 0
    if math.gcd(Q.content, q) > 1:
        return 0
    for radius in range(1, search_radius + 1):
        for x in range(-radius, radius + 1):
            for y in range(-radius, radius + 1):
                if max(abs(x), abs(y)) != radius:
                    continue
                n = Q(x, y)
                if n != 0 and math.gcd(abs(n), q) == 1:
                    return kronecker_symbol(delta, n)
    raise GenusCharSearchError(
        f"no represented value coprime to {delta} within radius {search_radius} for {Q}")


def stabilizer_order(Q):
    """|stabilizer in PSL_2(Z)| of a positive definite form: 1, 2 or 3."""
    if Q.disc >= 0:
        raise ValueError("stabilizer_order expects a definite form")
    if Q.a < 0:
        raise ValueError("expects a positive definite form (a > 0)")
    R, _ = reduce(Q)
    if R.a == R.b == R.c:
        return 3
    if R.b == 0 and R.a == R.c:
        return 2
    return 1


@lru_cache(maxsize=None)
def hurwitz_class_number(D):
    """Hurwitz class number H(D) as an exact Fraction; H(0) = -1/12.

    Weighted count of positive definite classes of discriminant -D:
    weight 1/3 for the (a,a,a) shape, 1/2 for (a,0,a), 1 otherwise;
    H(D) = 0 unless D = 0, 3 mod 4.
    """
    D = int(D)
    if D < 0:
        raise ValueError("H(D) defined for D >= 0")
    if D == 0:
        return Fraction(-1, 12)
    if D % 4 not in (0, 3):
        return Fraction(0)
    acc = Fraction(0)
    for Q in class_reps(-D).reps:
        acc += Fraction(1, stabilizer_order(Q))
    return acc


def divisor_sigma1(n):
    """sigma_1(n) = sum of divisors."""
    n = int(n)
    if n <= 0:
        raise ValueError("divisor_sigma1 requires n >= 1")
    return sum(_divisors(n))
