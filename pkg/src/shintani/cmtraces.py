r"""
Twisted traces of CM values and the identity-verification suite.

tr+_delta(F, D), for D < 0 with sgn(delta) D = 0, 1 mod 4, sums
chi_delta(Q) F(z_Q) / |stabilizer| over the positive definite classes of
discriminant |delta| D.  With F = 1 and delta = 1 this is the Hurwitz
class number.  The generating series of twisted singular moduli collects
tr+_delta(J, D)/sqrt(|D|) against q^|D| behind the principal term q^delta.

identity_suite packages the numeric checks of the closed-form identities
(Hecke/Eisenstein trace, class number formula, the square-discriminant
L-value, the square-trace dichotomy) into IdentityReport records.
"""

import time
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp, mpf, mpc

from .specfun import (DEFAULT_PRECISION, dirichlet_L, dirichlet_L_exact_nonpositive,
                      is_fundamental_discriminant, _workdps)
from .qforms import (class_reps, genus_char, stabilizer_order,
                     hurwitz_class_number, _isqrt)
from .hyperbolic import cm_point
from .forms import build_standard_forms, eval_modular, e2_star_data, e2_star_modular
from . import cycles


@dataclass(frozen=True)
class TraceResult:
    value: object
    class_count: int
    stabilizer_weighted: bool
    params: dict


@dataclass(frozen=True)
class IdentityReport:
    identity_id: str
    params: dict
    target: float
    computed: float
    abs_error: float
    runtime_ms: int
    tolerance: float

    @property
    def passed(self):
        return self.abs_error <= self.tolerance

    def to_json(self):
        return {"identity_id": self.identity_id, "params": self.params,
                "target": repr(self.target), "computed": repr(self.computed),
                "abs_error": repr(self.abs_error), "runtime_ms": self.runtime_ms,
                "pass": bool(self.passed)}


def _admissible_cm(delta, D):
    if D >= 0:
        return False
    sD = D if delta > 0 else -D
    return sD % 4 in (0, 1)


def trace_cm(F, delta, D, prec=DEFAULT_PRECISION):
    """tr+_delta(F, D) over positive definite classes of disc |delta| D.

    F may be a callable z -> value, a QExpansion (evaluated through the
    fundamental domain), or a constant.
    """
    delta = int(delta)
    D = int(D)
    if not is_fundamental_discriminant(delta):
        raise ValueError("delta must be a fundamental discriminant")
    if not _admissible_cm(delta, D):
        raise ValueError("need D < 0 with sgn(delta) D = 0, 1 mod 4")
    disc = abs(delta) * D
    if F is None or isinstance(F, (int, float, Fraction)):
        cval = F if F is not None else 1
        F_eval = lambda z: cval
        exact = isinstance(cval, (int, Fraction))
    elif hasattr(F, "coeffs"):
        F_eval = lambda z: eval_modular(F, z, prec)[0]
        exact = False
    else:
        F_eval = F
        exact = False
    with _workdps(prec):
        acc = Fraction(0) if exact else mpc(0)
        count = 0
        for Q in class_reps(disc).reps:
            chi = genus_char(delta, Q)
            if chi == 0:
                continue
            w = stabilizer_order(Q)
            z = cm_point(Q).z
            if exact:
                acc += Fraction(chi) * Fraction(F_eval(z)) / w
            else:
                acc += chi * F_eval(z) / w
            count += 1
        return TraceResult(acc, count, True, {"delta": delta, "D": D})


def f_series(delta, D_max, order=128, prec=DEFAULT_PRECISION):
    """Coefficients of the twisted singular-moduli series.

    Index delta carries 1 (principal term); index |D| carries
    tr+_delta(J, D)/sqrt(|D|) for admissible D < 0, |D| <= D_max.
    """
    delta = int(delta)
    if delta >= 0 or not is_fundamental_discriminant(delta):
        raise ValueError("delta must be a negative fundamental discriminant")
    J = build_standard_forms(order)["J"]
    out = {delta: mpf(1)}
    with _workdps(prec):
        for aD in range(1, D_max + 1):
            D = -aD
            if not _admissible_cm(delta, D):
                continue
            tr = trace_cm(J, delta, D, prec)
            out[aD] = tr.value / mpmath.sqrt(aD)
    return out


# ---------------------------------------------------------------------------
# identity suite
# ---------------------------------------------------------------------------

def _report(identity_id, params, target, computed, t0, tol):
    err = float(abs(mpmath.mpmathify(computed) - mpmath.mpmathify(target)))
    return IdentityReport(identity_id, params, float(target),
                          float(mpmath.re(mpmath.mpmathify(computed))),
                          err, int((time.time() - t0) * 1000), tol)


def identity_suite(delta_list=(-3, -4), D_list=(3, 4), prec=DEFAULT_PRECISION,
                   hecke_tol=1e-5, lvalue_tol=1e-5, class_number_tol=1e-10,
                   square_trace_tol=1e-10, square_trace_Dmax=25):
    """Run the closed-form identity checks; returns a list of IdentityReport.

    Individual failures are recorded in the reports, never raised.
    """
    reports = []
    G = e2_star_data(64, prec)
    ev = lambda z: e2_star_modular(z, 64, prec)
    for delta in delta_list:
        if delta >= 0 or not is_fundamental_discriminant(delta):
            continue
        q = abs(delta)
        H_del = hurwitz_class_number(q)

        # Dirichlet class number formula, both evaluation routes
        t0 = time.time()
        L0 = dirichlet_L_exact_nonpositive(delta, 0)
        reports.append(_report("class-number-L0", {"delta": delta},
                               float(H_del), Fraction(L0), t0, class_number_tol))
        t0 = time.time()
        with _workdps(prec):
            L1 = dirichlet_L(delta, 1, prec).value
            v = mpmath.sqrt(q) * L1 / mpmath.pi
        reports.append(_report("class-number-L1", {"delta": delta},
                               float(H_del), v, t0, class_number_tol))

        # square-discriminant L-value = H(|delta|)^2, plus the sigma cross-check
        t0 = time.time()
        L, _ = cycles.l_star_value(G, delta, 0, prec=prec, evaluator=ev)
        with _workdps(prec):
            lv = L / (12 * mpmath.sqrt(q))
        reports.append(_report("square-lvalue", {"delta": delta},
                               float(H_del * H_del), lv, t0, lvalue_tol))
        t0 = time.time()
        sig = cycles.sigma_exp_sum(delta, prec)
        reports.append(_report("sigma-sum", {"delta": delta},
                               float(H_del * H_del), sig, t0, lvalue_tol))

        # Hecke / Eisenstein trace identity over the D grid
        for D in D_list:
            sD = -D
            if sD % 4 not in (0, 1):
                continue
            t0 = time.time()
            tr, _ = cycles.trace_cycle(G, delta, D, 0, prec=prec, evaluator=ev)
            target = 12 * H_del * hurwitz_class_number(D)
            reports.append(_report("hecke", {"delta": delta, "D": D},
                                   float(target), tr, t0, hecke_tol))

        # square-trace dichotomy: tr+(1, D)/sqrt|D| = H(|delta|) iff |D| square
        for aD in range(1, square_trace_Dmax + 1):
            if not _admissible_cm(delta, -aD):
                continue
            t0 = time.time()
            tr = trace_cm(1, delta, -aD, prec)
            root = _isqrt(aD)
            is_sq = root * root == aD
            target = H_del if is_sq else Fraction(0)
            with _workdps(prec):
                v = _coerce_frac(tr.value) / mpmath.sqrt(aD)
            reports.append(_report("square-trace", {"delta": delta, "D": -aD},
                                   float(target), v, t0, square_trace_tol))
    return reports


def _coerce_frac(v):
    if isinstance(v, Fraction):
        return mpf(v.numerator) / v.denominator
    return v
