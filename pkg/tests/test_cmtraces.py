"""CM-value traces, the singular-moduli series, and the identity suite."""

import random
from fractions import Fraction

import mpmath
import pytest
from mpmath import mp, mpf, mpc

from shintani import cmtraces as cm
from shintani import hyperbolic as hy
from shintani import qforms as qf
from shintani.forms import build_standard_forms
from test_qforms import random_sl2

J = build_standard_forms(128)["J"]


def test_trace_constant_is_class_number():
    # tr+_1(1, D) = H(|D|), a pure combinatorial identity, exact rationals
    for aD in range(3, 101):
        if aD % 4 not in (0, 3):
            continue
        tr = cm.trace_cm(1, 1, -aD)
        assert tr.value == qf.hurwitz_class_number(aD), aD


def test_trace_J_single_class():
    # disc -4 has the single class (1,0,1) with stabilizer 2; J(i) = 984
    tr = cm.trace_cm(J, 1, -4)
    assert abs(tr.value - 492) < 1e-10
    assert tr.class_count == 1


def test_trace_square_trace_values():
    # tr+_{-3}(1, -4)/2 = H(3); the |D| = 3 case is inadmissible (empty)
    tr = cm.trace_cm(1, -3, -4)
    assert tr.value == Fraction(2, 3)
    with pytest.raises(ValueError):
        cm.trace_cm(1, -3, -3)


def test_trace_representative_independence():
    rng = random.Random(6)
    base = cm.trace_cm(J, -3, -4)
    # translate every representative and recompute by hand
    disc = 12
    acc = mpc(0)
    for Q in qf.class_reps(-disc).reps:
        QT = Q.compose(random_sl2(rng, size=3, length=4))
        if QT.a < 0:
            QT = QT.neg()
        chi = qf.genus_char(-3, QT)
        if chi == 0:
            continue
        w = qf.stabilizer_order(QT)
        from shintani.forms import eval_modular
        acc += chi * eval_modular(J, hy.cm_point(QT).z)[0] / w
    assert abs(base.value - acc) < 1e-9


def test_trace_rejects_bad_parameters():
    with pytest.raises(ValueError):
        cm.trace_cm(1, -3, 4)      # D > 0
    with pytest.raises(ValueError):
        cm.trace_cm(1, -6, -4)     # not fundamental


def test_f_series_zagier_f3():
    fs = cm.f_series(-3, 4)
    assert fs[-3] == 1
    assert abs(fs[1] + 248) < 1e-8
    assert abs(fs[4] - 26752) < 1e-8
    assert 2 not in fs and 3 not in fs   # inadmissible indices absent


def test_f_series_coefficients_real():
    fs = cm.f_series(-4, 8)
    for n, v in fs.items():
        if n > 0:
            assert abs(mpmath.im(v)) < 1e-8


def test_f_series_stable_under_order_doubling():
    a = cm.f_series(-3, 4, order=128)
    b = cm.f_series(-3, 4, order=256)
    for n in a:
        assert abs(mpmath.mpmathify(a[n]) - mpmath.mpmathify(b[n])) < 1e-8


def test_identity_suite_reports():
    reports = cm.identity_suite((-3,), (4,), square_trace_Dmax=9)
    by_id = {}
    for r in reports:
        by_id.setdefault(r.identity_id, []).append(r)
    assert set(by_id) == {"class-number-L0", "class-number-L1", "square-lvalue",
                          "sigma-sum", "hecke", "square-trace"}
    for r in reports:
        assert r.passed, (r.identity_id, r.params, r.abs_error)
        assert r.runtime_ms >= 0
        d = r.to_json()
        assert d["pass"] is True
