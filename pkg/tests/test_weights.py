import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from expweights import OverflowDomain, SingularPoint, WeightSpec, class_report
from expweights.weights import q_jet, q_value, t_func, t_safe, weight_eval

from conftest import ERDOS, FREUD2, FREUD4

SPECS = [FREUD2, FREUD4, WeightSpec.freud(1.5), ERDOS, WeightSpec.erdos(1, u=1),
         WeightSpec.erdos(2, l=2)]
spec_st = st.sampled_from(SPECS)


def test_q_jet_pure_power():
    jet = q_jet(FREUD2, 3.0)
    assert (jet.q, jet.q1, jet.q2, jet.q3, jet.q4) == (9.0, 6.0, 2.0, 0.0, 0.0)
    assert jet.logw == -9.0


def test_q_at_zero():
    assert q_jet(FREUD2, 0.0).q == 0.0


def test_erdos_q_at_one():
    assert q_jet(ERDOS, 1.0).q == pytest.approx(math.e - 1, rel=1e-15)


def test_t_examples():
    assert t_func(FREUD4, 1.7) == 4.0
    assert t_func(ERDOS, 1.0) == pytest.approx(2 / (1 - math.exp(-1)), rel=1e-14)
    assert t_func(FREUD2, -5.0) == 2.0


def test_t_singular_at_zero():
    with pytest.raises(SingularPoint):
        t_func(ERDOS, 0.0)
    assert t_safe(ERDOS, 0.0) == pytest.approx(2.0, rel=1e-6)


def test_weight_eval_examples():
    assert weight_eval(FREUD2, 0.0) == (1.0, 0.0)
    assert weight_eval(FREUD2, 10.0)[1] == -100.0
    w, logw = weight_eval(WeightSpec.erdos(1, u=1), 2.0)
    assert logw == pytest.approx(-2 * (math.e ** 2 - 1), rel=1e-14)
    assert w == pytest.approx(math.exp(logw))


def test_weight_eval_underflow_keeps_log():
    w, logw = weight_eval(FREUD2, 40.0)
    assert w == 0.0 and logw == -1600.0


def test_overflow_budget():
    with pytest.raises(OverflowDomain):
        q_jet(FREUD2, 30.0)
    assert math.isinf(q_value(ERDOS, 30.0))
    assert q_jet(FREUD2, 30.0, budget=None).q == 900.0


def test_singular_jet_at_zero_for_small_alpha():
    with pytest.raises(SingularPoint):
        q_jet(WeightSpec.freud(1.5), 0.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        WeightSpec.freud(1.0)
    with pytest.raises(ValueError):
        WeightSpec("laguerre", 2)
    with pytest.raises(ValueError):
        WeightSpec.erdos(2, l=3)
    with pytest.raises(ValueError):
        WeightSpec.erdos(0.5, u=0.2)
    assert WeightSpec("Erdős", 2) == ERDOS


def test_spec_round_trip():
    for s in SPECS:
        assert WeightSpec.from_dict(s.to_dict()) == s


def test_class_report_freud2():
    grid = np.concatenate([-np.linspace(0.5, 10, 96), np.linspace(0.5, 10, 96)])
    rep = class_report(FREUD2, grid, lam=1.0)
    assert rep["T_min"] == 2.0 and rep["T_min"] > 1
    assert rep["growth_max"] <= 4.0 + 1e-12
    assert rep["q1_positive"] and rep["q2_positive"]


def test_class_report_freud4_condition_ratio():
    rep = class_report(FREUD4, np.linspace(0.1, 3, 50))
    assert rep["cond_e_min"] == pytest.approx(0.75, rel=1e-14)
    assert rep["cond_e_max"] == pytest.approx(0.75, rel=1e-14)


def test_class_report_erdos():
    rep = class_report(ERDOS, np.linspace(1, 5, 401))
    assert rep["T_min"] == pytest.approx(3.1639534, rel=1e-7)
    assert rep["T_min_at"] == 1.0
    assert rep["T_monotone"]


def test_class_report_exclude():
    rep = class_report(ERDOS, np.linspace(-1, 1, 201), exclude=0.5)
    assert rep["points"] == 100
    with pytest.raises(ValueError):
        class_report(ERDOS, [0.1], exclude=0.5)


@given(spec_st, st.floats(-8, 8))
def test_even(spec, x):
    if x == 0:
        return
    a, b = q_jet(spec, x, budget=None), q_jet(spec, -x, budget=None)
    assert a.q == b.q and a.q2 == b.q2
    assert t_func(spec, x) == t_func(spec, -x)


@given(spec_st, st.floats(1e-3, 6))
def test_positive_derivatives(spec, x):
    if q_value(spec, x) > 600:
        return
    jet = q_jet(spec, x)
    assert jet.q1 > 0 and jet.q2 > 0


@given(st.floats(1.01, 8), st.floats(-50, 50).filter(lambda v: v != 0))
def test_freud_t_constant(alpha, x):
    assert abs(t_func(WeightSpec.freud(alpha), x) - alpha) <= 1e-12


@settings(max_examples=60)
@given(spec_st, st.floats(0.05, 6))
def test_derivatives_match_finite_differences(spec, x):
    if q_value(spec, x + 1e-3) > 1e6:
        return
    h = 1e-5 * max(1.0, x)
    lo, mid, hi = (q_jet(spec, v, budget=None) for v in (x - h, x, x + h))
    for k in range(1, 5):
        fd = (hi.derivative(k - 1) - lo.derivative(k - 1)) / (2 * h)
        exact = mid.derivative(k)
        if exact == 0:
            assert abs(fd) <= 1e-6 * max(1.0, abs(mid.derivative(k - 1)))
        else:
            assert abs(fd - exact) <= 1e-6 * abs(exact)


@given(st.sampled_from([ERDOS, WeightSpec.erdos(1, u=1), WeightSpec.erdos(2, l=2),
                        WeightSpec.erdos(0.5, u=1)]))
def test_erdos_t_monotone(spec):
    t = t_func(spec, np.linspace(1e-3, 4, 2000))
    assert np.all(np.diff(t) >= 0)


def test_t_finite_beyond_q_overflow():
    t = t_func(ERDOS, 40.0)
    assert math.isfinite(t) and t > 3000
