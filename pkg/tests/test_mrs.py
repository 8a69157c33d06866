import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from expweights import (MrsTable, OverflowDomain, WeightSpec, lemma21_report, lemma26_fit,
                        mrs_number)
from expweights.mrs import growth_exponent, mrs_rhs
from expweights.weights import t_func

from conftest import ERDOS, FREUD2, FREUD4


def freud_rhs(alpha, a):
    # closed form of the MRS integral for Q = |x|^alpha
    return a ** alpha * alpha * math.gamma((alpha + 1) / 2) / (
        math.sqrt(math.pi) * math.gamma(alpha / 2 + 1))


def test_rhs_examples():
    assert mrs_rhs(FREUD2, 2.0) == pytest.approx(4.0, rel=1e-13)
    assert mrs_rhs(FREUD4, 1.0) == pytest.approx(1.5, rel=1e-13)
    for s in (FREUD2, FREUD4, ERDOS):
        assert mrs_rhs(s, 1e-9) < 1e-8


@settings(max_examples=40)
@given(st.floats(1.05, 8), st.floats(0.05, 20))
def test_rhs_matches_closed_form(alpha, a):
    assert mrs_rhs(WeightSpec.freud(alpha), a) == pytest.approx(freud_rhs(alpha, a),
                                                                 rel=1e-11)


def test_number_examples():
    assert abs(mrs_number(FREUD2, 4.0) - 2.0) <= 1e-10
    assert mrs_number(FREUD4, 4.0) == pytest.approx((8 / 3) ** 0.25, rel=1e-12)
    assert mrs_number(FREUD2, 1.0) == pytest.approx(1.0, rel=1e-12)


def test_number_rejects_nonpositive():
    with pytest.raises(ValueError):
        mrs_number(FREUD2, 0.0)
    with pytest.raises(ValueError):
        mrs_rhs(FREUD2, -1.0)


@pytest.mark.parametrize("spec", [FREUD2, FREUD4, WeightSpec.freud(1.5), ERDOS,
                                  WeightSpec.erdos(2, l=2), WeightSpec.erdos(1, u=1)])
def test_rhs_increasing_and_round_trip(spec):
    a = np.linspace(0.05, mrs_number(spec, 1e4), 60)
    r = [mrs_rhs(spec, v) for v in a]
    assert np.all(np.diff(r) > 0)
    for x in (0.3, 2.0, 50.0, 1e4):
        assert mrs_rhs(spec, mrs_number(spec, x)) == pytest.approx(x, rel=1e-9)


def test_rhs_overflow_raises():
    with pytest.raises(OverflowDomain):
        mrs_rhs(WeightSpec.erdos(2, l=2), 3.0)


@pytest.mark.parametrize("spec", [FREUD2, FREUD4, ERDOS])
def test_a_increasing_and_a_over_x_decreasing(spec):
    x = np.geomspace(0.5, 1e5, 40)
    a = np.array([mrs_number(spec, v) for v in x])
    assert np.all(np.diff(a) > 0)
    assert np.all(np.diff(a / x) < 0)


def test_erdos_growth_below_quarter_power():
    slope, const = growth_exponent(ERDOS, np.geomspace(1e2, 1e6, 9))
    assert slope < 0.25 and math.isfinite(const)


def test_table_caches_exact_keys():
    t = MrsTable(FREUD2)
    assert t(9) == pytest.approx(3.0, rel=1e-12)
    t.entries[9.0] = -1.0  # a cached value is returned as is
    assert t(9) == -1.0
    t2 = MrsTable(FREUD2).fill([1, 4, 9])
    rows = t2.rows()
    assert [r[0] for r in rows] == [1.0, 4.0, 9.0]
    for x, a, T, Q, res in rows:
        assert a == pytest.approx(math.sqrt(x), rel=1e-12)
        assert T == 2.0 and Q == pytest.approx(x, rel=1e-12) and abs(res) < 1e-12


def test_comparison_ratios_freud_example():
    rep = lemma21_report(FREUD2, [100.0], L=2.0)
    assert rep.ratios["Q_vs_t"][0] == pytest.approx(1 / math.sqrt(2), rel=1e-10)


def test_comparison_ratios_identity_for_L1():
    rep = lemma21_report(FREUD2, [3.0, 30.0, 300.0], L=1.0)
    for key in ("a", "Q", "T"):
        np.testing.assert_allclose(rep.ratios[key], 1.0, rtol=1e-14)
    assert np.all(np.isnan(rep.ratios["T_vs_gap"]))


def test_comparison_ratios_erdos_bands_finite():
    rep = lemma21_report(ERDOS, np.geomspace(10, 1e4, 13))
    bands = rep.bands()
    assert all(math.isfinite(v) and v >= 1 for v in bands.values())
    assert set(rep.to_dict()) == {"t", "L", "ratios", "bands"}


def test_derivative_growth_fit_examples():
    grid = np.geomspace(10, 1e4, 10)
    slope, ok = lemma26_fit(FREUD2, 2, grid)
    assert abs(slope) < 1e-12 and ok
    slope, ok = lemma26_fit(WeightSpec.freud(1.5), 0, grid)
    assert abs(slope) < 1e-12 and ok
    slope, ok = lemma26_fit(ERDOS, 2, grid)
    assert 0 < slope < 2 / 7 and ok


def test_derivative_growth_fit_needs_two_decades():
    with pytest.raises(ValueError):
        lemma26_fit(ERDOS, 2, [10, 100])
    with pytest.raises(ValueError):
        lemma26_fit(ERDOS, -1, [10, 1e4])


def test_erdos_t_grows_slowly_at_mrs_numbers():
    t = [t_func(ERDOS, mrs_number(ERDOS, n)) for n in (10, 100, 1000, 10000)]
    assert np.all(np.diff(t) > 0) and t[-1] < 20
