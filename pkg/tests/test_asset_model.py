from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from fairval import oracle
from fairval.asset_model import (
    AssetSpec,
    active_value,
    decompose,
    passive_value,
    pure_profit,
    with_arbitrage_cost,
)
from fairval.fincore import annuity_pv

R = 0.10

# RK = 100 throughout; pure profit 0 and 50 respectively
BREAK_EVEN = AssetSpec(K=100, R=1, S=0, n=3, P=10, Q=100, VC=850, W=1, L=50)
PROFITABLE = replace(BREAK_EVEN, VC=800)


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


def test_passive_rental_only():
    expected = oracle.asset_values(100, 0, 3, Fraction(1, 10), 0, 0, 0)["passive_value"]
    assert rel(passive_value(BREAK_EVEN, R), float(expected)) <= 1e-12
    assert passive_value(BREAK_EVEN, R) == pytest.approx(248.68519909842223, rel=1e-14)


def test_passive_salvage_only():
    a = AssetSpec(K=0, R=0, S=1331, n=3)
    assert passive_value(a, R) == pytest.approx(1000.0, rel=1e-14)


def test_passive_rental_and_salvage():
    a = replace(BREAK_EVEN, S=1331)
    assert passive_value(a, R) == pytest.approx(1248.6851990984223, rel=1e-12)


@pytest.mark.parametrize(
    "spec, expected",
    [
        (BREAK_EVEN, 0.0),
        (PROFITABLE, 50.0),
        (AssetSpec(P=1, Q=1, K=100, R=1, VC=0, W=0, L=0), -99.0),
    ],
)
def test_pure_profit(spec, expected):
    assert pure_profit(spec) == expected


def test_active_equals_passive_at_break_even():
    assert active_value(BREAK_EVEN, R) == pytest.approx(passive_value(BREAK_EVEN, R), rel=1e-14)


def test_active_profitable_matches_oracle():
    expected = oracle.asset_values(100, 0, 3, Fraction(1, 10), 1000, 800, 50)["active_value"]
    assert expected == Fraction(496500, 1331)
    assert rel(active_value(PROFITABLE, R), float(expected)) <= 1e-12


def test_active_all_zero():
    assert active_value(AssetSpec(), R) == 0.0


def test_decompose_break_even_has_no_goodwill():
    assert decompose(BREAK_EVEN, R).goodwill_simple == 0.0


def test_decompose_profitable_goodwill():
    expected = oracle.asset_values(100, 0, 3, Fraction(1, 10), 1000, 800, 50)["goodwill_simple"]
    assert rel(decompose(PROFITABLE, R).goodwill_simple, float(expected)) <= 1e-12
    assert float(expected) == pytest.approx(124.34259954921112, rel=1e-15)


def test_higher_wage_bill_lowers_goodwill_by_its_annuity_value():
    before = decompose(PROFITABLE, R).goodwill_simple
    after = decompose(replace(PROFITABLE, W=1.4), R).goodwill_simple  # WL up by 20
    assert before - after == pytest.approx(20 * annuity_pv(3, R), rel=1e-12)


def test_arbitrage_gap_reported_not_raised():
    v = decompose(replace(PROFITABLE, C=300.0), R)
    assert v.arbitrage_gap == pytest.approx(300.0 - v.passive_value)
    assert decompose(with_arbitrage_cost(PROFITABLE, R), R).arbitrage_gap == 0.0


@pytest.mark.parametrize("field, value", [("n", 0), ("K", -1.0), ("S", -1.0), ("L", -1.0)])
def test_spec_rejects_invalid(field, value):
    with pytest.raises(ValueError):
        replace(BREAK_EVEN, **{field: value})


money = st.floats(0, 1e5, allow_nan=False)
specs = st.builds(
    AssetSpec,
    K=money, R=st.floats(0, 50), S=money, n=st.integers(1, 60),
    P=st.floats(0, 100), Q=money, VC=money, W=st.floats(0, 100), L=st.floats(0, 1000),
)
rates = st.floats(0.001, 0.5)


@given(specs, rates)
def test_active_is_passive_plus_discounted_profit(a, r):
    v = decompose(a, r)
    lhs = v.active_value
    rhs = v.passive_value + v.pure_profit_per_year * annuity_pv(a.n, r)
    scale = max(abs(lhs), abs(rhs), abs(v.passive_value), a.revenue * annuity_pv(a.n, r), 1.0)
    assert abs(lhs - rhs) <= 1e-9 * scale
    assert abs(v.active_value - (v.passive_value + v.goodwill_simple)) <= 1e-9 * scale


@given(specs, rates, st.floats(1, 1e4))
def test_values_nondecreasing_in_salvage(a, r, bump):
    b = replace(a, S=a.S + bump)
    assert passive_value(b, r) >= passive_value(a, r)
    assert active_value(b, r) >= active_value(a, r)


@given(specs, rates, st.floats(1, 1e4))
def test_active_nondecreasing_in_revenue(a, r, extra_q):
    assume(a.P > 0)
    assert active_value(replace(a, Q=a.Q + extra_q), r) >= active_value(a, r)


@given(specs, rates, st.floats(0.5, 1e3))
def test_goodwill_strictly_decreasing_in_wage_bill(a, r, extra_l):
    assume(a.W >= 0.01)
    before = decompose(a, r).goodwill_simple
    after = decompose(replace(a, L=a.L + extra_l), r).goodwill_simple
    assert after < before
