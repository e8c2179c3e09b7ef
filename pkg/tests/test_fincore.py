import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fairval import oracle
from fairval.fincore import (
    DomainError,
    annuity_pv,
    discount_factor,
    perpetuity_identity_residual,
    present_value,
)

rates = st.floats(min_value=1e-3, max_value=0.5, allow_nan=False)
periods = st.integers(min_value=1, max_value=200)


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


# -- discount_factor ---------------------------------------------------------


def test_discount_factor_identity():
    assert discount_factor(0.10, 0) == 1.0


def test_discount_factor_one_period():
    assert discount_factor(0.10, 1) == pytest.approx(1 / 1.1, rel=1e-15)


def test_discount_factor_three_periods_matches_oracle():
    expected = oracle.discount(Fraction(1, 10), 3)
    assert expected == Fraction(1000, 1331)
    assert rel(discount_factor(0.10, 3), float(expected)) <= 1e-12


@pytest.mark.parametrize("r", [-1.0, -1.5])
def test_discount_factor_rejects_rate_at_or_below_minus_one(r):
    with pytest.raises(DomainError):
        discount_factor(r, 1)


# -- annuity_pv --------------------------------------------------------------


def test_annuity_empty():
    assert annuity_pv(0, 0.10) == 0.0


def test_annuity_single_term():
    assert annuity_pv(1, 0.10) == pytest.approx(1 / 1.1, rel=1e-14)


def test_annuity_three_terms_matches_oracle():
    expected = oracle.annuity(3, Fraction(1, 10))
    assert expected == Fraction(3310, 1331)
    assert rel(annuity_pv(3, 0.10), float(expected)) <= 1e-12


def test_annuity_zero_rate_counts_payments():
    assert annuity_pv(7, 0.0) == 7.0


def test_annuity_domain():
    with pytest.raises(DomainError):
        annuity_pv(3, -1.0)


@given(periods, rates)
def test_annuity_recurrence(n, r):
    assert rel(annuity_pv(n, r), annuity_pv(n - 1, r) + discount_factor(r, n)) <= 1e-12


@given(st.integers(0, 60), st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(1, 2), max_denominator=1000))
def test_annuity_agrees_with_rational_oracle(n, r):
    expected = float(oracle.annuity(n, r))
    got = annuity_pv(n, float(r))
    assert got == expected or rel(got, expected) <= 1e-12


# -- present_value -----------------------------------------------------------


def test_present_value_empty():
    assert present_value([], 0.10) == 0.0


def test_present_value_level_stream_matches_oracle():
    expected = oracle.present_value([100, 100, 100], Fraction(1, 10))
    assert rel(present_value([100, 100, 100], 0.10), float(expected)) <= 1e-12
    assert float(expected) == pytest.approx(248.68519909842223, rel=1e-15)


@given(rates, st.integers(1, 100), st.floats(1.0, 1e6))
def test_present_value_of_interest_only_stream(r, K, X):
    # r*X each period for K periods: X * (1 - (1+r)**-K)
    got = present_value([r * X] * K, r)
    assert rel(got, X * -math.expm1(-K * math.log1p(r))) <= 1e-12


@given(
    st.lists(st.floats(-1e6, 1e6), min_size=0, max_size=40),
    st.lists(st.floats(-1e6, 1e6), min_size=0, max_size=40),
    rates,
)
def test_present_value_additive(s1, s2, r):
    n = max(len(s1), len(s2))
    a = s1 + [0.0] * (n - len(s1))
    b = s2 + [0.0] * (n - len(s2))
    total = present_value([x + y for x, y in zip(a, b)], r)
    parts = present_value(a, r) + present_value(b, r)
    scale = present_value([abs(x) + abs(y) for x, y in zip(a, b)], r)
    assert abs(total - parts) <= 1e-12 * max(scale, 1.0)


def test_present_value_domain():
    with pytest.raises(DomainError):
        present_value([1.0], -2.0)


# -- perpetuity_identity_residual ---------------------------------------------


def test_residual_single_term():
    assert perpetuity_identity_residual(0.10, 1) == pytest.approx(1 / 1.1, rel=1e-15)


def test_residual_fifty_terms():
    expected = float(oracle.discount(Fraction(1, 10), 50))
    assert expected == pytest.approx(8.5186e-3, rel=1e-4)
    assert abs(perpetuity_identity_residual(0.10, 50) - expected) <= 1e-12


def test_residual_two_hundred_terms():
    expected = oracle.discount(Fraction(1, 4), 200)
    assert expected < Fraction(1, 10**19)
    assert abs(perpetuity_identity_residual(0.25, 200) - float(expected)) <= 1e-12


@pytest.mark.parametrize("r", [0.0, -0.1])
def test_residual_rejects_nonpositive_rate(r):
    with pytest.raises(DomainError):
        perpetuity_identity_residual(r, 5)


@given(st.fractions(min_value=Fraction(1, 100), max_value=Fraction(1, 2), max_denominator=100), st.integers(1, 80))
def test_rational_partial_sum_identity_is_exact(r, K):
    assert 1 - oracle.perpetuity_partial_sum(r, K) == oracle.discount(r, K)


@given(rates, periods)
def test_residual_equals_discount_factor(r, K):
    assert abs(perpetuity_identity_residual(r, K) - discount_factor(r, K)) <= 1e-12


@given(rates, st.integers(1, 40))
def test_residual_relative_accuracy_while_well_conditioned(r, K):
    # each subtraction loses a factor (1+r) of relative accuracy
    d = discount_factor(r, K)
    if d < 1e-3:
        return
    assert rel(perpetuity_identity_residual(r, K), d) <= 1e-12
