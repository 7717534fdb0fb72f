from fractions import Fraction

import pytest

from hsagg.protocol import build_scheme, random_inputs, run_round
from hsagg.rates import RateTuple, achievable_rates, converse_bounds, measured_rates


def test_achievable_worked_values():
    assert achievable_rates(3, 2) == RateTuple(
        Fraction(1), Fraction(1, 2), Fraction(1, 2), Fraction(1)
    )
    for K in range(2, 9):
        assert achievable_rates(K, 1) == RateTuple(
            Fraction(1), Fraction(1), Fraction(1), Fraction(K - 1)
        )
    assert achievable_rates(4, 4) == RateTuple(
        Fraction(1), Fraction(1, 3), Fraction(1, 3), Fraction(1)
    )


def test_converse_worked_values():
    assert converse_bounds(8, 3).source_key == Fraction(5, 3)
    assert converse_bounds(2, 2).relay_upload == Fraction(1)
    assert converse_bounds(5, 5).relay_upload == Fraction(1, 4)
    assert converse_bounds(6, 2) == RateTuple(
        Fraction(1), Fraction(1, 2), Fraction(1, 2), Fraction(2)
    )


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        achievable_rates(3, 0)
    with pytest.raises(ValueError):
        achievable_rates(3, 4)
    with pytest.raises(ValueError):
        converse_bounds(0, 1)


def test_achievable_meets_bounds_with_equality_below_full():
    for K in range(2, 9):
        for B in range(1, K):
            ach = achievable_rates(K, B)
            lb = converse_bounds(K, B)
            assert ach == lb
            assert ach.gap_flags(lb) == ()


def test_full_association_gap_is_only_user_key():
    for K in range(2, 9):
        ach = achievable_rates(K, K)
        lb = converse_bounds(K, K)
        assert ach.dominates(lb)
        assert ach.gap_flags(lb) == ("RZ",)
        # within a factor of two of the bound
        assert ach.user_key <= 2 * lb.user_key


def test_monotonicity_in_association_count():
    for K in range(2, 9):
        tuples = [achievable_rates(K, B) for B in range(1, K)]
        for earlier, later in zip(tuples, tuples[1:]):
            assert later.relay_upload <= earlier.relay_upload
            assert later.user_key <= earlier.user_key
            assert later.source_key <= earlier.source_key
        assert all(t.source_key >= 1 for t in tuples)


def test_measured_rates_from_rounds():
    for (K, B) in [(3, 2), (5, 2), (6, 4), (4, 1), (5, 5)]:
        params = build_scheme(K, B)
        L = params.block_size * 2
        result = run_round(params, random_inputs(params, L, seed=3), seed=4)
        measured = measured_rates(result.transcript, L)
        assert measured == achievable_rates(K, B)
        assert measured.dominates(converse_bounds(K, B))


def test_rate_tuple_dict():
    d = achievable_rates(8, 3).to_dict()
    assert d == {"RX": "1", "RY": "1/3", "RZ": "1/3", "RZS": "5/3"}
