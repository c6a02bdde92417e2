import math

from utils.summation import CompensatedSum, compensated_sum


def test_compensated_sum_recovers_small_terms():
    values = [1.0] + [1e-16] * 10000
    assert abs(compensated_sum(values) - 1.0 - 1e-12) < 1e-15


def test_compensated_sum_is_order_insensitive():
    values = [1e100, 1.0, -1e100]
    assert compensated_sum(values) == 1.0


def test_incremental_matches_fsum():
    values = [0.1 * k * (-1) ** k for k in range(1, 2000)]
    total = CompensatedSum()
    for value in values:
        total.add(value)
    expected = math.fsum(values)
    assert abs(total.value - expected) <= 1e-15 * abs(expected)
