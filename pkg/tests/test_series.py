import math

import numpy as np
import pytest

from utils.series import (
    compose_series,
    derivative_series,
    power_series,
    prod_series,
)


def test_prod_series():
    # (1 + w)(1 - w) = 1 - w²
    result = prod_series(np.array([1.0, 1.0, 0.0, 0.0]), np.array([1.0, -1.0, 0.0, 0.0]))
    assert np.allclose(result, [1.0, 0.0, -1.0, 0.0])


def test_power_series_square_root():
    # sqrt(1 + w) = 1 + w/2 - w²/8 + w³/16
    result = power_series(np.array([1.0, 1.0, 0.0, 0.0]), 0.5)
    assert np.allclose(result, [1.0, 0.5, -0.125, 0.0625])


def test_power_series_complex_branch():
    series = np.array([-1.0 + 0j, 0.0, 0.0])
    result = power_series(series, 0.5)
    assert result[0] == pytest.approx(1j)


def test_compose_exp_of_log():
    N = 8
    log1p = np.array([0.0] + [(-1) ** (k + 1) / k for k in range(1, N)])
    exp = np.array([1.0 / math.factorial(k) for k in range(N)])
    result = compose_series(exp, log1p)
    expected = np.zeros(N)
    expected[:2] = 1.0
    assert np.allclose(result, expected, atol=1e-14)


def test_compose_requires_zero_constant():
    with pytest.raises(ValueError):
        compose_series(np.array([1.0, 1.0]), np.array([1.0, 1.0]))


def test_series_broadcast_over_points():
    series = np.array([[1.0, 2.0], [1.0, 1.0], [0.0, 0.0]])
    result = prod_series(series, series)
    assert np.allclose(result[:, 0], [1.0, 2.0, 1.0])
    assert np.allclose(result[:, 1], [4.0, 4.0, 1.0])


def test_derivative_series():
    series = np.array([1.0, 2.0, 3.0, 4.0])
    assert np.allclose(derivative_series(series), [2.0, 6.0, 12.0])
