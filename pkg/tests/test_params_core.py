import math

import numpy as np
import pytest

from params_core import (
    IN_BULK,
    NEAR_LEFT_TP,
    NEAR_RIGHT_TP,
    OUT_OF_REGIME,
    RegimeConfig,
    bulk_interval,
    classify_points,
    derive_params,
    parameters_in_regime,
    validate_regime,
)
from utils.exceptions import DomainError


def test_params_25_parameters(params_25):
    assert params_25.kappa == 71
    assert params_25.sigma == 91 / 142
    assert params_25.tau == 9 / 142


def test_params_125_turning_points(params_125):
    assert params_125.kappa == 208
    assert params_125.sigma == pytest.approx(165 / 416, rel=1e-15)
    assert params_125.tau == pytest.approx(15 / 416, rel=1e-15)
    assert params_125.x_minus == pytest.approx(-0.931, abs=1e-3)
    assert params_125.x_plus == pytest.approx(0.903, abs=1e-3)


def test_legendre_turning_points(legendre):
    assert legendre.kappa == 10.5
    assert legendre.sigma == 0
    assert legendre.tau == 0
    assert legendre.x_minus == -1.0
    assert legendre.x_plus == 1.0


@pytest.mark.parametrize("n, alpha, beta", [(-1, 0, 0), (2.5, 0, 0), (5, -1, 0), (5, 0, -1.5)])
def test_invalid_parameters(n, alpha, beta):
    with pytest.raises(DomainError):
        derive_params(n, alpha, beta)


def test_turning_points_are_roots(params_125):
    for x in (params_125.x_minus, params_125.x_plus):
        u2 = (1 - params_125.sigma ** 2) * (1 - params_125.tau ** 2) - (x + params_125.sigma * params_125.tau) ** 2
        assert abs(u2) < 1e-14


def test_swapped_and_shifted(params_25):
    swapped = params_25.swapped()
    assert swapped.tau == -params_25.tau
    assert swapped.x_minus == pytest.approx(-params_25.x_plus, abs=1e-15)
    shifted = params_25.shifted()
    assert (shifted.n, shifted.alpha, shifted.beta) == (24, 51, 42)


def test_turning_point_bounds_random():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(1, 500))
        alpha, beta = rng.uniform(0, 300, size=2)
        p = derive_params(n, alpha, beta)
        assert -1 <= p.x_minus <= p.x_plus <= 1
        assert p.sigma ** 2 + p.tau ** 2 <= 1 + 2 * abs(p.sigma * p.tau)
        root = math.sqrt((1 - p.sigma ** 2) * (1 - p.tau ** 2))
        assert (p.x_minus >= 0) == (-p.sigma * p.tau >= root)


def test_classification_examples(params_25, params_125):
    cfg = RegimeConfig(delta=0.05)
    assert validate_regime(params_25, cfg, 0.0).label == IN_BULK
    assert validate_regime(params_25, cfg, params_25.x_minus).label == NEAR_LEFT_TP
    assert validate_regime(params_25, cfg, params_25.x_plus).label == NEAR_RIGHT_TP
    assert validate_regime(params_125, cfg, 0.95).label == OUT_OF_REGIME


def test_bulk_interval_and_batch(medium):
    cfg = RegimeConfig(delta=0.1)
    lower, upper = bulk_interval(medium, cfg)
    assert lower == pytest.approx(medium.x_minus + 0.1 * medium.span)
    assert upper == pytest.approx(medium.x_plus - 0.1 * medium.span)
    labels = classify_points(medium, cfg, [lower - 1e-3, 0.0, upper + 1e-3, 1.5])
    assert labels == [NEAR_LEFT_TP, IN_BULK, NEAR_RIGHT_TP, OUT_OF_REGIME]


def test_parameters_out_of_regime():
    p = derive_params(20, 1000, 0)
    cfg = RegimeConfig()
    assert not parameters_in_regime(p, cfg)
    # 参数越界时所有点都标为 out_of_regime
    assert classify_points(p, cfg, [0.5 * (p.x_minus + p.x_plus)]) == [OUT_OF_REGIME]


@pytest.mark.parametrize("kwargs", [{"delta": 0}, {"delta": 1.2}, {"sigma0": 1.0}, {"tau0": 0}, {"J": -1}])
def test_regime_config_validation(kwargs):
    with pytest.raises(DomainError):
        RegimeConfig(**kwargs)
