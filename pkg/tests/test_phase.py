import math

import mpmath
import numpy as np
import pytest

from params_core import RegimeConfig, bulk_interval, derive_params
from phase import chi, chi_prime, invert_chi, phase_value, psi, u_func, xi
from utils.exceptions import DomainError


def test_u_at_turning_point_and_vertex(params_125):
    assert u_func(params_125, params_125.x_plus) == 0.0
    vertex = -params_125.sigma * params_125.tau
    expected = math.sqrt((1 - params_125.sigma ** 2) * (1 - params_125.tau ** 2))
    assert u_func(params_125, vertex) == pytest.approx(expected, rel=1e-15)


def test_u_matches_extended_precision(params_25):
    x = -0.7415548
    with mpmath.workdps(40):
        s = mpmath.mpf(params_25.sigma)
        t = mpmath.mpf(params_25.tau)
        exact = mpmath.sqrt((1 - s * s) * (1 - t * t) - (x + s * t) ** 2)
    assert u_func(params_25, x) == pytest.approx(float(exact), rel=1e-14)


def test_u_outside_interval(params_25):
    with pytest.raises(DomainError):
        u_func(params_25, 0.9)


def test_chi_left_endpoint(params_125):
    value = chi(params_125, params_125.x_minus)
    assert value == -(1 - params_125.sigma) * math.pi
    assert round(value, 3) == -1.896


def test_chi_symmetric_midpoint():
    p = derive_params(40, 30, 30)
    assert chi(p, 0.0) == pytest.approx(-(1 - p.sigma) * math.pi / 2, rel=1e-14)


def test_chi_legendre_is_minus_arccos(legendre):
    thetas = np.linspace(0.1, math.pi - 0.1, 9)
    values = chi(legendre, np.cos(thetas))
    assert np.allclose(values, -thetas, rtol=1e-13, atol=0)


def test_chi_monotone(params_25):
    xs = np.linspace(params_25.x_minus, params_25.x_plus, 400)
    values = chi(params_25, xs)
    assert np.all(np.diff(values) > 0)
    assert values[-1] == 0.0


def test_chi_prime_legendre_origin(legendre):
    assert chi_prime(legendre, 0.0) == 1.0


def test_chi_prime_matches_finite_difference(params_25):
    lower, upper = bulk_interval(params_25, RegimeConfig())
    h = 1e-6 * params_25.span
    for x in np.linspace(lower, upper, 11):
        fd = (chi(params_25, x + h) - chi(params_25, x - h)) / (2 * h)
        assert abs(chi_prime(params_25, x) - fd) <= 1e-7 * chi_prime(params_25, x)


def test_chi_prime_vanishes_at_turning_point(params_25):
    x = params_25.x_plus - 1e-12
    assert chi_prime(params_25, x) < 1e-5


def test_psi_zero_for_legendre(legendre):
    assert psi(legendre).psi == 0.0


def test_psi_matches_extended_precision(params_25):
    with mpmath.workdps(40):
        s = mpmath.mpf(params_25.sigma)
        t = mpmath.mpf(params_25.tau)
        exact = ((1 + s) * mpmath.log(1 + s) + (1 - s) * mpmath.log(1 - s)
                 - (1 + t) * mpmath.log(1 + t) - (1 - t) * mpmath.log(1 - t)) / 2
    assert psi(params_25).psi == pytest.approx(float(exact), rel=1e-14)
    assert psi(params_25).two_kappa_psi == pytest.approx(2 * 71 * float(exact), rel=1e-14)


def test_psi_even_in_tau(params_25):
    assert psi(params_25).psi == pytest.approx(psi(params_25.swapped()).psi, rel=1e-15)


def test_xi_identities(params_25):
    assert xi(params_25, 0.0) == 0.0
    x = 0.5
    lhs = math.exp(-params_25.kappa * xi(params_25, x))
    rhs = math.sqrt((1 - x) ** 50 * (1 + x) ** 41)
    assert lhs == pytest.approx(rhs, rel=1e-12)

    symmetric = derive_params(30, 20, 20)
    assert xi(symmetric, 0.3) == pytest.approx(xi(symmetric, -0.3), rel=1e-15)


def test_invert_chi_params_25(params_25):
    x = invert_chi(params_25, -1.095133, -0.7667437)
    assert x == pytest.approx(-0.7415548, abs=2e-6)


def test_invert_chi_endpoints(params_25, legendre):
    left = -(1 - params_25.sigma) * math.pi
    assert invert_chi(params_25, left, 0.0) == params_25.x_minus
    assert invert_chi(legendre, -math.pi / 2, 0.3) == pytest.approx(0.0, abs=1e-14)


def test_invert_chi_round_trip(medium):
    lower, upper = bulk_interval(medium, RegimeConfig())
    for x in np.linspace(lower, upper, 17):
        target = chi(medium, x)
        assert invert_chi(medium, target, 0.5 * (lower + upper)) == pytest.approx(x, abs=1e-13)


def test_invert_chi_out_of_range(params_25):
    with pytest.raises(DomainError):
        invert_chi(params_25, 0.1, 0.0)


def test_phase_value_bundle(params_25):
    value = phase_value(params_25, 0.1)
    assert value.chi == chi(params_25, 0.1)
    assert value.chi_prime == chi_prime(params_25, 0.1)
