import math

import numpy as np
import pytest

from coeffs import (
    MAX_J,
    c1_closed_form,
    c_coeffs,
    coeff_derivatives,
    mn_coeffs,
    phi_prime,
    reversion_residual,
    rs_coeffs,
    saddle,
    z_closed_forms,
    z_coeffs,
)
from params_core import RegimeConfig, bulk_interval, derive_params
from utils.exceptions import DomainError


def _random_samples(count: int, seed: int = 11):
    rng = np.random.default_rng(seed)
    samples = []
    while len(samples) < count:
        p = derive_params(int(rng.integers(20, 300)), *rng.uniform(0, 120, size=2))
        if p.sigma > 0.9 or abs(p.tau) > 0.9:
            continue
        lower, upper = bulk_interval(p, RegimeConfig(delta=0.05))
        samples.append((p, float(rng.uniform(lower, upper))))
    return samples


def test_saddle_is_stationary(params_25):
    s = saddle(params_25, -0.7415548)
    assert abs(phi_prime(params_25, s.x, s.z_plus)[0]) < 1e-12


def test_saddle_legendre_origin(legendre):
    s = saddle(legendre, 0.0)
    assert s.z_plus[0] == pytest.approx(1j, abs=1e-15)


def test_saddle_params_125_origin(params_125):
    u0 = math.sqrt(1 - params_125.sigma ** 2 - params_125.tau ** 2)
    s = saddle(params_125, 0.0)
    expected = complex(-params_125.tau, u0) / (1 + params_125.sigma)
    assert abs(s.z_plus[0] - expected) < 1e-14


def test_saddle_branch_matches_leading_term(params_25):
    s = saddle(params_25, np.array([-0.5, 0.0, 0.4]))
    u = np.sqrt((params_25.x_plus - s.x) * (s.x - params_25.x_minus))
    target = np.exp(0.25j * np.pi) / np.sqrt(2 * u)
    assert np.allclose(s.f0, target, rtol=1e-12)


def test_saddle_rejects_turning_point(params_25):
    with pytest.raises(DomainError):
        saddle(params_25, params_25.x_plus)


def test_z_coeffs_leading_terms(params_25):
    s = saddle(params_25, -0.5)
    z = z_coeffs(s, 3)
    assert z.shape == (9, 1)
    assert z[0, 0] == 0
    assert z[1, 0] == pytest.approx(s.z1[0], rel=1e-15)
    assert z[2, 0] == pytest.approx(-s.z1[0] ** 4 * s.phi_derivs[3, 0] / 6, rel=1e-12)


def test_z_closed_forms_random_samples():
    for p, x in _random_samples(20):
        s = saddle(p, x)
        z = z_coeffs(s, 3)
        for generic, closed in zip(z[2:5], z_closed_forms(s)):
            assert abs(generic[0] - closed[0]) <= 1e-9 * abs(closed[0])


def test_c1_closed_form_params_25(params_25):
    table = c_coeffs(params_25, -0.5, 3)
    closed = c1_closed_form(saddle(params_25, -0.5, 3))
    generic = complex(table.p[1, 0], table.q[1, 0])
    assert abs(generic - closed[0]) <= 1e-10 * abs(closed[0])


def test_c1_closed_form_random_samples():
    for p, x in _random_samples(20, seed=5):
        table = c_coeffs(p, x, 3)
        closed = c1_closed_form(saddle(p, x, 3))
        generic = complex(table.p[1, 0], table.q[1, 0])
        assert abs(generic - closed[0]) <= 1e-9 * abs(closed[0])


def test_reversion_identity():
    for p, x in _random_samples(10, seed=3):
        s = saddle(p, x, 3)
        residual = reversion_residual(s, z_coeffs(s, 3))
        assert np.max(residual) < 1e-12


def test_leading_coefficients(params_25):
    table = c_coeffs(params_25, np.array([-0.6, -0.1, 0.3]), 4)
    assert np.all(table.p[0] == 1.0)
    assert np.all(table.q[0] == 0.0)
    assert table.p.shape == (5, 3)


def test_legendre_first_coefficient(legendre):
    # θ = π/3: p1 = 0, q1 = -x / (8U)
    x = 0.5
    table = c_coeffs(legendre, x, 2)
    assert abs(table.p[1, 0]) < 1e-12
    assert table.q[1, 0] == pytest.approx(-x / (8 * math.sqrt(1 - x * x)), rel=1e-10)


def test_conjugate_saddle_gives_conjugate_coefficients(params_25):
    table = c_coeffs(params_25, -0.2, 3)
    conj = c_coeffs(params_25, -0.2, 3, conjugate=True)
    assert np.allclose(conj.p, table.p, rtol=1e-12, atol=1e-14)
    assert np.allclose(conj.q, -table.q, rtol=1e-12, atol=1e-14)


def test_truncation_limit(params_25):
    c_coeffs(params_25, 0.0, MAX_J)
    with pytest.raises(DomainError):
        c_coeffs(params_25, 0.0, MAX_J + 1)


def test_coeff_derivatives_are_smooth(params_25):
    x = np.array([-0.3])
    dp, dq = coeff_derivatives(params_25, x, 3)
    h = 1e-4
    plus = c_coeffs(params_25, x + h, 3)
    minus = c_coeffs(params_25, x - h, 3)
    coarse = (plus.q[1] - minus.q[1]) / (2 * h)
    assert dq[1, 0] == pytest.approx(coarse[0], rel=1e-4, abs=1e-6)
    assert dp[0, 0] == 0.0


def test_rs_coefficients(params_25):
    x = -0.5
    table = rs_coeffs(c_coeffs(params_25, x, 3), params_25)
    assert table.r[0, 0] == 1.0
    assert table.s[0, 0] == 0.0
    assert table.r[1, 0] == pytest.approx(table.p[1, 0], rel=1e-12)
    assert table.r.shape == (5, 1)

    def log_a(t):
        u2 = (params_25.x_plus - t) * (t - params_25.x_minus)
        return -0.5 * (50 * math.log1p(-t) + 41 * math.log1p(t) + 0.5 * math.log(u2))

    h = 1e-5
    a_log = (log_a(x + h) - log_a(x - h)) / (2 * h)
    u = math.sqrt((params_25.x_plus - x) * (x - params_25.x_minus))
    chi_prime = u / (1 - x * x)
    assert table.s[1, 0] - table.q[1, 0] == pytest.approx(a_log / chi_prime, rel=1e-7)


def test_mn_coefficients(params_25):
    x = -0.5
    table = mn_coeffs(c_coeffs(params_25, x, 3), params_25)
    assert table.m[0, 0] == 1.0
    assert table.nn[0, 0] == 0.0
    assert table.m[1, 0] == pytest.approx(table.p[1, 0], rel=1e-12)

    sigma, tau = params_25.sigma, params_25.tau
    u = math.sqrt((params_25.x_plus - x) * (x - params_25.x_minus))
    q_fun = ((1 - x * x) * (x + sigma * tau) - 2 * x * u * u) / (2 * u ** 3)
    assert table.nn[1, 0] == pytest.approx(table.q[1, 0] + q_fun, rel=1e-12)
