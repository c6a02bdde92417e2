from fractions import Fraction

import mpmath
import numpy as np

from utils.double_double import DDArray, dd_add, dd_div, dd_mul, split_mpf, two_prod, two_sum


def test_two_sum_is_exact():
    a = np.array([1.0, 1e16, 0.1])
    b = np.array([1e-17, 1.0, 0.2])
    s, err = two_sum(a, b)
    for ai, bi, si, ei in zip(a, b, s, err):
        assert Fraction(si) + Fraction(ei) == Fraction(ai) + Fraction(bi)


def test_two_prod_is_exact():
    a = np.array([0.1, 3.0, 1.0 / 3.0])
    b = np.array([0.7, 1.0 / 7.0, 3.0])
    p, err = two_prod(a, b)
    for ai, bi, pi, ei in zip(a, b, p, err):
        assert Fraction(pi) + Fraction(ei) == Fraction(ai) * Fraction(bi)


def test_dd_arithmetic_matches_mpmath():
    with mpmath.workdps(40):
        third = mpmath.mpf(1) / 3
        seventh = mpmath.mpf(1) / 7
    ah, al = split_mpf(third)
    bh, bl = split_mpf(seventh)
    a = (np.array([ah]), np.array([al]))
    b = (np.array([bh]), np.array([bl]))

    with mpmath.workdps(40):
        for (h, l), exact in (
            (dd_add(*a, *b), third + seventh),
            (dd_mul(*a, *b), third * seventh),
            (dd_div(*a, *b), third / seventh),
        ):
            value = mpmath.mpf(float(h[0])) + mpmath.mpf(float(l[0]))
            assert abs(value - exact) / abs(exact) < 1e-30


def test_split_mpf_keeps_low_limb():
    with mpmath.workdps(40):
        value = mpmath.mpf(2) / 3
    hi, lo = split_mpf(value)
    assert hi == 2.0 / 3.0
    assert lo != 0.0
    assert abs(lo) <= np.spacing(hi)

    round_trip = DDArray.from_mpf([value]).to_mpf()[0]
    with mpmath.workdps(40):
        assert abs(round_trip - value) < mpmath.mpf(10) ** -31


def test_negated_reversed():
    values = DDArray(np.array([-0.5, 0.25, 1.0]), np.array([1e-20, 0.0, -1e-18]))
    flipped = values.negated_reversed()
    assert list(flipped.hi) == [-1.0, -0.25, 0.5]
    assert list(flipped.lo) == [1e-18, -0.0, -1e-20]
