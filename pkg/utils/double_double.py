"""
双双精度（double-double）向量化算术

每个数用一对 float64 (hi, lo) 表示，hi + lo 为真值，|lo| <= ulp(hi)/2，
有效精度约 32 位十进制。所有函数都作用于 numpy 数组，逐元素计算。
"""

from dataclasses import dataclass

import mpmath
import numpy as np

# 2^27 + 1，Dekker 拆分常数
SPLITTER = 134217729.0
# mpf 与 (hi, lo) 互转时的工作精度
EXTENDED_DPS = 40


def two_sum(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """精确加法：返回 (s, err)，满足 s + err == a + b"""
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def quick_two_sum(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """要求 |a| >= |b| 的快速精确加法"""
    s = a + b
    err = b - (s - a)
    return s, err


def split(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Dekker 拆分：a = ahi + alo，两部分各不超过 27 位有效位"""
    c = SPLITTER * a
    abig = c - a
    ahi = c - abig
    alo = a - ahi
    return ahi, alo


def two_prod(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """精确乘法：返回 (p, err)，满足 p + err == a * b"""
    p = a * b
    ahi, alo = split(a)
    bhi, blo = split(b)
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def dd_add(ah, al, bh, bl) -> tuple[np.ndarray, np.ndarray]:
    s, e = two_sum(ah, bh)
    t, f = two_sum(al, bl)
    e = e + t
    s, e = quick_two_sum(s, e)
    e = e + f
    return quick_two_sum(s, e)


def dd_sub(ah, al, bh, bl) -> tuple[np.ndarray, np.ndarray]:
    return dd_add(ah, al, -bh, -bl)


def dd_mul(ah, al, bh, bl) -> tuple[np.ndarray, np.ndarray]:
    p, e = two_prod(ah, bh)
    e = e + (ah * bl + al * bh)
    return quick_two_sum(p, e)


def dd_div(ah, al, bh, bl) -> tuple[np.ndarray, np.ndarray]:
    """长除法：q1 = a/b 的首项，再用余数修正一次"""
    q1 = ah / bh
    ph, pl = dd_mul(bh, bl, q1, np.zeros_like(q1))
    rh, rl = dd_sub(ah, al, ph, pl)
    q2 = rh / bh
    ph, pl = dd_mul(bh, bl, q2, np.zeros_like(q2))
    rh, rl = dd_sub(rh, rl, ph, pl)
    q3 = rh / bh
    q1, q2 = quick_two_sum(q1, q2)
    return dd_add(q1, q2, q3, np.zeros_like(q3))


def dd_ldexp(h, l, exponent) -> tuple[np.ndarray, np.ndarray]:
    """乘以 2^exponent（精确）"""
    return np.ldexp(h, exponent), np.ldexp(l, exponent)


def split_mpf(value) -> tuple[float, float]:
    """把 mpmath 数拆成最接近的 (hi, lo) 对"""
    with mpmath.workdps(EXTENDED_DPS):
        hi = float(value)
        lo = float(mpmath.mpf(value) - hi)
    return hi, lo


@dataclass(frozen=True)
class DDArray:
    """双双精度数组"""
    hi: np.ndarray
    lo: np.ndarray

    def __len__(self) -> int:
        return len(self.hi)

    def __getitem__(self, index) -> "DDArray":
        return DDArray(np.atleast_1d(self.hi[index]), np.atleast_1d(self.lo[index]))

    def to_float(self) -> np.ndarray:
        return self.hi + self.lo

    def to_mpf(self) -> list:
        with mpmath.workdps(EXTENDED_DPS):
            return [mpmath.mpf(float(h)) + mpmath.mpf(float(l)) for h, l in zip(self.hi, self.lo)]

    def negated_reversed(self) -> "DDArray":
        return DDArray(-self.hi[::-1].copy(), -self.lo[::-1].copy())

    @classmethod
    def from_mpf(cls, values) -> "DDArray":
        pairs = [split_mpf(v) for v in values]
        hi = np.array([p[0] for p in pairs], dtype=float)
        lo = np.array([p[1] for p in pairs], dtype=float)
        return cls(hi, lo)

    @classmethod
    def from_float(cls, values) -> "DDArray":
        hi = np.asarray(values, dtype=float).copy()
        return cls(hi, np.zeros_like(hi))
