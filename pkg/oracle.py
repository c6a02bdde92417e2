"""
高精度参考解模块

Jacobi 多项式的三项递推在双双精度下向量化计算（约 32 位有效数字），
数值过大或过小时按 2^600 重新缩放并单独记录指数。
零点以 Golub–Welsch 特征值为初值、相邻初值中点为区间，做带区间保护的 Newton 迭代；
权重、矩与自洽检查用 mpmath 计算。
"""

import logging
import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np
from scipy.linalg import eigh_tridiagonal

from utils import config
from utils.double_double import DDArray, dd_add, dd_div, dd_ldexp, dd_mul, dd_sub, split_mpf
from utils.exceptions import DomainError, OracleBracketError, OracleSizeError

logger = logging.getLogger(__name__)

COEFF_DPS = 40
WEIGHT_DPS = 40
CHECK_DPS = 50
RESCALE_BITS = 600
RESCALE_HIGH = 2.0 ** RESCALE_BITS
RESCALE_LOW = 2.0 ** -RESCALE_BITS
NEWTON_TOL = 1e-28
NEWTON_STAGNATION = 1e-24
MAX_NEWTON_ITERATIONS = 60
CACHE_SIZE = 16


@dataclass(frozen=True)
class OracleValue:
    """
    高精度的 P_n(x) 与 P_n'(x)

    真值 = (hi + lo) * 2^exponent，各字段都是与 x 同长的数组。
    """
    value_hi: np.ndarray
    value_lo: np.ndarray
    value_exponent: np.ndarray
    derivative_hi: np.ndarray
    derivative_lo: np.ndarray
    derivative_exponent: np.ndarray

    def value_mpf(self) -> list:
        with mpmath.workdps(COEFF_DPS):
            return [mpmath.ldexp(mpmath.mpf(float(h)) + mpmath.mpf(float(l)), int(e))
                for h, l, e in zip(self.value_hi, self.value_lo, self.value_exponent)]

    def derivative_mpf(self) -> list:
        with mpmath.workdps(COEFF_DPS):
            return [mpmath.ldexp(mpmath.mpf(float(h)) + mpmath.mpf(float(l)), int(e))
                for h, l, e in zip(self.derivative_hi, self.derivative_lo, self.derivative_exponent)]

    def value_float(self) -> np.ndarray:
        return np.ldexp(self.value_hi + self.value_lo, self.value_exponent)

    def derivative_float(self) -> np.ndarray:
        return np.ldexp(self.derivative_hi + self.derivative_lo, self.derivative_exponent)


@dataclass(frozen=True)
class RecurrenceCoeffs:
    """P_k = (A_k x + B_k) P_{k-1} - C_k P_{k-2} 的双双精度系数，下标 0 不用"""
    n: int
    alpha: float
    beta: float
    a_hi: np.ndarray
    a_lo: np.ndarray
    b_hi: np.ndarray
    b_lo: np.ndarray
    c_hi: np.ndarray
    c_lo: np.ndarray


class _LRUCache:
    """OrderedDict 实现的线程安全 LRU 缓存"""

    def __init__(self, name: str, max_size: int = CACHE_SIZE):
        self.name = name
        self.max_size = max_size
        self._data: OrderedDict = OrderedDict()
        self._lock = threading.Lock()
        self.stats = {'hits': 0, 'misses': 0}

    def get(self, key):
        with self._lock:
            if key in self._data:
                self._data.move_to_end(key)
                self.stats['hits'] += 1
                logger.debug(f"{self.name} 缓存命中 | key: {key}")
                return self._data[key]
            self.stats['misses'] += 1
            return None

    def put(self, key, value) -> None:
        with self._lock:
            self._data[key] = value
            self._data.move_to_end(key)
            while len(self._data) > self.max_size:
                oldest, _ = self._data.popitem(last=False)
                logger.debug(f"{self.name} 缓存淘汰 | key: {oldest}")

    def clear(self) -> None:
        with self._lock:
            self._data.clear()
            self.stats = {'hits': 0, 'misses': 0}


_coeff_cache = _LRUCache("递推系数")
_node_cache = _LRUCache("参考零点")


def clear_caches() -> None:
    _coeff_cache.clear()
    _node_cache.clear()


def _check_params(n: int, alpha: float, beta: float) -> None:
    if int(n) != n or n < 0:
        raise DomainError(f"次数 n 必须是非负整数 | n: {n}")
    if not (alpha > -1 and beta > -1):
        raise DomainError(f"alpha, beta 必须 > -1 | alpha: {alpha}, beta: {beta}")


def _check_size(n: int) -> None:
    if n > config.oracle_max_n:
        raise OracleSizeError(n, config.oracle_max_n)


def recurrence_coeffs(n: int, alpha: float, beta: float) -> RecurrenceCoeffs:
    """
    三项递推系数，mpmath 40 位计算后拆成 (hi, lo)

    A_1 = (α+β+2)/2, B_1 = (α-β)/2, C_1 = 0；k >= 2 时记 s = 2k+α+β：
    A_k = (s-1)s / (2k(k+α+β))
    B_k = (s-1)(α²-β²) / (2k(k+α+β)(s-2))
    C_k = (k+α-1)(k+β-1)s / (k(k+α+β)(s-2))
    """
    key = (int(n), float(alpha), float(beta))
    cached = _coeff_cache.get(key)
    if cached is not None:
        return cached

    size = max(n, 1) + 1
    arrays = {name: np.zeros(size) for name in ("a_hi", "a_lo", "b_hi", "b_lo", "c_hi", "c_lo")}
    with mpmath.workdps(COEFF_DPS):
        a = mpmath.mpf(alpha)
        b = mpmath.mpf(beta)
        coeffs = {1: ((a + b + 2) / 2, (a - b) / 2, mpmath.mpf(0))}
        for k in range(2, n + 1):
            s = 2 * k + a + b
            denom = k * (k + a + b)
            coeffs[k] = (
                (s - 1) * s / (2 * denom),
                (s - 1) * (a * a - b * b) / (2 * denom * (s - 2)),
                (k + a - 1) * (k + b - 1) * s / (denom * (s - 2)),
            )
        for k, (ak, bk, ck) in coeffs.items():
            if k >= size:
                continue
            arrays["a_hi"][k], arrays["a_lo"][k] = split_mpf(ak)
            arrays["b_hi"][k], arrays["b_lo"][k] = split_mpf(bk)
            arrays["c_hi"][k], arrays["c_lo"][k] = split_mpf(ck)

    result = RecurrenceCoeffs(int(n), float(alpha), float(beta), **arrays)
    _coeff_cache.put(key, result)
    return result


def _recurrence(coeffs: RecurrenceCoeffs, xh: np.ndarray, xl: np.ndarray):
    """双双精度递推，返回 (hi, lo, exponent)"""
    n = coeffs.n
    p0h, p0l = np.ones_like(xh), np.zeros_like(xh)
    exponent = np.zeros(len(xh), dtype=int)
    if n == 0:
        return p0h, p0l, exponent

    th, tl = dd_mul(coeffs.a_hi[1], coeffs.a_lo[1], xh, xl)
    p1h, p1l = dd_add(th, tl, np.full_like(xh, coeffs.b_hi[1]), np.full_like(xh, coeffs.b_lo[1]))
    for k in range(2, n + 1):
        th, tl = dd_mul(coeffs.a_hi[k], coeffs.a_lo[k], xh, xl)
        th, tl = dd_add(th, tl, coeffs.b_hi[k], coeffs.b_lo[k])
        th, tl = dd_mul(th, tl, p1h, p1l)
        ch, cl = dd_mul(coeffs.c_hi[k], coeffs.c_lo[k], p0h, p0l)
        p2h, p2l = dd_sub(th, tl, ch, cl)
        p0h, p0l, p1h, p1l = p1h, p1l, p2h, p2l

        big = np.abs(p1h) > RESCALE_HIGH
        tiny = (np.abs(p1h) < RESCALE_LOW) & (np.abs(p0h) < RESCALE_LOW)
        if np.any(big) or np.any(tiny):
            shift = np.where(big, -RESCALE_BITS, np.where(tiny, RESCALE_BITS, 0))
            p0h, p0l = dd_ldexp(p0h, p0l, shift)
            p1h, p1l = dd_ldexp(p1h, p1l, shift)
            exponent -= shift
    return p1h, p1l, exponent


def _as_dd(x) -> DDArray:
    if isinstance(x, DDArray):
        return x
    if isinstance(x, np.ndarray):
        return DDArray.from_float(np.atleast_1d(x).astype(float).ravel())
    values = list(x) if isinstance(x, (list, tuple)) else [x]
    if any(isinstance(v, mpmath.mpf) for v in values):
        return DDArray.from_mpf(values)
    return DDArray.from_float(np.asarray(values, dtype=float))


def _evaluate(n: int, alpha: float, beta: float, xh: np.ndarray, xl: np.ndarray) -> OracleValue:
    vh, vl, ve = _recurrence(recurrence_coeffs(n, alpha, beta), xh, xl)
    if n == 0:
        zeros = np.zeros_like(xh)
        return OracleValue(vh, vl, ve, zeros, zeros.copy(), np.zeros(len(xh), dtype=int))
    dh, dl, de = _recurrence(recurrence_coeffs(n - 1, alpha + 1, beta + 1), xh, xl)
    with mpmath.workdps(COEFF_DPS):
        fh, fl = split_mpf((mpmath.mpf(n) + alpha + beta + 1) / 2)
    dh, dl = dd_mul(fh, fl, dh, dl)
    return OracleValue(vh, vl, ve, dh, dl, de)


def oracle_eval(n: int, alpha: float, beta: float, x) -> OracleValue:
    """
    P_n^{(α,β)}(x) 与导数的高精度值

    导数用 P_n' = (n+α+β+1)/2 · P_{n-1}^{(α+1,β+1)}；x 可以是 float、mpf、数组或 DDArray。
    """
    _check_params(n, alpha, beta)
    xd = _as_dd(x)
    if np.any(np.abs(xd.hi) > 1):
        raise DomainError(f"x 必须在 [-1, 1] 内 | x: {xd.hi[np.abs(xd.hi) > 1][0]}")
    return _evaluate(int(n), float(alpha), float(beta), xd.hi, xd.lo)


def golub_welsch_seeds(n: int, alpha: float, beta: float) -> np.ndarray:
    """
    Jacobi 矩阵特征值（升序），作为零点初值

    对角元 a_0 = (β-α)/(α+β+2)，a_k = (β²-α²)/((2k+α+β)(2k+α+β+2))；
    次对角元 b_k² = 4k(k+α)(k+β)(k+α+β) / ((2k+α+β)²(2k+α+β+1)(2k+α+β-1))，
    k = 1 时约去 (1+α+β)。
    """
    if n == 1:
        return np.array([(beta - alpha) / (alpha + beta + 2)])
    ab = alpha + beta
    k = np.arange(1, n, dtype=float)
    diag = np.empty(n)
    diag[0] = (beta - alpha) / (ab + 2)
    two_k = 2 * k + ab
    diag[1:] = (beta * beta - alpha * alpha) / (two_k * (two_k + 2))
    off2 = 4 * k * (k + alpha) * (k + beta) * (k + ab) / (two_k ** 2 * (two_k + 1) * (two_k - 1))
    off2[0] = 4 * (1 + alpha) * (1 + beta) / ((2 + ab) ** 2 * (3 + ab))
    eigenvalues = eigh_tridiagonal(diag, np.sqrt(off2), eigvals_only=True)
    return np.sort(eigenvalues)


def _sign(hi: np.ndarray) -> np.ndarray:
    return np.sign(hi)


def _newton(n: int, alpha: float, beta: float, x: DDArray,
            lower: DDArray, upper: DDArray) -> DDArray:
    """
    向量化的带区间 Newton 迭代

    每步 Δ = P/P'，新点越出区间时改用二分；|Δ| < 1e-28，
    或 |Δ| < 1e-24 且不再减小，或达到 60 次时停止。
    """
    xh, xl = x.hi.copy(), x.lo.copy()
    lh, ll = lower.hi.copy(), lower.lo.copy()
    uh, ul = upper.hi.copy(), upper.lo.copy()
    sign_lower = _sign(_evaluate(n, alpha, beta, lh, ll).value_hi)
    active = np.ones(len(xh), dtype=bool)
    last_step = np.full(len(xh), np.inf)

    for iteration in range(MAX_NEWTON_ITERATIONS):
        idx = np.flatnonzero(active)
        if len(idx) == 0:
            break
        value = _evaluate(n, alpha, beta, xh[idx], xl[idx])
        sign_x = _sign(value.value_hi)
        exact = sign_x == 0
        # 按 P(x) 的符号收缩区间
        move_lower = (sign_x == sign_lower[idx]) & ~exact
        lh[idx] = np.where(move_lower, xh[idx], lh[idx])
        ll[idx] = np.where(move_lower, xl[idx], ll[idx])
        uh[idx] = np.where(~move_lower & ~exact, xh[idx], uh[idx])
        ul[idx] = np.where(~move_lower & ~exact, xl[idx], ul[idx])

        with np.errstate(divide="ignore", invalid="ignore"):
            qh, ql = dd_div(value.value_hi, value.value_lo, value.derivative_hi, value.derivative_lo)
        qh, ql = dd_ldexp(qh, ql, value.value_exponent - value.derivative_exponent)
        qh = np.where(exact, 0.0, qh)
        ql = np.where(exact, 0.0, ql)
        nh, nl = dd_sub(xh[idx], xl[idx], qh, ql)

        inside = np.isfinite(nh) & (nh >= lh[idx]) & (nh <= uh[idx])
        mh, ml = dd_add(lh[idx], ll[idx], uh[idx], ul[idx])
        mh, ml = mh * 0.5, ml * 0.5
        xh[idx] = np.where(inside, nh, mh)
        xl[idx] = np.where(inside, nl, ml)

        step = np.where(inside, np.abs(qh), np.inf)
        converged = exact | (step < NEWTON_TOL) | ((step < NEWTON_STAGNATION) & (step >= last_step[idx]))
        last_step[idx] = step
        active[idx[converged]] = False
        logger.debug(
            f"参考零点 Newton | iteration: {iteration}, 未收敛: {int(np.sum(active))}, "
            f"max|Δ|: {float(np.max(np.where(np.isfinite(step), step, 0.0))):.3e}"
        )

    if np.any(active):
        logger.warning(f"参考零点 Newton 达到迭代上限 | 未收敛: {int(np.sum(active))}")
    return DDArray(xh, xl)


def _brackets(seeds: np.ndarray) -> tuple[DDArray, DDArray]:
    mids = 0.5 * (seeds[:-1] + seeds[1:])
    lower = np.concatenate([[-1.0], mids])
    upper = np.concatenate([mids, [1.0]])
    return DDArray.from_float(lower), DDArray.from_float(upper)


def _check_brackets(n: int, alpha: float, beta: float, lower: DDArray, upper: DDArray) -> None:
    sign_lower = _sign(_evaluate(n, alpha, beta, lower.hi, lower.lo).value_hi)
    sign_upper = _sign(_evaluate(n, alpha, beta, upper.hi, upper.lo).value_hi)
    bad = np.flatnonzero(sign_lower * sign_upper >= 0)
    if len(bad):
        ell = int(bad[0]) + 1
        raise OracleBracketError(ell, f"区间端点未变号 | lower: {lower.hi[ell - 1]}, upper: {upper.hi[ell - 1]}")


def _verify_nodes(n: int, alpha: float, beta: float, nodes: DDArray) -> None:
    """零点严格递增，且 P' 在相邻零点处符号交替、最右端为正"""
    dh, _ = dd_sub(nodes.hi[1:], nodes.lo[1:], nodes.hi[:-1], nodes.lo[:-1])
    bad = np.flatnonzero(dh <= 0)
    if len(bad):
        raise OracleBracketError(int(bad[0]) + 2, "零点未严格递增")
    deriv_sign = _sign(_evaluate(n, alpha, beta, nodes.hi, nodes.lo).derivative_hi)
    expected = np.where((n - np.arange(1, n + 1)) % 2 == 0, 1.0, -1.0)
    bad = np.flatnonzero(deriv_sign != expected)
    if len(bad):
        raise OracleBracketError(int(bad[0]) + 1, "导数符号未交替")


def oracle_nodes(n: int, alpha: float, beta: float) -> DDArray:
    """
    全部 n 个零点（双双精度，升序）

    初值来自 Golub–Welsch，与渐近代码互相独立。
    """
    _check_params(n, alpha, beta)
    if n < 1:
        raise DomainError(f"零点计算要求 n >= 1 | n: {n}")
    _check_size(n)
    key = (int(n), float(alpha), float(beta))
    cached = _node_cache.get(key)
    if cached is not None:
        return cached

    logger.info(f"计算参考零点 | n: {n}, alpha: {alpha}, beta: {beta}")
    seeds = golub_welsch_seeds(int(n), float(alpha), float(beta))
    lower, upper = _brackets(seeds)
    _check_brackets(int(n), float(alpha), float(beta), lower, upper)
    nodes = _newton(int(n), float(alpha), float(beta), DDArray.from_float(seeds), lower, upper)
    _verify_nodes(int(n), float(alpha), float(beta), nodes)
    _node_cache.put(key, nodes)
    return nodes


def polish_nodes(n: int, alpha: float, beta: float, starts, lower, upper) -> DDArray:
    """
    从给定初值与区间出发做高精度 Newton（混合模式用）

    starts, lower, upper 长度相同，区间端点必须使 P_n 变号。
    """
    _check_params(n, alpha, beta)
    _check_size(n)
    starts = _as_dd(starts)
    lower = _as_dd(lower)
    upper = _as_dd(upper)
    _check_brackets(int(n), float(alpha), float(beta), lower, upper)
    return _newton(int(n), float(alpha), float(beta), starts, lower, upper)


def _log_m_mp(n: int, alpha, beta):
    return (
        (alpha + beta + 1) * mpmath.log(2)
        + mpmath.loggamma(n + alpha + 1) + mpmath.loggamma(n + beta + 1)
        - mpmath.loggamma(n + alpha + beta + 1) - mpmath.loggamma(n + 1)
    )


def oracle_weights(n: int, alpha: float, beta: float, nodes) -> list:
    """经典权重 w = M / ((1-x²) P'(x)²)，mpmath 计算"""
    _check_params(n, alpha, beta)
    nodes = _as_dd(nodes)
    derivs = _evaluate(int(n), float(alpha), float(beta), nodes.hi, nodes.lo).derivative_mpf()
    with mpmath.workdps(WEIGHT_DPS):
        m_const = mpmath.exp(_log_m_mp(int(n), mpmath.mpf(alpha), mpmath.mpf(beta)))
        return [m_const / ((1 - x) * (1 + x) * d * d) for x, d in zip(nodes.to_mpf(), derivs)]


def oracle_scaled_weights(n: int, alpha: float, beta: float, nodes, weights: Optional[list] = None) -> np.ndarray:
    """
    缩放权重 ω = w / (M C² (1-x)^α (1+x)^β)，C² = 2^{-(α+β+1)} e^{2κψ}
    """
    nodes = _as_dd(nodes)
    if weights is None:
        weights = oracle_weights(n, alpha, beta, nodes)
    with mpmath.workdps(WEIGHT_DPS):
        a = mpmath.mpf(alpha)
        b = mpmath.mpf(beta)
        kappa = n + (a + b + 1) / 2
        sigma = (a + b) / (2 * kappa)
        tau = (a - b) / (2 * kappa)

        def g(t):
            return (1 - t) * mpmath.log(1 - t) + (1 + t) * mpmath.log(1 + t)

        two_kappa_psi = kappa * (g(sigma) - g(tau))
        log_mc2 = _log_m_mp(int(n), a, b) - (a + b + 1) * mpmath.log(2) + two_kappa_psi
        result = []
        for x, w in zip(nodes.to_mpf(), weights):
            log_wx = a * mpmath.log(1 - x) + b * mpmath.log(1 + x)
            result.append(float(w / mpmath.exp(log_mc2 + log_wx)))
    return np.array(result)


def moments(alpha: float, beta: float, kmax: int) -> list:
    """
    μ_k = ∫ x^k (1-x)^α (1+x)^β dx，k = 0..kmax

    μ_0 = 2^{α+β+1} B(α+1, β+1)，μ_{k+1} = (k μ_{k-1} + (β-α) μ_k) / (k+α+β+2)。
    递推有相消，工作精度随 kmax 提高。
    """
    if not (alpha > -1 and beta > -1):
        raise DomainError(f"alpha, beta 必须 > -1 | alpha: {alpha}, beta: {beta}")
    with mpmath.workdps(COEFF_DPS + kmax):
        a = mpmath.mpf(alpha)
        b = mpmath.mpf(beta)
        mu = [mpmath.power(2, a + b + 1) * mpmath.beta(a + 1, b + 1)]
        if kmax >= 1:
            mu.append((b - a) * mu[0] / (a + b + 2))
        for k in range(1, kmax):
            mu.append((k * mu[k - 1] + (b - a) * mu[k]) / (k + a + b + 2))
        return [+value for value in mu[: kmax + 1]]


def newton_check(n: int, alpha: float, beta: float, nodes) -> float:
    """
    自洽检查：50 位 mpmath 独立做一步 Newton，返回节点的最大变化量
    """
    nodes = _as_dd(nodes)
    with mpmath.workdps(CHECK_DPS):
        a = mpmath.mpf(alpha)
        b = mpmath.mpf(beta)
        factor = (n + a + b + 1) / 2
        worst = mpmath.mpf(0)
        for x in nodes.to_mpf():
            value = mpmath.jacobi(n, a, b, x)
            deriv = factor * mpmath.jacobi(n - 1, a + 1, b + 1, x)
            worst = max(worst, abs(value / deriv))
    return float(worst)
