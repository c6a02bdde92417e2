"""
相位与包络函数模块

计算 U(x)、相位 χ(x) 及其导数、参数常数 ψ 与 ξ(x)，
并用带区间保护的 Newton 迭代反解 χ(x) = target。
"""

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from params_core import JacobiParams
from utils.arrays import as_array, restore
from utils.exceptions import ConvergenceError, DomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# 转折点处的容差（4 ulp）
TURNING_POINT_TOL = 4 * np.finfo(float).eps
# ψ 的级数切换阈值与截断阈值
PSI_SERIES_THRESHOLD = 0.125
PSI_SERIES_CUTOFF = 1e-18
MAX_INVERT_ITERATIONS = 100


@dataclass(frozen=True)
class PhaseValue:
    x: ArrayLike
    u: ArrayLike
    chi: ArrayLike
    chi_prime: ArrayLike
    xi: ArrayLike


@dataclass(frozen=True)
class PsiValue:
    psi: float
    two_kappa_psi: float


def _check_closed(p: JacobiParams, xs: np.ndarray) -> None:
    bad = (xs < p.x_minus - TURNING_POINT_TOL) | (xs > p.x_plus + TURNING_POINT_TOL) | np.isnan(xs)
    if np.any(bad):
        x_bad = xs[bad][0]
        raise DomainError(
            f"x 超出转折点区间 | x: {x_bad}, x-: {p.x_minus}, x+: {p.x_plus}"
        )


def _check_open(p: JacobiParams, xs: np.ndarray) -> None:
    bad = ~((xs > p.x_minus) & (xs < p.x_plus))
    if np.any(bad):
        x_bad = xs[bad][0]
        raise DomainError(
            f"x 必须严格位于转折点之间 | x: {x_bad}, x-: {p.x_minus}, x+: {p.x_plus}"
        )


def _u(p: JacobiParams, xs: np.ndarray) -> np.ndarray:
    # 因式形式在转折点附近没有相消误差
    product = (p.x_plus - xs) * (xs - p.x_minus)
    return np.sqrt(np.maximum(product, 0.0))


def _chi_interior(p: JacobiParams, xs: np.ndarray, u: np.ndarray) -> np.ndarray:
    sigma, tau = p.sigma, p.tau
    return (
        (tau + 1) * np.arctan(u / (1 - xs + sigma + tau))
        + (tau - 1) * np.arctan(u / (1 + xs + sigma - tau))
        + (1 - sigma) * np.arctan2(-u, tau + xs * sigma)
    )


def u_func(p: JacobiParams, x: ArrayLike) -> ArrayLike:
    """U(x) = sqrt((x+ - x)(x - x-))"""
    xs, scalar = as_array(x)
    _check_closed(p, xs)
    return restore(_u(p, xs), scalar)


def chi(p: JacobiParams, x: ArrayLike) -> ArrayLike:
    """
    相位函数 χ(x)，在 [x-, x+] 上从 -(1-σ)π 单调增加到 0

    第三项用 atan2，因为 τ + xσ 可能为负。转折点上直接返回极限值。
    """
    xs, scalar = as_array(x)
    _check_closed(p, xs)
    out = np.empty_like(xs)
    left = xs <= p.x_minus
    right = xs >= p.x_plus
    middle = ~(left | right)
    out[left] = -(1 - p.sigma) * np.pi
    out[right] = 0.0
    xm = xs[middle]
    out[middle] = _chi_interior(p, xm, _u(p, xm))
    return restore(out, scalar)


def chi_prime(p: JacobiParams, x: ArrayLike) -> ArrayLike:
    """χ'(x) = U(x) / (1 - x^2)"""
    xs, scalar = as_array(x)
    _check_open(p, xs)
    return restore(_u(p, xs) / ((1 - xs) * (1 + xs)), scalar)


def _g_even(t: float) -> float:
    """(1-t)ln(1-t) + (1+t)ln(1+t)，小 |t| 时用偶次级数"""
    if abs(t) < PSI_SERIES_THRESHOLD:
        t2 = t * t
        power = t2
        total = 0.0
        k = 1
        while True:
            term = power / (k * (2 * k - 1))
            total += term
            if term <= PSI_SERIES_CUTOFF * total or term == 0.0:
                break
            k += 1
            power *= t2
        return total
    return (1 - t) * math.log1p(-t) + (1 + t) * math.log1p(t)


def psi(p: JacobiParams) -> PsiValue:
    """参数常数 ψ(σ, τ)，关于 τ 为偶函数"""
    if not (abs(p.sigma) < 1 and abs(p.tau) < 1):
        raise DomainError(f"σ 与 |τ| 必须小于 1 | sigma: {p.sigma}, tau: {p.tau}")
    value = 0.5 * (_g_even(p.sigma) - _g_even(p.tau))
    return PsiValue(psi=value, two_kappa_psi=2 * p.kappa * value)


def xi(p: JacobiParams, x: ArrayLike) -> ArrayLike:
    """ξ(x)，满足 exp(-κξ) = sqrt((1-x)^α (1+x)^β)"""
    xs, scalar = as_array(x)
    if np.any(~(np.abs(xs) < 1)):
        raise DomainError(f"ξ 只在 (-1, 1) 内有定义 | x: {xs[~(np.abs(xs) < 1)][0]}")
    out = -0.5 * (p.sigma + p.tau) * np.log1p(-xs) - 0.5 * (p.sigma - p.tau) * np.log1p(xs)
    return restore(out, scalar)


def phase_value(p: JacobiParams, x: ArrayLike) -> PhaseValue:
    """内点处的相位数据打包"""
    return PhaseValue(
        x=x,
        u=u_func(p, x),
        chi=chi(p, x),
        chi_prime=chi_prime(p, x),
        xi=xi(p, x),
    )


def invert_chi(p: JacobiParams, target: float, x0: float) -> float:
    """
    反解 χ(x) = target

    Newton 步 x <- x - (χ(x) - target) / χ'(x)，始终维护包含根的区间，
    步长越界时退回二分。残差达到容差后再做一次 Newton 修正。

    Args:
        p: 参数
        target: 目标相位，须在 [-(1-σ)π, 0] 内
        x0: 初始值

    Returns:
        满足 |χ(x) - target| <= 1e-14 * max(1, |target|) 的 x
    """
    chi_left = -(1 - p.sigma) * math.pi
    scale = max(1.0, abs(target))
    if not (chi_left - TURNING_POINT_TOL * scale <= target <= TURNING_POINT_TOL * scale):
        raise DomainError(f"目标相位超出范围 | target: {target}, 范围: [{chi_left}, 0]")
    if target <= chi_left:
        return p.x_minus
    if target >= 0.0:
        return p.x_plus

    tol = 1e-14 * scale
    lower, upper = p.x_minus, p.x_plus
    x = float(x0)
    if not lower < x < upper:
        x = 0.5 * (lower + upper)

    for iteration in range(MAX_INVERT_ITERATIONS):
        xs = np.array([x])
        u = _u(p, xs)
        residual = float(_chi_interior(p, xs, u)[0]) - target
        derivative = float(u[0] / ((1 - x) * (1 + x)))
        if residual < 0:
            lower = x
        else:
            upper = x
        newton_ok = derivative > 0
        if newton_ok:
            candidate = x - residual / derivative
        if abs(residual) <= tol:
            if newton_ok and lower <= candidate <= upper:
                x = candidate
            logger.debug(f"χ 反解收敛 | target: {target:.15g}, x: {x:.17g}, 迭代: {iteration}")
            return x
        if newton_ok and lower < candidate < upper:
            x = candidate
        else:
            x = 0.5 * (lower + upper)

    raise ConvergenceError(
        f"χ 反解未收敛 | target: {target}, 迭代: {MAX_INVERT_ITERATIONS}, x: {x}"
    )
