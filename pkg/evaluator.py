"""
渐近求值模块

由系数表组装 P_n^{(α,β)}(x)、其导数，以及缩放函数 v(x) 与 v'(x)。
包络在对数空间计算，超出浮点范围时只返回对数分量。
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from coeffs import c_coeffs, mn_coeffs, rs_coeffs
from params_core import JacobiParams, RegimeConfig, RegimeReport, classify_reports
from phase import chi, psi, u_func
from utils.arrays import as_array, restore
from utils.exceptions import DomainError, RegimeError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# exp 的安全指数上限
LOG_REPRESENTABLE = 700.0
SAME_PARAMS = "same"
SHIFTED_PARAMS = "shifted"
LN2 = math.log(2.0)


@dataclass(frozen=True)
class EvalResult:
    """
    渐近求值结果

    value = envelope * w_osc；包络不可表示时 value 为 NaN，
    log_envelope 与 w_osc 仍然有效。
    """
    value: ArrayLike
    envelope: ArrayLike
    log_envelope: ArrayLike
    w_osc: ArrayLike
    representable: Union[bool, np.ndarray]
    order_used: int
    regime: tuple[RegimeReport, ...]


@dataclass(frozen=True)
class _Oscillation:
    """单次求值共享的中间量"""
    xs: np.ndarray
    u: np.ndarray
    chi_prime: np.ndarray
    cos_theta: np.ndarray
    sin_theta: np.ndarray
    log_weight: np.ndarray


def _check_interior(p: JacobiParams, xs: np.ndarray) -> None:
    bad = ~((xs > p.x_minus) & (xs < p.x_plus) & (np.abs(xs) < 1))
    if np.any(bad):
        raise RegimeError(
            f"只能在转折点之间求值 | x: {xs[bad][0]}, x-: {p.x_minus}, x+: {p.x_plus}"
        )


def _check_order(J: int) -> None:
    if J < 0:
        raise DomainError(f"截断阶数 J 不能为负 | J: {J}")


def _oscillation(p: JacobiParams, xs: np.ndarray) -> _Oscillation:
    u = u_func(p, xs)
    one_minus_x2 = (1 - xs) * (1 + xs)
    theta = p.kappa * chi(p, xs) + 0.25 * np.pi
    log_weight = p.alpha * np.log1p(-xs) + p.beta * np.log1p(xs)
    return _Oscillation(xs, u, u / one_minus_x2, np.cos(theta), np.sin(theta), log_weight)


def _kappa_sum(p: JacobiParams, coefficients: np.ndarray) -> np.ndarray:
    """Σ_j coefficients[j] κ^{-j}，从高阶往低阶累加"""
    total = np.zeros(coefficients.shape[1])
    inverse = 1.0 / p.kappa
    for row in coefficients[::-1]:
        total = total * inverse + row
    return total


def _log_envelope(p: JacobiParams, osc: _Oscillation, two_kappa_psi: float) -> np.ndarray:
    return (
        0.5 * (p.alpha + p.beta + 1) * LN2
        - 0.5 * two_kappa_psi
        - 0.5 * math.log(math.pi * p.kappa)
        - 0.5 * (osc.log_weight + np.log(osc.u))
    )


def eval_jacobi(p: JacobiParams, x: ArrayLike, J: int = 3,
                cfg: Optional[RegimeConfig] = None) -> EvalResult:
    """
    P_n^{(α,β)}(x) ≈ 包络 × W(x)

    W(x) = cos(κχ+π/4)·P(x) + sin(κχ+π/4)·Q(x)，P, Q 为截断到 J 阶的 κ 幂级数；
    包络 = 2^{(α+β+1)/2} e^{-κψ} / sqrt(πκ w(x) U(x))。
    """
    _check_order(J)
    xs, scalar = as_array(x)
    _check_interior(p, xs)
    cfg = cfg or RegimeConfig(J=J)

    table = c_coeffs(p, xs, J)
    osc = _oscillation(p, xs)
    big_p = _kappa_sum(p, table.p)
    big_q = _kappa_sum(p, table.q)
    w_osc = osc.cos_theta * big_p + osc.sin_theta * big_q

    log_env = _log_envelope(p, osc, psi(p).two_kappa_psi)
    representable = np.abs(log_env) <= LOG_REPRESENTABLE
    envelope = np.where(representable, np.exp(np.where(representable, log_env, 0.0)), np.nan)
    value = envelope * w_osc
    if not np.all(representable):
        logger.warning(
            f"包络超出浮点范围，只返回对数分量 | n: {p.n}, alpha: {p.alpha}, beta: {p.beta}, "
            f"max|log_env|: {float(np.max(np.abs(log_env))):.1f}"
        )

    return EvalResult(
        value=restore(value, scalar),
        envelope=restore(envelope, scalar),
        log_envelope=restore(log_env, scalar),
        w_osc=restore(w_osc, scalar),
        representable=bool(representable[0]) if scalar else representable,
        order_used=J,
        regime=tuple(classify_reports(p, cfg, xs)),
    )


def eval_jacobi_deriv_parts(p: JacobiParams, x: ArrayLike, J: int = 3,
                            method: str = SAME_PARAMS) -> tuple[np.ndarray, np.ndarray]:
    """
    导数的对数分解：P'(x) = exp(log_scale) * oscillation

    same: P' = -2^{(α+β+1)/2} e^{-κψ} sqrt(κ/π) χ' / sqrt(wU) · (sinθ·R - cosθ·S)
    shifted: P' = (n+α+β+1)/2 · P_{n-1}^{(α+1,β+1)}(x)
    """
    _check_order(J)
    xs, _ = as_array(x)
    _check_interior(p, xs)

    if method == SHIFTED_PARAMS:
        if p.n < 1:
            raise DomainError(f"移位参数求导要求 n >= 1 | n: {p.n}")
        shifted = p.shifted()
        result = eval_jacobi(shifted, xs, J)
        factor = 0.5 * (p.n + p.alpha + p.beta + 1)
        return math.log(factor) + np.asarray(result.log_envelope), np.asarray(result.w_osc)

    if method != SAME_PARAMS:
        raise DomainError(f"未知的求导方法 | method: {method}")

    table = rs_coeffs(c_coeffs(p, xs, J), p)
    osc = _oscillation(p, xs)
    big_r = _kappa_sum(p, table.r)
    big_s = _kappa_sum(p, table.s)
    log_scale = (
        0.5 * (p.alpha + p.beta + 1) * LN2
        - 0.5 * psi(p).two_kappa_psi
        + 0.5 * math.log(p.kappa / math.pi)
        + np.log(osc.chi_prime)
        - 0.5 * (osc.log_weight + np.log(osc.u))
    )
    oscillation = -(osc.sin_theta * big_r - osc.cos_theta * big_s)
    return log_scale, oscillation


def eval_jacobi_deriv(p: JacobiParams, x: ArrayLike, J: int = 3,
                      method: str = SAME_PARAMS) -> ArrayLike:
    """P_n^{(α,β)}'(x)，不可表示时为 NaN"""
    xs, scalar = as_array(x)
    log_scale, oscillation = eval_jacobi_deriv_parts(p, xs, J, method)
    representable = np.abs(log_scale) <= LOG_REPRESENTABLE
    value = np.where(representable, np.exp(np.where(representable, log_scale, 0.0)), np.nan) * oscillation
    return restore(value, scalar)


def z_factor(p: JacobiParams, x: ArrayLike) -> ArrayLike:
    """Z(x) = sqrt((1-x²)/U(x))"""
    xs, scalar = as_array(x)
    _check_interior(p, xs)
    u = np.sqrt((p.x_plus - xs) * (xs - p.x_minus))
    return restore(np.sqrt((1 - xs) * (1 + xs) / u), scalar)


def eval_v(p: JacobiParams, x: ArrayLike, J: int = 3) -> ArrayLike:
    """
    缩放函数 v(x) = Z(x) W(x) / sqrt(πκ)

    等于 C (1-x)^{(α+1)/2} (1+x)^{(β+1)/2} P_n(x)，不含任何 Γ 函数，始终可表示。
    """
    _check_order(J)
    xs, scalar = as_array(x)
    _check_interior(p, xs)
    table = c_coeffs(p, xs, J)
    osc = _oscillation(p, xs)
    w_osc = osc.cos_theta * _kappa_sum(p, table.p) + osc.sin_theta * _kappa_sum(p, table.q)
    z = np.sqrt((1 - xs) * (1 + xs) / osc.u)
    return restore(z * w_osc / math.sqrt(math.pi * p.kappa), scalar)


def eval_v_prime(p: JacobiParams, x: ArrayLike, J: int = 3) -> ArrayLike:
    """v'(x) = -sqrt(κ/π) χ'(x) Z(x) (sinθ·M(x) - cosθ·N(x))"""
    _check_order(J)
    xs, scalar = as_array(x)
    _check_interior(p, xs)
    table = mn_coeffs(c_coeffs(p, xs, J), p)
    osc = _oscillation(p, xs)
    big_m = _kappa_sum(p, table.m)
    big_n = _kappa_sum(p, table.nn)
    z = np.sqrt((1 - xs) * (1 + xs) / osc.u)
    value = -math.sqrt(p.kappa / math.pi) * osc.chi_prime * z * (
        osc.sin_theta * big_m - osc.cos_theta * big_n
    )
    return restore(value, scalar)
