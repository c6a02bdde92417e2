"""
权重计算模块

经典权重 w_ℓ = M / ((1-x²) P'(x)²) 与缩放权重 ω_ℓ = 1 / v'(x)²，
二者通过常数 M·C² 与权函数互相换算：w = M C² (1-x)^α (1+x)^β ω。
所有 Γ 比值都在对数空间用 Γ* 组装，大参数时不会溢出。
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from evaluator import LOG_REPRESENTABLE, SAME_PARAMS, eval_jacobi_deriv_parts, eval_v_prime
from params_core import JacobiParams
from utils.arrays import as_array, restore
from utils.exceptions import DomainError

logger = logging.getLogger(__name__)

KIND_CLASSICAL = "classical"
KIND_SCALED = "scaled"
KIND_BOTH = "both"
WEIGHT_KINDS = (KIND_CLASSICAL, KIND_SCALED, KIND_BOTH)

STIRLING_THRESHOLD = 10.0
# ln Γ*(z) ~ Σ c_k / z^{2k-1}
STIRLING_COEFFS = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)
LN_2PI = math.log(2 * math.pi)


@dataclass(frozen=True)
class WeightPair:
    ell: int
    w_classical: float
    omega_scaled: float
    log_w: float
    representable: bool = True


@dataclass(frozen=True)
class ScalingConstant:
    """M_{n,α,β} · C²_{n,α,β}"""
    value: float
    log_value: float


@dataclass(frozen=True)
class ClassicalWeight:
    w: object
    log_w: object
    representable: object


def _log_gamma_star_scalar(z: float) -> float:
    if z >= STIRLING_THRESHOLD:
        inv = 1.0 / z
        inv2 = inv * inv
        total = 0.0
        for coeff in reversed(STIRLING_COEFFS):
            total = total * inv2 + coeff
        return total * inv
    return 0.5 * (math.log(z) - LN_2PI) + z - z * math.log(z) + float(gammaln(z))


def log_gamma_star(z):
    """ln Γ*(z)，Γ*(z) = sqrt(z/(2π)) e^z z^{-z} Γ(z)"""
    zs, scalar = as_array(z)
    if np.any(~(zs > 0)):
        raise DomainError(f"Γ* 只对 z > 0 有定义 | z: {zs[~(zs > 0)][0]}")
    return restore(np.array([_log_gamma_star_scalar(float(v)) for v in zs]), scalar)


def gamma_star(z):
    """Γ*(z) = 1 + 1/(12z) + O(z^-2)"""
    zs, scalar = as_array(z)
    return restore(np.exp(np.asarray(log_gamma_star(zs))), scalar)


def log_gamma_ratio(z: float, a: float) -> float:
    """
    ln(Γ(z+a) / Γ(z))

    = ln Γ*(z+a) - ln Γ*(z) + (z - 1/2) ln(1 + a/z) + a ln(z+a) - a，
    各项量级都是 O(a ln z)，不会出现大数相消。
    """
    if not (z > 0 and z + a > 0):
        raise DomainError(f"Γ 比值的参数必须为正 | z: {z}, z+a: {z + a}")
    if a == 0:
        return 0.0
    return (
        _log_gamma_star_scalar(z + a) - _log_gamma_star_scalar(z)
        + (z - 0.5) * math.log1p(a / z)
        + a * math.log(z + a)
        - a
    )


def log_m_constant(p: JacobiParams) -> float:
    """ln M = (α+β+1) ln 2 + ln Γ(n+α+1) + ln Γ(n+β+1) - ln Γ(n+α+β+1) - ln n!"""
    return (
        (p.alpha + p.beta + 1) * math.log(2.0)
        + log_gamma_ratio(p.n + 1, p.beta)
        - log_gamma_ratio(p.n + p.alpha + 1, p.beta)
    )


def scaling_constant(p: JacobiParams) -> ScalingConstant:
    """
    M·C²，C² = 2^{-(α+β+1)} e^{2κψ}

    以 n+α+1/2, n+β+1/2, n+α+β+1/2, n+1/2 四个自变量写成 Γ* 与半步 Γ 比值，
    e^{2κψ} 与 z^z 项正好抵消，α = β = 0 时各组逐项相消，结果恰为 1。
    """
    a = p.n + p.alpha + 0.5
    b = p.n + p.beta + 0.5
    c = p.n + p.alpha + p.beta + 0.5
    d = p.n + 0.5
    half_steps = (log_gamma_ratio(a, 0.5) + log_gamma_ratio(b, 0.5)) - (
        log_gamma_ratio(d, 0.5) + log_gamma_ratio(c, 0.5)
    )
    stars = (_log_gamma_star_scalar(a) + _log_gamma_star_scalar(b)) - (
        _log_gamma_star_scalar(c) + _log_gamma_star_scalar(d)
    )
    roots = 0.5 * ((math.log(c) + math.log(d)) - (math.log(a) + math.log(b)))
    log_value = half_steps + stars + roots
    logger.debug(f"缩放常数 | n: {p.n}, alpha: {p.alpha}, beta: {p.beta}, log(MC²): {log_value:.3e}")
    return ScalingConstant(value=math.exp(log_value), log_value=log_value)


def log_weight_function(p: JacobiParams, xs: np.ndarray) -> np.ndarray:
    """log w(x) = α log(1-x) + β log(1+x)"""
    return p.alpha * np.log1p(-xs) + p.beta * np.log1p(xs)


def classical_weight(p: JacobiParams, x_ell, J: int = 3, method: str = SAME_PARAMS) -> ClassicalWeight:
    """
    经典权重 w = M / ((1-x²) P'(x)²)，同时给出对数形式

    对数超出浮点范围时 w 为 NaN、representable 为 False。
    """
    xs, scalar = as_array(x_ell)
    log_scale, oscillation = eval_jacobi_deriv_parts(p, xs, J, method)
    log_abs_deriv = log_scale + np.log(np.abs(oscillation))
    log_w = log_m_constant(p) - np.log1p(-xs) - np.log1p(xs) - 2 * log_abs_deriv
    representable = np.abs(log_w) <= LOG_REPRESENTABLE
    w = np.where(representable, np.exp(np.where(representable, log_w, 0.0)), np.nan)
    if scalar:
        return ClassicalWeight(float(w[0]), float(log_w[0]), bool(representable[0]))
    return ClassicalWeight(w, log_w, representable)


def scaled_weight(p: JacobiParams, x_ell, J: int = 3):
    """缩放权重 ω = 1 / v'(x)²"""
    xs, scalar = as_array(x_ell)
    v_prime = np.asarray(eval_v_prime(p, xs, J))
    return restore(1.0 / (v_prime * v_prime), scalar)


def all_weights(p: JacobiParams, nodes, J: int = 3, kind: str = KIND_SCALED) -> list[WeightPair]:
    """
    全部节点的权重

    scaled: 由 v' 算 ω，再用 M·C² 换算出 w
    classical: 由 P' 算 w，再反向换算出 ω
    both: 两条路径各自独立计算
    """
    if kind not in WEIGHT_KINDS:
        raise DomainError(f"未知的权重类型 | kind: {kind}")
    xs, _ = as_array(nodes)
    log_mc2 = scaling_constant(p).log_value
    log_wx = log_weight_function(p, xs)

    if kind in (KIND_SCALED, KIND_BOTH):
        omega = np.asarray(scaled_weight(p, xs, J))
    if kind in (KIND_CLASSICAL, KIND_BOTH):
        classical = classical_weight(p, xs, J)
        log_w = np.asarray(classical.log_w)
    if kind == KIND_SCALED:
        log_w = log_mc2 + log_wx + np.log(omega)
    if kind == KIND_CLASSICAL:
        omega = np.exp(log_w - log_mc2 - log_wx)

    representable = np.abs(log_w) <= LOG_REPRESENTABLE
    w = np.where(representable, np.exp(np.where(representable, log_w, 0.0)), np.nan)
    if not np.all(representable):
        logger.warning(
            f"部分经典权重超出浮点范围 | n: {p.n}, 数量: {int(np.sum(~representable))}"
        )
    return [
        WeightPair(ell, float(wv), float(om), float(lw), bool(rep))
        for ell, wv, om, lw, rep in zip(range(1, len(xs) + 1), w, omega, log_w, representable)
    ]
