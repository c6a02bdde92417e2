"""
级数系数模块

在鞍点 z+ 处对变换 φ(z) - φ(z+) = w²/2 做幂级数反演，
展开 f+(w) 得到渐近级数系数 c_j = p_j + i q_j，
以及导数展开用到的 r_j, s_j 与 m_j, n_j。

全部计算对 x 向量化：数组第 0 轴是阶数，第 1 轴对应各个 x。
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from params_core import JacobiParams
from utils.arrays import as_array
from utils.exceptions import DegenerateSaddleError, DomainError
from utils.series import compose_series, derivative_series, power_series, prod_series

logger = logging.getLogger(__name__)

MAX_J = 6
# 系数 x 导数的差分步长（相对转折点区间长度）
FD_RELATIVE_STEP = 1e-5
SADDLE_GUARD = 1e-300


@dataclass(frozen=True)
class SaddleData:
    """
    鞍点数据

    phi_derivs 的第 k 行是 φ^(k)(z+)（第 0 行恒为 0，第 1 行是 φ'(z+) 的残差）。
    """
    x: np.ndarray
    z_plus: np.ndarray
    phi_derivs: np.ndarray
    z1: np.ndarray
    f0: np.ndarray
    conjugate: bool = False


@dataclass(frozen=True)
class CoeffTable:
    """
    每个 x 的级数系数表

    p, q 形状 (J+1, m)；dp, dq 是对 x 的导数；
    r, s, m, nn 形状 (J+2, m)，第 J+1 阶只含移位项。
    """
    x: np.ndarray
    J: int
    p: np.ndarray
    q: np.ndarray
    dp: Optional[np.ndarray] = None
    dq: Optional[np.ndarray] = None
    r: Optional[np.ndarray] = None
    s: Optional[np.ndarray] = None
    m: Optional[np.ndarray] = None
    nn: Optional[np.ndarray] = None


def _double_factorial_odd(j: int) -> int:
    """(2j-1)!! = 2^j (1/2)_j"""
    result = 1
    for k in range(1, 2 * j, 2):
        result *= k
    return result


def _interior_u(params: JacobiParams, xs: np.ndarray) -> np.ndarray:
    if np.any(~((xs > params.x_minus) & (xs < params.x_plus))):
        bad = xs[~((xs > params.x_minus) & (xs < params.x_plus))][0]
        raise DomainError(
            f"鞍点在转折点处退化到实轴 | x: {bad}, x-: {params.x_minus}, x+: {params.x_plus}"
        )
    u = np.sqrt((params.x_plus - xs) * (xs - params.x_minus))
    if np.any(u == 0):
        raise DomainError(f"U(x) 为零，鞍点退化 | x: {xs[u == 0][0]}")
    return u


def phi_derivative(params: JacobiParams, x: np.ndarray, z: np.ndarray, k: int) -> np.ndarray:
    """
    φ(z) = -(1+τ)ln(1-z) - (1-τ)ln(1+z) + (1-σ)ln(x-z) 的 k 阶导数 (k >= 1)
    """
    sigma, tau = params.sigma, params.tau
    factorial = math.factorial(k - 1)
    sign = -1.0 if k % 2 else 1.0
    return factorial * (
        (1 + tau) / (1 - z) ** k
        + sign * (1 - tau) / (1 + z) ** k
        - (1 - sigma) / (x - z) ** k
    )


def phi_prime(params: JacobiParams, x, z) -> np.ndarray:
    return phi_derivative(params, np.asarray(x, dtype=float), np.asarray(z, dtype=complex), 1)


def saddle(params: JacobiParams, x, J: int = 3, conjugate: bool = False) -> SaddleData:
    """
    鞍点 z+ = (x - τ + iU)/(1+σ) 与 φ 在该点的各阶导数（至 2J+3 阶）

    z1 = 1/sqrt(φ''(z+)) 的分支按 f0 = e^{iπ/4}/sqrt(2U) 固定；
    conjugate=True 时改在 z- = conj(z+) 上计算，f0 目标取共轭。
    """
    xs, _ = as_array(x)
    u = _interior_u(params, xs)
    sign = -1.0 if conjugate else 1.0
    z = (xs - params.tau + sign * 1j * u) / (1 + params.sigma)

    max_order = 2 * J + 3
    derivs = np.zeros((max_order + 1, len(xs)), dtype=complex)
    for k in range(1, max_order + 1):
        derivs[k] = phi_derivative(params, xs, z, k)

    phi2 = derivs[2]
    if np.any(np.abs(phi2) < SADDLE_GUARD):
        raise DegenerateSaddleError(f"φ''(z+) 退化 | x: {xs[np.abs(phi2) < SADDLE_GUARD][0]}")

    z1 = 1 / np.sqrt(phi2)
    f0 = z1 / np.sqrt((1 - z * z) * (xs - z))
    target = np.exp(sign * 0.25j * np.pi) / np.sqrt(2 * u)
    flip = (f0 * np.conj(target)).real < 0
    z1 = np.where(flip, -z1, z1)
    f0 = np.where(flip, -f0, f0)
    return SaddleData(xs, z, derivs, z1, f0, conjugate)


def z_coeffs(s: SaddleData, J: int) -> np.ndarray:
    """
    反演级数 z = z+ + Σ z_j w^j 的系数，形状 (2J+3, m)，第 0 行为 0

    把 Σ_{k>=2} φ_k Δ^k / k! = w²/2 写成 Δ = z1 w (1 + Σ a_m Δ^m)^{-1/2}，
    a_m = 2 φ_{m+2} / ((m+2)! φ_2)，不动点迭代每次多确定一阶。
    """
    N = 2 * J + 2
    if s.phi_derivs.shape[0] < N + 2:
        raise ValueError(f"鞍点导数阶数不足 | 需要: {N + 1}, 实际: {s.phi_derivs.shape[0] - 1}")
    phi2 = s.phi_derivs[2]
    m_points = s.phi_derivs.shape[1]

    a = np.zeros((N, m_points), dtype=complex)
    a[0] = 1.0
    for m in range(1, N):
        a[m] = 2 * s.phi_derivs[m + 2] / (math.factorial(m + 2) * phi2)
    h = power_series(a, -0.5)

    delta = np.zeros((N + 1, m_points), dtype=complex)
    delta[1] = s.z1
    for _ in range(N - 1):
        composed = compose_series(h, delta)
        updated = np.zeros_like(delta)
        updated[1:] = s.z1 * composed[:N]
        delta = updated
    logger.debug(f"级数反演完成 | J: {J}, 阶数: {N}, 点数: {m_points}")
    return delta


def z_closed_forms(s: SaddleData) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """z2, z3, z4 的显式公式（用于交叉校验）"""
    z1 = s.z1
    phi3, phi4, phi5 = s.phi_derivs[3], s.phi_derivs[4], s.phi_derivs[5]
    z2 = -z1 ** 4 * phi3 / 6
    z3 = z1 ** 5 * (5 * z1 ** 2 * phi3 ** 2 - 3 * phi4) / 72
    z4 = -z1 ** 6 * (9 * phi5 - 45 * z1 ** 2 * phi3 * phi4 + 40 * z1 ** 4 * phi3 ** 3) / 1080
    return z2, z3, z4


def c1_closed_form(s: SaddleData, z: Optional[np.ndarray] = None) -> np.ndarray:
    """c1 的显式多项式形式，z 为 z_coeffs 的输出（缺省时现算）"""
    if z is None:
        z = z_coeffs(s, 1)
    x = s.x
    zp = s.z_plus
    z1, z2, z3 = z[1], z[2], z[3]
    bracket = (
        -6 * z1 ** 3 * zp ** 2 + 3 * z1 ** 3 - 72 * z1 * z2 * zp ** 2 * x
        + 24 * z1 * zp * z2 * x ** 2 - 24 * z1 * zp ** 3 * z2 * x ** 2 - 48 * z3 * x * zp
        - 48 * z3 * zp ** 2 * x ** 2 + 96 * z3 * zp ** 3 * x
        + 24 * z3 * zp ** 4 * x ** 2 - 48 * z3 * zp ** 5 * x - 12 * z1 * zp * z2
        + 48 * z1 * zp ** 3 * z2 - 48 * z3 * zp ** 4
        + 24 * z3 * zp ** 6 + 12 * z1 * z2 * x - 36 * z1 * z2 * zp ** 5 - 4 * z1 ** 3 * x * zp
        + 8 * z1 ** 3 * zp ** 2 * x ** 2 - 20 * z1 ** 3 * zp ** 3 * x
        + 4 * z1 ** 3 * x ** 2 + 15 * z1 ** 3 * zp ** 4 + 24 * z3 * x ** 2 + 24 * z3 * zp ** 2
        + 60 * z1 * z2 * zp ** 4 * x
    )
    return bracket / (8 * z1 * (1 - zp ** 2) ** 2 * (x - zp) ** 2)


def reversion_residual(s: SaddleData, z: np.ndarray) -> np.ndarray:
    """
    φ(z(w)) - φ(z+) - w²/2 的逐阶相对残差，形状 (N+2, m)

    分母是同一复合运算取绝对值后的系数，反映各阶的自然量级。
    """
    N = z.shape[0] - 1
    m_points = z.shape[1]
    order = N + 2
    phi_series = np.zeros((order, m_points), dtype=complex)
    for k in range(2, min(order, s.phi_derivs.shape[0])):
        phi_series[k] = s.phi_derivs[k] / math.factorial(k)
    delta = np.zeros((order, m_points), dtype=complex)
    delta[: N + 1] = z
    composed = compose_series(phi_series, delta)
    composed[2] -= 0.5
    scale = compose_series(np.abs(phi_series), np.abs(delta)).real
    scale = np.where(scale > 0, scale, 1.0)
    # 第 N+1 阶以上依赖未计算的 z_{N+1}
    return np.abs(composed[: N + 2]) / scale[: N + 2]


def c_coeffs(params: JacobiParams, x, J: int = 3, conjugate: bool = False) -> CoeffTable:
    """
    渐近系数 c_j = (2j-1)!! f_{2j}/f_0，拆成 p_j = Re c_j, q_j = Im c_j

    f(w)/f0 = D(Δ)^{-1/2} Δ'(w) / z1，其中
    D = (1-(z+ + Δ)²)(x - z+ - Δ) / ((1-z+²)(x-z+)) 是 Δ 的三次多项式。
    """
    if not 0 <= J <= MAX_J:
        raise DomainError(f"截断阶数 J 必须在 [0, {MAX_J}] 内 | J: {J}")
    s = saddle(params, x, J, conjugate)
    xs = s.x
    z = z_coeffs(s, J)
    N = z.shape[0] - 1

    zp = s.z_plus
    a0 = 1 - zp * zp
    b0 = xs - zp
    ab = a0 * b0
    d = np.zeros((N, len(xs)), dtype=complex)
    d[0] = 1.0
    d[1] = (-a0 - 2 * zp * b0) / ab
    if N > 2:
        d[2] = (2 * zp - b0) / ab
    if N > 3:
        d[3] = 1 / ab
    h = power_series(d, -0.5)
    h_of_w = compose_series(h, z)
    f = prod_series(h_of_w, derivative_series(z)) / s.z1

    c = np.empty((J + 1, len(xs)), dtype=complex)
    for j in range(J + 1):
        c[j] = _double_factorial_odd(j) * f[2 * j]
    p = c.real.copy()
    q = c.imag.copy()
    p[0] = 1.0
    q[0] = 0.0
    return CoeffTable(x=xs, J=J, p=p, q=q)


def coeff_derivatives(params: JacobiParams, x, J: int = 3) -> tuple[np.ndarray, np.ndarray]:
    """
    p_j, q_j 对 x 的导数：四阶中心差分

    步长 h = (x+ - x-)·1e-5，靠近转折点时收缩到距离的 1/4，保证差分点在区间内。
    """
    xs, _ = as_array(x)
    distance = np.minimum(xs - params.x_minus, params.x_plus - xs)
    h = np.minimum(FD_RELATIVE_STEP * params.span, 0.25 * distance)
    stencil = np.concatenate([xs - 2 * h, xs - h, xs + h, xs + 2 * h])
    table = c_coeffs(params, stencil, J)
    m_points = len(xs)

    def _diff(values: np.ndarray) -> np.ndarray:
        fm2, fm1, fp1, fp2 = (values[:, i * m_points:(i + 1) * m_points] for i in range(4))
        return (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)

    return _diff(table.p), _diff(table.q)


def with_derivatives(table: CoeffTable, params: JacobiParams) -> CoeffTable:
    if table.dp is not None and table.dq is not None:
        return table
    dp, dq = coeff_derivatives(params, table.x, table.J)
    return replace(table, dp=dp, dq=dq)


def _shift_terms(table: CoeffTable, scale: np.ndarray, log_derivative: np.ndarray):
    """
    (first, second) 形状 (J+2, m)：
    first_j = p_j - scale·(q'_{j-1} + log_derivative·q_{j-1})
    second_j = q_j + scale·(p'_{j-1} + log_derivative·p_{j-1})
    """
    J = table.J
    m_points = len(table.x)
    p_ext = np.zeros((J + 2, m_points))
    q_ext = np.zeros((J + 2, m_points))
    p_ext[: J + 1] = table.p
    q_ext[: J + 1] = table.q
    first = p_ext.copy()
    second = q_ext.copy()
    first[1:] -= scale * (table.dq + log_derivative * table.q)
    second[1:] += scale * (table.dp + log_derivative * table.p)
    first[0] = 1.0
    second[0] = 0.0
    return first, second


def rs_coeffs(table: CoeffTable, params: JacobiParams) -> CoeffTable:
    """
    导数展开的系数 r_j, s_j

    A(x) = 1/sqrt(w(x)U(x))，A'/A = -(-α/(1-x) + β/(1+x) - (x+στ)/U²)/2。
    """
    table = with_derivatives(table, params)
    xs = table.x
    u = _interior_u(params, xs)
    chi_prime = u / ((1 - xs) * (1 + xs))
    a_log = -0.5 * (
        -params.alpha / (1 - xs) + params.beta / (1 + xs)
        - (xs + params.sigma * params.tau) / (u * u)
    )
    r, s = _shift_terms(table, 1 / chi_prime, a_log)
    return replace(table, r=r, s=s)


def mn_coeffs(table: CoeffTable, params: JacobiParams) -> CoeffTable:
    """
    v'(x) 展开的系数 m_j, n_j

    p(x) = (1-x²)/U，q(x) = ((1-x²)(x+στ) - 2xU²)/(2U³)。
    """
    table = with_derivatives(table, params)
    xs = table.x
    u = _interior_u(params, xs)
    one_minus_x2 = (1 - xs) * (1 + xs)
    p_fun = one_minus_x2 / u
    q_fun = (one_minus_x2 * (xs + params.sigma * params.tau) - 2 * xs * u * u) / (2 * u ** 3)
    # m_j = p_j - p(x) q'_{j-1} - q(x) q_{j-1} 等价于 scale = p(x)、对数导数 = q(x)/p(x)
    m, nn = _shift_terms(table, p_fun, q_fun / p_fun)
    return replace(table, m=m, nn=nn)
