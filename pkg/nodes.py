"""
节点计算模块

第 ℓ 个零点的一阶近似由相位条件 χ(x) = χ_ℓ 反解得到，
再加上 ξ2/κ² 与 ξ4/κ⁴ 两项渐近修正。
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from coeffs import c_coeffs, coeff_derivatives
from params_core import JacobiParams
from phase import invert_chi
from utils.arrays import as_array
from utils.exceptions import DomainError, NodeOrderError

logger = logging.getLogger(__name__)

VALID_ORDERS = (0, 2, 4)
# ξ4 需要 p2 与 q3
MIN_CORRECTION_J = 3


@dataclass(frozen=True)
class NodeEstimate:
    ell: int
    x0: float
    x2: float
    x4: float
    order: int
    flagged: bool = False

    @property
    def value(self) -> float:
        """所请求阶数下的节点估计"""
        if self.order == 4:
            return self.x4
        if self.order == 2:
            return self.x2
        return self.x0


def _check_ell(p: JacobiParams, ell: int) -> None:
    if not 1 <= ell <= p.n:
        raise DomainError(f"ell 必须在 [1, n] 内 | ell: {ell}, n: {p.n}")


def _check_order(order: int) -> None:
    if order not in VALID_ORDERS:
        raise DomainError(f"修正阶数只能是 0, 2, 4 | order: {order}")


def chi_target(p: JacobiParams, ell: int) -> float:
    """
    第 ℓ 个零点的相位目标

    令 κχ + π/4 = π/2 - (n+1-ℓ)π，即 χ_ℓ = (ℓ - n - 3/4)π/κ。
    """
    _check_ell(p, ell)
    target = (ell - p.n - 0.75) * math.pi / p.kappa
    lower = -(1 - p.sigma) * math.pi
    if not lower <= target <= 0.0:
        raise DomainError(
            f"相位目标超出振荡区间 | ell: {ell}, chi_ell: {target}, 范围: [{lower}, 0]"
        )
    return target


def _predicted_start(p: JacobiParams, target: float) -> float:
    """χ 线性近似下的起点"""
    chi_left = -(1 - p.sigma) * math.pi
    return p.x_minus + (target - chi_left) / (-chi_left) * p.span


def initial_node(p: JacobiParams, ell: int, start: Optional[float] = None) -> float:
    """
    一阶近似 x0：反解 χ(x) = χ_ℓ

    ℓ = 1 默认从 x- + 1/n 出发；其他 ℓ 未给起点时用 χ 的线性预测。
    """
    target = chi_target(p, ell)
    if start is None:
        start = p.x_minus + 1.0 / p.n if ell == 1 else _predicted_start(p, target)
    return invert_chi(p, target, start)


def node_corrections(p: JacobiParams, x0, J: int = MIN_CORRECTION_J) -> tuple[np.ndarray, np.ndarray]:
    """
    修正项 ξ2(x0), ξ4(x0)

    ξ2 = (1-x²) q1 / U
    ξ4 = (1-x²)(q3 - p2 q1 - q1³/3)/U + (1-x²)² q1 q1'/U² - x(1-x²) q1²/U²
         + (1-x²)²(x+στ) q1² / (2U⁴)
    """
    xs, _ = as_array(x0)
    J = max(J, MIN_CORRECTION_J)
    table = c_coeffs(p, xs, J)
    _, dq = coeff_derivatives(p, xs, J)
    q1, q3, p2, dq1 = table.q[1], table.q[3], table.p[2], dq[1]

    u = np.sqrt((p.x_plus - xs) * (xs - p.x_minus))
    w = (1 - xs) * (1 + xs)
    xi2 = w * q1 / u
    xi4 = (
        w * (q3 - p2 * q1 - q1 ** 3 / 3) / u
        + w * w * q1 * dq1 / u ** 2
        - xs * w * q1 ** 2 / u ** 2
        + w * w * (xs + p.sigma * p.tau) * q1 ** 2 / (2 * u ** 4)
    )
    return xi2, xi4


def _estimates(p: JacobiParams, ells: np.ndarray, x0: np.ndarray, order: int, J: int) -> list[NodeEstimate]:
    """对一批 x0 做向量化修正并打包"""
    xi2, xi4 = node_corrections(p, x0, J)
    kappa2 = p.kappa * p.kappa
    x2 = x0 + xi2 / kappa2
    x4 = x2 + xi4 / (kappa2 * kappa2)

    estimates = []
    for ell, a0, a2, a4 in zip(ells, x0, x2, x4):
        flagged = False
        if not p.x_minus < a2 < p.x_plus:
            a2 = a0
            flagged = True
        if not p.x_minus < a4 < p.x_plus:
            a4 = a0
            flagged = True
        if flagged:
            logger.warning(f"修正后节点越过转折点，已退回 x0 | ell: {int(ell)}, x0: {a0:.17g}")
        estimates.append(NodeEstimate(int(ell), float(a0), float(a2), float(a4), order, flagged))
    return estimates


def refined_node(p: JacobiParams, ell: int, order: int = 4, J: int = MIN_CORRECTION_J) -> NodeEstimate:
    """单个节点的修正估计，order = 0 时 value 即 initial_node 的结果"""
    _check_order(order)
    x0 = initial_node(p, ell)
    return _estimates(p, np.array([ell]), np.array([x0]), order, J)[0]


def _chain(p: JacobiParams, ells: range) -> list[float]:
    """连续 ℓ 的反解，后一个以前一个为起点"""
    values = []
    start = None
    for ell in ells:
        if start is None and ell != 1:
            start = _predicted_start(p, chi_target(p, ell))
        x = initial_node(p, ell, start)
        values.append(x)
        start = x
    return values


def _partitions(n: int, parts: int) -> list[range]:
    bounds = np.linspace(1, n + 1, parts + 1).astype(int)
    return [range(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def check_node_order(p: JacobiParams, values: np.ndarray) -> None:
    """数量、严格递增与区间检查，不重新排序"""
    if len(values) != p.n:
        raise NodeOrderError(min(len(values), p.n) + 1, f"节点数量: {len(values)}, n: {p.n}")
    outside = np.flatnonzero(~((values > p.x_minus) & (values < p.x_plus)))
    if len(outside):
        ell = int(outside[0]) + 1
        raise NodeOrderError(ell, f"节点越出 (x-, x+) | x: {values[ell - 1]}")
    steps = np.diff(values)
    bad = np.flatnonzero(steps <= 0)
    if len(bad):
        ell = int(bad[0]) + 2
        raise NodeOrderError(ell, f"节点未严格递增 | x[ell-1]: {values[ell - 2]}, x[ell]: {values[ell - 1]}")


def all_nodes(p: JacobiParams, order: int = 4, J: int = MIN_CORRECTION_J,
              threads: Optional[int] = None) -> list[NodeEstimate]:
    """
    全部 n 个节点

    threads 为 1 时按 ℓ 顺序链式热启动；大于 1 时把 ℓ 切成连续分段，
    各段首个节点用线性预测起步，分段结果按 ℓ 顺序拼接。
    """
    _check_order(order)
    if p.n < 1:
        raise DomainError(f"节点计算要求 n >= 1 | n: {p.n}")
    threads = max(1, int(threads or 1))
    parts = min(threads, p.n)

    if parts == 1:
        x0 = _chain(p, range(1, p.n + 1))
    else:
        with ThreadPoolExecutor(max_workers=parts) as executor:
            chunks = list(executor.map(lambda ells: _chain(p, ells), _partitions(p.n, parts)))
        x0 = [x for chunk in chunks for x in chunk]

    x0 = np.asarray(x0, dtype=float)
    check_node_order(p, x0)
    estimates = _estimates(p, np.arange(1, p.n + 1), x0, order, J)
    values = np.array([e.value for e in estimates])
    check_node_order(p, values)

    flagged = sum(e.flagged for e in estimates)
    logger.info(
        f"节点计算完成 | n: {p.n}, alpha: {p.alpha}, beta: {p.beta}, "
        f"order: {order}, 线程: {parts}, 标记: {flagged}"
    )
    return estimates
