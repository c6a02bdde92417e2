"""
参数推导模块

由 (n, α, β) 推导渐近区域的全部标量参数：κ、σ、τ 与转折点 x±，
并按区间位置和参数范围给出区域分类报告。
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from utils.exceptions import DomainError

logger = logging.getLogger(__name__)

IN_BULK = "in_bulk"
NEAR_LEFT_TP = "near_left_tp"
NEAR_RIGHT_TP = "near_right_tp"
OUT_OF_REGIME = "out_of_regime"


@dataclass(frozen=True)
class JacobiParams:
    """Jacobi 多项式参数及其派生量，贯穿全部计算的上下文对象"""
    n: int
    alpha: float
    beta: float
    kappa: float
    sigma: float
    tau: float
    x_minus: float
    x_plus: float

    @property
    def span(self) -> float:
        return self.x_plus - self.x_minus

    def swapped(self) -> "JacobiParams":
        """交换 α 与 β"""
        return derive_params(self.n, self.beta, self.alpha)

    def shifted(self) -> "JacobiParams":
        """导数关系中的 (n-1, α+1, β+1)"""
        return derive_params(self.n - 1, self.alpha + 1, self.beta + 1)


@dataclass(frozen=True)
class RegimeConfig:
    """
    渐近区域配置

    delta: 转折点附近的相对留白（按区间长度计）
    sigma0, tau0: σ 与 |τ| 的上界
    J: 级数截断阶数
    """
    delta: float = 0.02
    sigma0: float = 0.95
    tau0: float = 0.95
    J: int = 3

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise DomainError(f"delta 必须在 (0, 1) 内 | delta: {self.delta}")
        if not 0 < self.sigma0 < 1:
            raise DomainError(f"sigma0 必须在 (0, 1) 内 | sigma0: {self.sigma0}")
        if not 0 < self.tau0 < 1:
            raise DomainError(f"tau0 必须在 (0, 1) 内 | tau0: {self.tau0}")
        if self.J < 0:
            raise DomainError(f"截断阶数 J 不能为负 | J: {self.J}")


@dataclass(frozen=True)
class RegimeReport:
    in_bulk: bool
    near_left_tp: bool
    near_right_tp: bool
    out_of_regime: bool

    @property
    def label(self) -> str:
        if self.out_of_regime:
            return OUT_OF_REGIME
        if self.near_left_tp:
            return NEAR_LEFT_TP
        if self.near_right_tp:
            return NEAR_RIGHT_TP
        return IN_BULK


def derive_params(n: int, alpha: float, beta: float) -> JacobiParams:
    """
    推导 κ、σ、τ 与转折点

    Args:
        n: 多项式次数 (>= 0)
        alpha, beta: 参数 (> -1)

    Returns:
        JacobiParams
    """
    if int(n) != n or n < 0:
        raise DomainError(f"次数 n 必须是非负整数 | n: {n}")
    if not alpha > -1:
        raise DomainError(f"alpha 必须 > -1 | alpha: {alpha}")
    if not beta > -1:
        raise DomainError(f"beta 必须 > -1 | beta: {beta}")
    n = int(n)
    alpha = float(alpha)
    beta = float(beta)

    kappa = n + (alpha + beta + 1) / 2
    sigma = (alpha + beta) / (2 * kappa)
    tau = (alpha - beta) / (2 * kappa)
    radicand = (1 - sigma * sigma) * (1 - tau * tau)
    # 合法输入下 |σ|, |τ| < 1，不会出现负数
    if radicand < 0:
        raise DomainError(f"转折点根式为负 | sigma: {sigma}, tau: {tau}")
    root = math.sqrt(radicand)
    x_minus = -sigma * tau - root
    x_plus = -sigma * tau + root

    logger.debug(
        f"参数推导完成 | n: {n}, alpha: {alpha}, beta: {beta}, "
        f"kappa: {kappa}, sigma: {sigma:.6f}, tau: {tau:.6f}, "
        f"x-: {x_minus:.6f}, x+: {x_plus:.6f}"
    )
    return JacobiParams(n, alpha, beta, kappa, sigma, tau, x_minus, x_plus)


def parameters_in_regime(p: JacobiParams, cfg: RegimeConfig) -> bool:
    """σ 与 |τ| 是否在配置上界之内"""
    return p.sigma <= cfg.sigma0 and abs(p.tau) <= cfg.tau0


def bulk_interval(p: JacobiParams, cfg: RegimeConfig) -> tuple[float, float]:
    margin = cfg.delta * p.span
    return p.x_minus + margin, p.x_plus - margin


def validate_regime(p: JacobiParams, cfg: RegimeConfig, x: float) -> RegimeReport:
    """对单点 x 给出区域分类（只报告，不抛异常）"""
    return _classify(p, cfg, np.array([float(x)]))[0]


def classify_reports(p: JacobiParams, cfg: RegimeConfig, xs) -> list[RegimeReport]:
    """批量分类，返回每个点的报告"""
    return _classify(p, cfg, np.atleast_1d(np.asarray(xs, dtype=float)).ravel())


def classify_points(p: JacobiParams, cfg: RegimeConfig, xs) -> list[str]:
    """批量分类，返回每个点的标签"""
    return [report.label for report in classify_reports(p, cfg, xs)]


def _classify(p: JacobiParams, cfg: RegimeConfig, xs: np.ndarray) -> list[RegimeReport]:
    lower, upper = bulk_interval(p, cfg)
    params_ok = parameters_in_regime(p, cfg)
    reports = []
    for x in xs:
        inside = p.x_minus <= x <= p.x_plus
        if not (inside and params_ok):
            reports.append(RegimeReport(False, False, False, True))
            continue
        near_left = x < lower
        near_right = x > upper
        reports.append(RegimeReport(not (near_left or near_right), near_left, near_right, False))
    return reports
