"""
求积规则接口

按参数选择渐近、高精度或混合路径，组装 QuadratureRule，并提供积分与日志配置。
"""

import logging
import math
from dataclasses import dataclass, field
from logging.handlers import RotatingFileHandler
from typing import Callable, Optional

import mpmath
import numpy as np
from scipy.special import betaln

from evaluator import LOG_REPRESENTABLE
from nodes import all_nodes
from oracle import oracle_nodes, oracle_scaled_weights, oracle_weights, polish_nodes
from params_core import (
    IN_BULK,
    JacobiParams,
    RegimeConfig,
    classify_points,
    derive_params,
    parameters_in_regime,
)
from utils import config
from utils.exceptions import DomainError, RegimeError
from utils.summation import CompensatedSum
from weights import KIND_SCALED, WEIGHT_KINDS, all_weights, log_weight_function

logger = logging.getLogger(__name__)

METHOD_AUTO = "auto"
METHOD_ASYMPTOTIC = "asymptotic"
METHOD_ORACLE = "oracle"
METHOD_HYBRID = "hybrid"
METHODS = (METHOD_AUTO, METHOD_ASYMPTOTIC, METHOD_ORACLE, METHOD_HYBRID)
MODE_WEIGHTED = "weighted"
MODE_PLAIN = "plain"
# 渐近展开在更小的 n 上没有意义
MIN_ASYMPTOTIC_N = 5


def setup_logging(log_file: Optional[str] = None, level: Optional[str] = None) -> logging.Logger:
    """
    配置根日志：控制台 + 轮转文件（10MB，保留 5 个备份）

    Args:
        log_file: 日志文件路径，None 时取 GJQ_LOG_FILE，空字符串表示不写文件
        level: 日志级别名称，None 时取 GJQ_LOG_LEVEL

    Returns:
        根 logger
    """
    log = logging.getLogger()

    # 避免重复添加 handlers
    if log.handlers:
        return log

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    log.addHandler(console_handler)

    log_file = config.log_file if log_file is None else log_file
    if log_file:
        file_handler = RotatingFileHandler(
            log_file, maxBytes=10 * 1024 * 1024, backupCount=5, encoding='utf-8'
        )
        file_handler.setFormatter(formatter)
        log.addHandler(file_handler)

    log.setLevel((level or config.log_level).upper())
    return log


@dataclass(frozen=True)
class RuleOptions:
    """
    规则构造选项

    method: auto 按参数自动分派；asymptotic / oracle / hybrid 强制指定
    weight_kind: 渐近路径的权重计算方式（scaled / classical / both）
    """
    order: int = 4
    J: int = 3
    method: str = METHOD_AUTO
    strict: bool = False
    regime: RegimeConfig = field(default_factory=RegimeConfig)
    threads: Optional[int] = None
    small_n_cutoff: int = field(default_factory=lambda: config.small_n_cutoff)
    weight_kind: str = KIND_SCALED

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"未知的计算方法 | method: {self.method}")
        if self.weight_kind not in WEIGHT_KINDS:
            raise DomainError(f"未知的权重类型 | weight_kind: {self.weight_kind}")


@dataclass(frozen=True)
class RuleMeta:
    node_order: int
    J: int
    method: str
    flags: tuple[str, ...]


@dataclass(frozen=True)
class QuadratureRule:
    """
    Gauss–Jacobi 求积规则，数组只读

    weights_classical 在超出浮点范围处为 NaN，对数形式始终有效。
    """
    params: JacobiParams
    nodes: np.ndarray
    weights_classical: np.ndarray
    log_weights_classical: np.ndarray
    weights_scaled: np.ndarray
    meta: RuleMeta

    def __post_init__(self):
        for array in (self.nodes, self.weights_classical, self.log_weights_classical, self.weights_scaled):
            array.setflags(write=False)

    @property
    def weights(self) -> np.ndarray:
        return self.weights_classical

    def __len__(self) -> int:
        return len(self.nodes)


def _regime_ok(p: JacobiParams, cfg: RegimeConfig) -> bool:
    return parameters_in_regime(p, cfg) and min(p.alpha, p.beta) >= 0


def _dispatch(p: JacobiParams, options: RuleOptions) -> str:
    regime_ok = _regime_ok(p, options.regime)
    if options.method == METHOD_ORACLE:
        return METHOD_ORACLE
    if not regime_ok and options.strict:
        raise RegimeError(
            f"参数超出渐近适用范围 | sigma: {p.sigma:.6f}, tau: {p.tau:.6f}, "
            f"alpha: {p.alpha}, beta: {p.beta}"
        )
    if options.method == METHOD_AUTO:
        if p.n < options.small_n_cutoff or not regime_ok:
            return METHOD_ORACLE
        return METHOD_ASYMPTOTIC
    if p.n < MIN_ASYMPTOTIC_N:
        logger.warning(f"n 太小，改用高精度路径 | n: {p.n}, method: {options.method}")
        return METHOD_ORACLE
    if not regime_ok:
        logger.warning(
            f"参数超出渐近适用范围，按指定方法继续 | sigma: {p.sigma:.6f}, tau: {p.tau:.6f}"
        )
    return options.method


def _from_log(log_w: np.ndarray) -> np.ndarray:
    ok = np.abs(log_w) <= LOG_REPRESENTABLE
    return np.where(ok, np.exp(np.where(ok, log_w, 0.0)), np.nan)


def _oracle_arrays(p: JacobiParams, nodes_dd) -> tuple[np.ndarray, np.ndarray]:
    """高精度权重的 (log w, ω)"""
    weights = oracle_weights(p.n, p.alpha, p.beta, nodes_dd)
    omega = oracle_scaled_weights(p.n, p.alpha, p.beta, nodes_dd, weights)
    with mpmath.workdps(30):
        log_w = np.array([float(mpmath.log(w)) for w in weights])
    return log_w, omega


def _oracle_rule(p: JacobiParams, options: RuleOptions) -> QuadratureRule:
    reference = oracle_nodes(p.n, p.alpha, p.beta)
    log_w, omega = _oracle_arrays(p, reference)
    nodes = reference.to_float()
    flags = tuple(classify_points(p, options.regime, nodes))
    meta = RuleMeta(node_order=options.order, J=options.J, method=METHOD_ORACLE, flags=flags)
    return QuadratureRule(p, nodes, _from_log(log_w), log_w, omega, meta)


def _neighbour_brackets(nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """相邻节点中点作为区间，两端放宽到 [-1, 1]"""
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    return np.concatenate([[-1.0], mids]), np.concatenate([mids, [1.0]])


def _asymptotic_rule(p: JacobiParams, options: RuleOptions, hybrid: bool) -> QuadratureRule:
    estimates = all_nodes(p, options.order, options.J, options.threads)
    nodes = np.array([e.value for e in estimates])
    pairs = all_weights(p, nodes, options.J, options.weight_kind)
    log_w = np.array([pair.log_w for pair in pairs])
    omega = np.array([pair.omega_scaled for pair in pairs])
    flags = tuple(classify_points(p, options.regime, nodes))
    method = METHOD_ASYMPTOTIC

    if hybrid:
        method = METHOD_HYBRID
        idx = np.flatnonzero(np.array(flags) != IN_BULK)
        if len(idx):
            lower, upper = _neighbour_brackets(nodes)
            polished = polish_nodes(p.n, p.alpha, p.beta, nodes[idx], lower[idx], upper[idx])
            polished_log_w, polished_omega = _oracle_arrays(p, polished)
            nodes = nodes.copy()
            nodes[idx] = polished.to_float()
            log_w[idx] = polished_log_w
            omega[idx] = polished_omega
            flags = tuple(classify_points(p, options.regime, nodes))
            logger.info(f"混合模式已精修端点节点 | n: {p.n}, 数量: {len(idx)}")

    meta = RuleMeta(node_order=options.order, J=options.J, method=method, flags=flags)
    return QuadratureRule(p, nodes, _from_log(log_w), log_w, omega, meta)


def gauss_jacobi_rule(n: int, alpha: float, beta: float,
                      options: Optional[RuleOptions] = None) -> QuadratureRule:
    """
    构造 n 点 Gauss–Jacobi 规则

    auto 模式下 n 小于阈值、σ 或 |τ| 超出上界、或 α, β 为负时走高精度路径，
    否则走渐近路径；strict 时参数越界直接抛 RegimeError。
    """
    options = options or RuleOptions()
    p = derive_params(n, alpha, beta)
    if p.n < 1:
        raise DomainError(f"求积规则要求 n >= 1 | n: {n}")

    method = _dispatch(p, options)
    logger.info(
        f"构造求积规则 | n: {p.n}, alpha: {p.alpha}, beta: {p.beta}, "
        f"method: {method}, order: {options.order}, J: {options.J}"
    )
    if method == METHOD_ORACLE:
        rule = _oracle_rule(p, options)
    else:
        rule = _asymptotic_rule(p, options, hybrid=(method == METHOD_HYBRID))

    non_bulk = sum(flag != IN_BULK for flag in rule.meta.flags)
    logger.info(f"求积规则完成 | n: {p.n}, method: {rule.meta.method}, 非内区节点: {non_bulk}")
    return rule


def integrate(rule: QuadratureRule, f: Callable[[float], float], mode: str = MODE_WEIGHTED) -> float:
    """
    用规则求积

    weighted: Σ w_ℓ f(x_ℓ) ≈ ∫ f(x)(1-x)^α(1+x)^β dx
    plain: Σ w_ℓ f(x_ℓ) / ((1-x_ℓ)^α (1+x_ℓ)^β)，f 自带权函数
    """
    if mode == MODE_WEIGHTED:
        if np.any(np.isnan(rule.weights_classical)):
            raise DomainError("规则含不可表示的经典权重，无法用 weighted 模式求积")
        factors = rule.weights_classical
    elif mode == MODE_PLAIN:
        factors = np.exp(rule.log_weights_classical - log_weight_function(rule.params, rule.nodes))
    else:
        raise DomainError(f"未知的积分模式 | mode: {mode}")

    total = CompensatedSum()
    for x, factor in zip(rule.nodes, factors):
        total.add(factor * float(f(float(x))))
    return total.value


def total_mass(alpha: float, beta: float) -> float:
    """∫ (1-x)^α (1+x)^β dx = 2^{α+β+1} B(α+1, β+1)"""
    return math.exp((alpha + beta + 1) * math.log(2.0) + float(betaln(alpha + 1, beta + 1)))
