"""
渐近解与高精度参考解的逐节点对比

生成每个 ℓ 的节点绝对/相对误差、经典权重与缩放权重的相对误差，
即节点与权重精度图背后的数据。
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import mpmath
import numpy as np
import pandas as pd

from nodes import all_nodes
from oracle import oracle_nodes, oracle_scaled_weights, oracle_weights
from params_core import JacobiParams
from utils import config
from utils.exceptions import OracleSizeError
from weights import KIND_BOTH, all_weights

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["ell", "node_err_abs", "node_err_rel", "w_err_rel", "omega_err_rel"]


@dataclass(frozen=True)
class ComparisonReport:
    params: JacobiParams
    order: int
    J: int
    table: pd.DataFrame
    nodes: np.ndarray = field(repr=False)
    oracle_nodes: np.ndarray = field(repr=False)

    def to_csv(self, path: Optional[str] = None, digits: int = 17) -> Optional[str]:
        """写出误差表；path 为 None 时返回字符串"""
        return self.table[REPORT_COLUMNS].to_csv(path, index=False, float_format=f"%.{digits}g")

    def to_dict(self) -> dict:
        return {
            "n": self.params.n,
            "alpha": self.params.alpha,
            "beta": self.params.beta,
            "order": self.order,
            "J": self.J,
            "rows": self.table[REPORT_COLUMNS].to_dict(orient="list"),
        }

    def count_below(self, column: str, threshold: float,
                    ell_range: Optional[tuple[int, int]] = None) -> int:
        """column 小于 threshold 的行数，ell_range 为闭区间"""
        frame = self.table
        if ell_range is not None:
            frame = frame[(frame["ell"] >= ell_range[0]) & (frame["ell"] <= ell_range[1])]
        return int((frame[column] < threshold).sum())

    def summary(self) -> dict:
        stats = {"n": self.params.n, "order": self.order, "J": self.J}
        for column in REPORT_COLUMNS[1:]:
            stats[f"max_{column}"] = float(self.table[column].max())
            stats[f"median_{column}"] = float(self.table[column].median())
        return stats


def _relative(approx: np.ndarray, exact: np.ndarray) -> np.ndarray:
    scale = np.where(exact != 0, np.abs(exact), 1.0)
    return np.abs(approx - exact) / scale


def compare_report(p: JacobiParams, order: int = 2, J: int = 3,
                   threads: Optional[int] = None) -> ComparisonReport:
    """
    逐节点误差报告

    节点误差在双双精度下计算；经典权重误差在对数空间比较，超出浮点范围的权重也能比较。
    """
    if p.n > config.oracle_max_n:
        raise OracleSizeError(p.n, config.oracle_max_n)

    logger.info(f"开始对比 | n: {p.n}, alpha: {p.alpha}, beta: {p.beta}, order: {order}, J: {J}")
    reference = oracle_nodes(p.n, p.alpha, p.beta)
    ref_weights = oracle_weights(p.n, p.alpha, p.beta, reference)
    ref_omega = oracle_scaled_weights(p.n, p.alpha, p.beta, reference, ref_weights)

    estimates = all_nodes(p, order, J, threads)
    nodes = np.array([e.value for e in estimates])
    pairs = all_weights(p, nodes, J, KIND_BOTH)

    node_err_abs = np.abs((nodes - reference.hi) - reference.lo)
    ref_float = reference.to_float()
    node_err_rel = node_err_abs / np.where(ref_float != 0, np.abs(ref_float), 1.0)

    log_w = np.array([pair.log_w for pair in pairs])
    with mpmath.workdps(30):
        log_w_ref = np.array([float(mpmath.log(w)) for w in ref_weights])
    w_err_rel = np.abs(np.expm1(log_w - log_w_ref))
    omega = np.array([pair.omega_scaled for pair in pairs])
    omega_err_rel = _relative(omega, ref_omega)

    table = pd.DataFrame({
        "ell": np.arange(1, p.n + 1),
        "node_err_abs": node_err_abs,
        "node_err_rel": node_err_rel,
        "w_err_rel": w_err_rel,
        "omega_err_rel": omega_err_rel,
    })
    report = ComparisonReport(p, order, J, table, nodes, ref_float)
    logger.info(
        f"对比完成 | n: {p.n}, max节点误差: {table['node_err_abs'].max():.3e}, "
        f"max缩放权重误差: {table['omega_err_rel'].max():.3e}"
    )
    return report
