"""
异常定义模块

所有库函数只抛出这里定义的异常，由 main.py 统一转换为退出码。
"""

from typing import Optional


class GaussJacobiError(Exception):
    """Gauss–Jacobi 计算相关异常的基类"""


class DomainError(GaussJacobiError, ValueError):
    """参数或自变量超出定义域"""


class RegimeError(GaussJacobiError, ValueError):
    """在振荡区间之外求值，或严格模式下参数超出渐近适用范围"""


class ConvergenceError(GaussJacobiError, RuntimeError):
    """迭代在给定次数内未收敛"""


class DegenerateSaddleError(GaussJacobiError, ArithmeticError):
    """鞍点处二阶导数退化"""


class OracleSizeError(GaussJacobiError):
    """高精度参考解的规模超过配置上限"""

    def __init__(self, n: int, limit: int):
        self.n = n
        self.limit = limit
        super().__init__(f"高精度参考解规模超限 | n: {n}, 上限: {limit}")


class OracleBracketError(GaussJacobiError, RuntimeError):
    """高精度求根时找不到变号区间或零点顺序错误"""

    def __init__(self, ell: int, detail: Optional[str] = None):
        self.ell = ell
        message = f"高精度求根区间失效 | ell: {ell}"
        if detail:
            message += f", {detail}"
        super().__init__(message)


class NodeOrderError(GaussJacobiError, RuntimeError):
    """渐近节点数量或单调性检查失败"""

    def __init__(self, ell: int, detail: Optional[str] = None):
        self.ell = ell
        message = f"节点顺序检查失败 | ell: {ell}"
        if detail:
            message += f", {detail}"
        super().__init__(message)
