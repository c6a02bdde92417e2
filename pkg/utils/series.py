"""
截断幂级数运算

系数数组的第 0 轴是阶数，其余轴逐点广播（通常是 x 网格），支持复数。
所有运算都截断到输入的最短阶数。
"""

import numpy as np


def prod_series(series1: np.ndarray, series2: np.ndarray) -> np.ndarray:
    """两个截断级数的乘积"""
    series1 = np.asarray(series1)
    series2 = np.asarray(series2)
    N = min(len(series1), len(series2))
    dtype = np.result_type(series1, series2)
    shape = (N,) + np.broadcast(series1[0], series2[0]).shape
    output = np.zeros(shape, dtype=dtype)
    for n in range(N):
        for k in range(n + 1):
            output[n] += series1[k] * series2[n - k]
    return output


def power_series(series: np.ndarray, exponent: float) -> np.ndarray:
    """
    级数的实数次幂 f^g，取 f0^g 的主值分支

    由 f * (f^g)' = g * f' * f^g 得到逐阶递推。
    """
    series = np.asarray(series)
    if np.any(series[0] == 0):
        raise ZeroDivisionError("常数项不能为零")
    N = len(series)
    output = np.zeros_like(series, dtype=np.result_type(series, float))
    output[0] = series[0] ** exponent
    for n in range(1, N):
        acc = np.zeros_like(output[0])
        for k in range(1, n + 1):
            acc = acc + (exponent * k - (n - k)) * series[k] * output[n - k]
        output[n] = acc / (n * series[0])
    return output


def compose_series(series1: np.ndarray, series2: np.ndarray) -> np.ndarray:
    """
    复合 series1(series2)，要求 series2 常数项为零

    Horner 形式逐层相乘。
    """
    series1 = np.asarray(series1)
    series2 = np.asarray(series2)
    if np.any(series2[0] != 0):
        raise ValueError(f"内层级数常数项必须为零 | value: {series2[0]}")
    N = min(len(series1), len(series2))
    dtype = np.result_type(series1, series2)
    shape = (N,) + np.broadcast(series1[0], series2[0]).shape
    output = np.zeros(shape, dtype=dtype)
    output[0] = series1[N - 1]
    for j in range(N - 2, -1, -1):
        output = prod_series(output, series2[:N])
        output[0] += series1[j]
    return output


def derivative_series(series: np.ndarray) -> np.ndarray:
    """逐项求导，结果少一阶"""
    series = np.asarray(series)
    orders = np.arange(1, len(series)).reshape((-1,) + (1,) * (series.ndim - 1))
    return series[1:] * orders
