import numpy as np


def as_array(x) -> tuple[np.ndarray, bool]:
    """标量或数组统一成一维 float 数组，并记住输入是否为标量"""
    values = np.asarray(x, dtype=float)
    return np.atleast_1d(values).ravel(), values.ndim == 0


def restore(values: np.ndarray, is_scalar: bool):
    """按输入形态还原：标量输入返回 float"""
    if is_scalar:
        return float(np.asarray(values).ravel()[0])
    return values
