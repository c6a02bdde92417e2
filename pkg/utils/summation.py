"""
补偿求和

在 Kahan 求和的基础上用 two-sum 无误差变换累积舍入误差（Neumaier 变体），
对加数的大小顺序不敏感。
"""

from typing import Iterable


class CompensatedSum:
    """增量式补偿求和"""

    def __init__(self):
        self.sum = 0.0
        self.carry = 0.0

    def add(self, value: float) -> None:
        value = float(value)
        total = self.sum + value
        # two-sum：total + err 恰好等于 sum + value
        bb = total - self.sum
        err = (self.sum - (total - bb)) + (value - bb)
        self.sum = total
        self.carry += err

    def extend(self, values: Iterable[float]) -> "CompensatedSum":
        for value in values:
            self.add(value)
        return self

    @property
    def value(self) -> float:
        return self.sum + self.carry


def compensated_sum(values: Iterable[float]) -> float:
    return CompensatedSum().extend(values).value
