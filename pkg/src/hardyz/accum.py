"""Compensated summation helpers.

Long sums (Euler-Maclaurin main sums, divisor sums, panel reductions) go
through these instead of bare += so cancellation error stays at a few ulp
independent of length.
"""
from __future__ import annotations

import numpy as np


class Neumaier:
    """Scalar compensated accumulator (Kahan with Neumaier's branch).

    Unlike plain Kahan it stays exact when a term exceeds the running sum.
    """

    __slots__ = ("total", "carry")

    def __init__(self) -> None:
        self.total = 0.0
        self.carry = 0.0

    def add(self, x: float) -> None:
        t = self.total + x
        if abs(self.total) >= abs(x):
            self.carry += (self.total - t) + x
        else:
            self.carry += (x - t) + self.total
        self.total = t

    @property
    def value(self) -> float:
        return self.total + self.carry


def neumaier_sum(values) -> float:
    """Compensated sum of an iterable/array of floats."""
    acc = Neumaier()
    for v in np.asarray(values, dtype=float).ravel():
        acc.add(float(v))
    return acc.value


def chunked_sum(array: np.ndarray, chunk: int = 1 << 20) -> float:
    """Sum a long float array: pairwise inside chunks, compensated across.

    np.sum is pairwise (error ~ log n ulp); the compensated outer loop keeps
    the chunk partials from accumulating first-order error.
    """
    acc = Neumaier()
    flat = array.ravel()
    for start in range(0, flat.size, chunk):
        acc.add(float(np.sum(flat[start : start + chunk])))
    return acc.value
