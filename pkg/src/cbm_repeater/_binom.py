"""Pascal-triangle table of binomial coefficients as floats."""

from __future__ import annotations

import numpy as np

MAX_N = 256


def _pascal(size: int) -> np.ndarray:
    table = np.zeros((size + 1, size + 1))
    table[:, 0] = 1.0
    for a in range(1, size + 1):
        table[a, 1 : a + 1] = table[a - 1, 1 : a + 1] + table[a - 1, 0:a]
    table.setflags(write=False)
    return table


_TABLE = _pascal(MAX_N)


def binom(a: int, b: int) -> float:
    """C(a, b) with C(a, b) = 0 outside 0 <= b <= a."""
    if b < 0 or b > a or a < 0:
        return 0.0
    if a > MAX_N:
        raise ValueError(f"binomial table covers a <= {MAX_N}, got {a}")
    return float(_TABLE[a, b])


def binom_pmf(total: int, k: int, p: float) -> float:
    return binom(total, k) * p**k * (1.0 - p) ** (total - k)


def upper_tail(total: int, lo: int, p: float) -> float:
    """P[Binomial(total, p) >= lo]."""
    return sum(binom_pmf(total, k, p) for k in range(max(lo, 0), total + 1))


def parity_mass(total: int, p: float, odd: bool) -> float:
    """P[Binomial(total, p) has the given parity]."""
    return sum(binom_pmf(total, k, p) for k in range(1 if odd else 0, total + 1, 2))
