"""Exact counts of TRI_UP up-step paths, bucketed by the Z^2 arc they end on.

A path of ``k`` up-steps that uses the diagonal ``(1, 1)`` step ``i`` times
ends on the Z^2 arc of norm ``k + i``; there are ``C(k, i) * 2**(k - i)`` such
step sequences. Everything here is exact integer arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import UP_STEPS, LatticeVariant

BRUTEFORCE_MAX_K = 14


class BudgetError(ValueError):
    """Requested enumeration exceeds a named size cap."""


def binomial(k: int, i: int) -> int:
    if k < 0 or i < 0:
        raise ValueError(f"binomial needs non-negative arguments, got ({k}, {i})")
    if i > k:
        raise ValueError(f"binomial index i={i} exceeds k={k}")
    return math.comb(k, i)


def path_count(k: int, i: int) -> int:
    """Number of ``k``-step up-paths ending on the Z^2 arc of norm ``k + i``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not 0 <= i <= k:
        raise ValueError(f"arc offset i={i} outside [0, {k}]")
    return binomial(k, i) << (k - i)


def pascal_next(row: list[int]) -> list[int]:
    if not row:
        raise ValueError("pascal_next needs a non-empty row")
    return [a + b for a, b in zip([0, *row], [*row, 0])]


@dataclass(frozen=True)
class PathCountRow:
    k: int
    counts: dict[int, int]
    total: int

    def coefficient(self, i: int) -> int:
        return self.counts[i] >> (self.k - i)

    def records(self) -> list[dict]:
        """One record per ``i``; big integers rendered as decimal strings."""
        return [
            {
                "k": self.k,
                "i": i,
                "coefficient": str(self.coefficient(i)),
                "power_of_two": str(1 << (self.k - i)),
                "count": str(c),
            }
            for i, c in self.counts.items()
        ]


def count_row(k: int) -> PathCountRow:
    counts = {i: path_count(k, i) for i in range(k + 1)}
    return PathCountRow(k, counts, sum(counts.values()))


@dataclass(frozen=True)
class PathHistogram:
    k: int
    by_norm: dict[int, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.by_norm.values())


def enumerate_paths_bruteforce(k: int) -> PathHistogram:
    """Walk every one of the ``3**k`` up-step sequences and bucket by end norm.

    Sequence ``s`` is decoded base 3, digit ``j`` choosing the ``j``-th step.
    """
    if not 1 <= k <= BRUTEFORCE_MAX_K:
        raise BudgetError(
            f"brute-force enumeration supports 1 <= k <= {BRUTEFORCE_MAX_K} "
            f"(BRUTEFORCE_MAX_K), got k={k}"
        )
    steps = np.array(UP_STEPS[LatticeVariant.TRI_UP], dtype=np.int64)
    seq = np.arange(3**k, dtype=np.int64)
    a1 = np.zeros_like(seq)
    a2 = np.zeros_like(seq)
    for _ in range(k):
        digit = seq % 3
        seq //= 3
        a1 += steps[digit, 0]
        a2 += steps[digit, 1]
    norms = np.abs(a1) + np.abs(a2)
    tally = np.bincount(norms)
    return PathHistogram(k, {int(n): int(c) for n, c in enumerate(tally) if c})


def verify_row(k: int) -> bool:
    hist = enumerate_paths_bruteforce(k)
    if set(hist.by_norm) != set(range(k, 2 * k + 1)):
        return False
    return all(hist.by_norm[k + i] == path_count(k, i) for i in range(k + 1))
