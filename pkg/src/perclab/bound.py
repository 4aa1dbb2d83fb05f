"""Log-space evaluation of first-moment thresholds and the limiting bound.

For generation ``k`` the mid arc offset is ``(k - 1) / 2`` (odd ``k``) or
``k / 2 - 1`` (even ``k``). Two probabilities are reported per ``k``:

* ``threshold`` -- the smallest ``p`` with ``C(k, mid) * 2**(k - mid) * p**k >= 1``;
* ``b_k`` -- ``1 / (sqrt(2) * C(k, mid)**(1/k))``, the same quantity with the
  k-independent prefactor (``sqrt(2)`` for odd ``k``, ``2`` for even ``k``)
  pulled out before taking the k-th root.

Both tend to ``2**-1.5``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

LIMIT = 2.0**-1.5
LN2 = math.log(2.0)

# Below this min(i, k - i) the direct log-sum is used; above it lgamma
# differences keep relative error under 1e-12 for k <= 1e6.
_LOGSUM_CUTOFF = 2000


def mid_index(k: int) -> int:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return (k - 1) // 2 if k % 2 else k // 2 - 1


def log_binomial(k: int, i: int) -> float:
    """Natural log of ``C(k, i)``."""
    if k < 0 or i < 0:
        raise ValueError(f"log_binomial needs non-negative arguments, got ({k}, {i})")
    if i > k:
        raise ValueError(f"binomial index i={i} exceeds k={k}")
    m = min(i, k - i)
    if m == 0:
        return 0.0
    if m <= _LOGSUM_CUTOFF:
        base = k - m
        return math.fsum(math.log1p(base / j) for j in range(1, m + 1))
    return math.lgamma(k + 1) - math.lgamma(m + 1) - math.lgamma(k - m + 1)


def log_path_count(k: int, i: int) -> float:
    return log_binomial(k, i) + (k - i) * LN2


def threshold_p(k: int, i: int) -> float:
    """Smallest ``p`` with ``C(k, i) * 2**(k - i) * p**k >= 1``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not 0 <= i <= k:
        raise ValueError(f"arc offset i={i} outside [0, {k}]")
    return math.exp(-log_path_count(k, i) / k)


@dataclass(frozen=True)
class BoundPoint:
    k: int
    mid: int
    log_count: float
    b_k: float
    threshold: float

    @property
    def abs_err(self) -> float:
        return abs(self.b_k - LIMIT)

    def record(self) -> dict:
        out = asdict(self)
        out["abs_err_vs_limit"] = self.abs_err
        return out


def bound_at(k: int) -> BoundPoint:
    mid = mid_index(k)
    log_c = log_binomial(k, mid)
    log_count = log_c + (k - mid) * LN2
    b_k = math.exp(-0.5 * LN2 - log_c / k)
    return BoundPoint(k, mid, log_count, b_k, math.exp(-log_count / k))


def bound_series(ks) -> list[BoundPoint]:
    ks = list(ks)
    if not ks:
        raise ValueError("bound_series needs at least one k")
    return [bound_at(k) for k in ks]


def geometric_ks(k_max: int, per_decade: int = 4, odd: bool = True) -> list[int]:
    """Roughly log-spaced generations from 1 up to ``k_max``, deduplicated."""
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    n = max(1, int(math.ceil(math.log10(k_max) * per_decade)))
    ks = sorted({max(1, round(10 ** (j / per_decade))) for j in range(n + 1)} | {k_max})
    if odd:
        ks = sorted({k if k % 2 else k + 1 for k in ks})
    return [k for k in ks if k <= k_max + (1 if odd else 0)]


@dataclass(frozen=True)
class PsiEstimate:
    k: int
    p: float
    log_psi: float


def psi_finite(k: int, p: float) -> PsiEstimate:
    """Log of the expected number of open paths to the mid arc at generation ``k``.

    The constant prefactor in front of the limit is not included.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    return PsiEstimate(k, p, log_path_count(k, mid_index(k)) + k * math.log(p))


def binom_kth_root_limit_check(k: int) -> float:
    """``C(k, (k - 1) / 2) ** (1 / k)`` for odd ``k``; approaches 2 from below."""
    if k < 1 or k % 2 == 0:
        raise ValueError(f"k must be a positive odd integer, got {k}")
    return math.exp(log_binomial(k, (k - 1) // 2) / k)
