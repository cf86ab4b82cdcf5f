"""Log-domain combinatorics: binomial coefficients, the Blum-Langford
``Bucket`` hypergeometric tail and its level inverse ``b_max``, and the
classical two-sided sandwich for ``C(n, j) e^{-n h(j/n)}`` (Gallager 1968,
exercise 5.8a).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import binary_entropy
from .validation import check_natural

__all__ = [
    "log_choose",
    "bucket",
    "b_max",
    "BinomialSandwich",
    "binomial_entropy_sandwich",
]


def log_choose(n: int, k: int) -> float:
    """Natural log of the binomial coefficient C(n, k), via log-gamma.

    Stable for ``n`` up to at least 1e6 (relative error ~1e-10).
    Raises ``ValueError`` when ``k`` is outside [0, n].
    """
    n = check_natural(n, "n")
    k = check_natural(k, "k")
    if k > n:
        raise ValueError(f"k must be <= n, got k={k}, n={n}")
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _log_bucket_terms(n: int, a: int, b: int) -> np.ndarray:
    """Log of each summand C(n,c) C(n,a+b-c) / C(2n,a+b) for c in [b, a+b].

    Terms with ``c > n`` or ``a + b - c > n`` are dropped (they are zero).
    """
    denom = log_choose(2 * n, a + b)
    cs = range(max(b, a + b - n), min(a + b, n) + 1)
    return np.array([log_choose(n, c) + log_choose(n, a + b - c) - denom for c in cs])


def bucket(n: int, a: int, b: int) -> float:
    """Hypergeometric tail ``sum_{c in [b, a+b]} C(n,c) C(n,a+b-c) / C(2n,a+b)``.

    This is the Blum-Langford PAC-MDL combinatorial tail: the probability
    that, when ``a + b`` marked items are split uniformly between two halves
    of size ``n``, at least ``b`` of them land in the first half.  Computed
    in log domain with log-sum-exp; the value lies in [0, 1].
    """
    n = check_natural(n, "n", minimum=1)
    a = check_natural(a, "a")
    b = check_natural(b, "b")
    if a + b > 2 * n:
        raise ValueError(f"a + b must be <= 2n, got a={a}, b={b}, n={n}")
    terms = _log_bucket_terms(n, a, b)
    if terms.size == 0:
        return 0.0
    m = terms.max()
    val = math.exp(m) * float(np.exp(terms - m).sum())
    return min(val, 1.0)


def b_max(n: int, a: int, delta: float) -> int:
    """Largest ``b`` with ``bucket(n, a, b) >= delta``.

    Scans ``b`` from ``n`` down to 0 and returns the first qualifying value.
    ``bucket(n, a, 0) == 1`` for any ``a <= n``, so a qualifying ``b`` always
    exists for ``delta <= 1``.  The comparison carries a 1e-12 absolute
    slack: the log-gamma evaluation of an exact tie (e.g. the Vandermonde
    sum, or the symmetric half-levels) can land a few ulps under it.
    """
    n = check_natural(n, "n", minimum=1)
    a = check_natural(a, "a")
    if a > n:
        raise ValueError(f"a must be <= n, got a={a}, n={n}")
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta!r}")
    for b in range(n, -1, -1):
        if bucket(n, a, b) >= delta - 1e-12:
            return b
    raise AssertionError("unreachable: bucket(n, a, 0) == 1 >= delta")


@dataclass(frozen=True)
class BinomialSandwich:
    """Two-sided estimate for ``C(n, j) e^{-n h(j/n)}`` (h in nats).

    ``lower <= value <= upper`` holds for all ``1 <= j <= n - 1``; the lower
    bound is attained exactly at ``n = 2, j = 1``, so comparisons should
    allow a ~1e-12 floating-point slack.
    """

    lower: float
    value: float
    upper: float

    def holds(self, rtol: float = 1e-12) -> bool:
        slack = rtol * max(abs(self.value), 1.0)
        return self.lower - slack <= self.value <= self.upper + slack


def binomial_entropy_sandwich(n: int, j: int) -> BinomialSandwich:
    """Sandwich ``sqrt(n/(8j(n-j))) <= C(n,j) e^{-n h(j/n)} <= sqrt(n/(2 pi j (n-j)))``.

    Raises ``ValueError`` unless ``1 <= j <= n - 1``.
    """
    n = check_natural(n, "n", minimum=2)
    j = check_natural(j, "j")
    if not 1 <= j <= n - 1:
        raise ValueError(f"j must satisfy 1 <= j <= n-1, got j={j}, n={n}")
    value = math.exp(log_choose(n, j) - n * binary_entropy(j / n))
    lower = math.sqrt(n / (8.0 * j * (n - j)))
    upper = math.sqrt(n / (2.0 * math.pi * j * (n - j)))
    return BinomialSandwich(lower=lower, value=value, upper=upper)
