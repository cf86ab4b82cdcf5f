"""Binary entropy and the doubled Jensen-Shannon divergence between Bernoullis.

All internal computation is in natural log (nats).  The exponential-moment
inequalities verified elsewhere in this package only hold in nats, while the
linear lower bound ``binary_jsd2(x, 0) >= x`` only holds in base 2; callers
pick the base explicitly via :class:`LogBase`.

Conventions: ``0 * log 0 := 0`` everywhere; endpoints return exact zeros.
"""

from __future__ import annotations

import enum
import math

from .validation import check_probability

__all__ = [
    "LogBase",
    "binary_entropy",
    "binary_jsd2",
    "binary_jsd2_inverse",
    "BINARY_JSD2_MAX",
]

_LN2 = math.log(2.0)

#: Maximum of ``binary_jsd2`` in nats, attained at (0, 1): two * ln 2.
BINARY_JSD2_MAX = 2.0 * _LN2


class LogBase(enum.Enum):
    """Logarithm base for entropy-like quantities."""

    NATURAL = "natural"
    BASE2 = "base2"

    def from_nats(self, value: float) -> float:
        """Convert a value in nats to this base."""
        return value if self is LogBase.NATURAL else value / _LN2

    def to_nats(self, value: float) -> float:
        """Convert a value in this base to nats."""
        return value if self is LogBase.NATURAL else value * _LN2


def binary_entropy(x: float, base: LogBase = LogBase.NATURAL) -> float:
    """Entropy of a Bernoulli(x) variable: ``-x log x - (1-x) log(1-x)``.

    Endpoints evaluate to exactly 0.  Raises ``ValueError`` outside [0, 1].
    """
    x = check_probability(x, "x")
    if x == 0.0 or x == 1.0:
        return 0.0
    h = -x * math.log(x) - (1.0 - x) * math.log(1.0 - x)
    return base.from_nats(h)


def binary_jsd2(x: float, x_prime: float, base: LogBase = LogBase.NATURAL) -> float:
    """Doubled Jensen-Shannon divergence between Bernoulli(x) and Bernoulli(x').

    Equals ``2 h((x + x')/2) - h(x) - h(x')`` where ``h`` is the binary
    entropy in the requested base.  Symmetric in its arguments, zero iff
    ``x == x'``, and at most ``2 log 2``.
    """
    x = check_probability(x, "x")
    x_prime = check_probability(x_prime, "x_prime")
    if x == x_prime:
        return 0.0
    lo, hi = (x, x_prime) if x < x_prime else (x_prime, x)  # exact symmetry
    h = 2.0 * binary_entropy((lo + hi) / 2.0) - binary_entropy(lo) - binary_entropy(hi)
    # Clamp tiny negative rounding residue; the quantity is >= 0 exactly.
    return base.from_nats(max(h, 0.0))


def binary_jsd2_inverse(
    x_prime: float,
    target: float,
    base: LogBase = LogBase.NATURAL,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Largest ``x`` in [x', 1] with ``binary_jsd2(x, x') == target``.

    ``binary_jsd2(., x')`` is nondecreasing on [x', 1], so the solution is
    unique; it is located by bisection to absolute tolerance ``tol``.

    Raises ``ValueError`` if ``target`` is negative or exceeds
    ``binary_jsd2(1, x')``.
    """
    x_prime = check_probability(x_prime, "x_prime")
    target = base.to_nats(float(target))
    if target < 0.0:
        raise ValueError(f"target must be >= 0, got {target!r}")
    hi_val = binary_jsd2(1.0, x_prime)
    if target > hi_val * (1.0 + 1e-12) + 1e-300:
        raise ValueError(
            f"target {target!r} exceeds binary_jsd2(1, {x_prime}) = {hi_val!r}"
        )
    if target == 0.0:
        return x_prime
    lo, hi = x_prime, 1.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if binary_jsd2(mid, x_prime) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)
