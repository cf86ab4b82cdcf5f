"""Checks for the hypergeometric tail: normalization, level inverse, and the
exponential-rate limit toward the doubled binary JSD.
"""

from __future__ import annotations

import numpy as np

from ..combinat import b_max, bucket, log_choose
from ..special import binary_jsd2
from .report import VerificationReport

__all__ = [
    "verify_bucket_vandermonde",
    "verify_b_max_level",
    "verify_bucket_asymptotics",
]


def verify_bucket_vandermonde(max_n: int = 100) -> VerificationReport:
    """``bucket(n, a, 0) == 1`` for all a <= n (the full Vandermonde sum)."""
    worst = float("inf")
    worst_case = None
    for n in range(1, max_n + 1):
        for a in range(0, n + 1):
            margin = 1e-10 - abs(bucket(n, a, 0) - 1.0)
            if margin < worst:
                worst, worst_case = margin, {"n": n, "a": a}
    return VerificationReport.from_margin(
        "bucket-vandermonde",
        {"max_n": max_n},
        worst,
        0.0,
        worst_case=worst_case,
        tolerance_abs=1e-10,
    )


def verify_b_max_level(max_n: int = 30, deltas=(0.5, 0.1, 0.01)) -> VerificationReport:
    """Defining property of the level inverse, exhaustively for n <= max_n.

    At ``b* = b_max(n, a, delta)``: ``bucket(n, a, b*) >= delta`` and every
    larger b in the scan range falls below delta.
    """
    worst = float("inf")
    worst_case = None
    for n in range(1, max_n + 1):
        for a in range(0, n + 1):
            for delta in deltas:
                b_star = b_max(n, a, delta)
                margin = bucket(n, a, b_star) - delta
                above = [
                    delta - bucket(n, a, b) for b in range(b_star + 1, n + 1)
                ]
                margin = min([margin] + above) if above else margin
                if margin < worst:
                    worst, worst_case = margin, {"n": n, "a": a, "delta": delta}
    return VerificationReport.from_margin(
        "b-max-level-inverse",
        {"max_n": max_n, "deltas": list(deltas)},
        worst,
        1e-12,
        worst_case=worst_case,
    )


def verify_bucket_asymptotics(
    n: int = 10, a: int = 2, b: int = 1, m_list=(10, 50, 250), final_tol: float = 0.05
) -> VerificationReport:
    """Blown-up summands converge at exponential rate to the doubled JSD.

    For each scale m and integer t in [b, a+b], compares
    ``-(1/(mn)) log [C(mn,mt) C(mn,ma+mb-mt) / C(2mn,ma+mb)]`` against
    ``jsd2(t/n, (a+b-t)/n)``.  Passes when the worst error at the largest
    scale is <= ``final_tol`` and errors decrease monotonically in m.
    The dominant summand must also sit where the exponent is smallest.
    """
    if max(m_list) * n > 10**6:
        raise ValueError("mn exceeds the 1e6 overflow guard")
    errors = []
    for m in m_list:
        errs = []
        for t in range(b, a + b + 1):
            log_term = (
                log_choose(m * n, m * t)
                + log_choose(m * n, m * (a + b) - m * t)
                - log_choose(2 * m * n, m * (a + b))
            )
            errs.append(abs(-log_term / (m * n) - binary_jsd2(t / n, (a + b - t) / n)))
        errors.append(max(errs))
    monotone = all(e2 < e1 for e1, e2 in zip(errors, errors[1:]))
    largest_m = max(m_list)
    exponents = [binary_jsd2(t / n, (a + b - t) / n) for t in range(b, a + b + 1)]
    summands = [
        log_choose(largest_m * n, largest_m * t)
        + log_choose(largest_m * n, largest_m * (a + b) - largest_m * t)
        - log_choose(2 * largest_m * n, largest_m * (a + b))
        for t in range(b, a + b + 1)
    ]
    dominant_ok = int(np.argmax(summands)) == int(np.argmin(exponents))
    worst = final_tol - errors[-1]
    if not monotone or not dominant_ok:
        worst = min(worst, -1.0)
    return VerificationReport.from_margin(
        "bucket-jsd2-asymptotics",
        {"n": n, "a": a, "b": b, "m_list": list(m_list), "final_tol": final_tol},
        worst,
        0.0,
        errors_by_m={str(m): e for m, e in zip(m_list, errors)},
        monotone_decreasing=monotone,
        dominant_term_matches=dominant_ok,
    )
