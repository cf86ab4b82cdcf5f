"""Grid and exact-sum verification of the doubled-JSD inequalities.

``verify_jsd2_lemma`` checks the four structural properties of
``binary_jsd2`` on dense grids.  The quadratic lower bound (i) holds in
nats; the linear lower bound (ii) only holds in base 2 (in nats it fails
around x = 0.5 by ~0.07), so each part is checked in the base where
it holds and the other base's worst margin is recorded alongside.

``verify_exp_jsd2_sum`` evaluates, exactly in log domain, the hypergeometric
exponential moment

    S(n, V) = sum_j exp(n * jsd2(j/n, (V-j)/n)) C(n,j) C(n,V-j) / C(2n,V)

and tests the claim ``S(n, V) <= n`` for every V in [1, 2n].  The claim is
FALSE near V = n for n <= 32: the j = 0 and j = V edge terms contribute
``4^n / C(2n, n) ~ sqrt(pi n)`` each, e.g. S(10, 10) = 15.956 > 10.  The
check reports the counterexamples honestly; the sum does satisfy the bound
for all V once n >= 33 (also verified here on request).
"""

from __future__ import annotations

import numpy as np

from ..combinat import log_choose
from ..special import binary_entropy, binary_jsd2
from .report import VerificationReport

__all__ = [
    "verify_jsd2_lemma",
    "exp_jsd2_sum",
    "verify_exp_jsd2_sum",
    "verify_binomial_sandwich",
]

_LN2 = float(np.log(2.0))


def _jsd2_grid(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized binary_jsd2 in nats over a meshgrid."""

    def h(v):
        out = np.zeros_like(v)
        inner = (v > 0) & (v < 1)
        vi = v[inner]
        out[inner] = -vi * np.log(vi) - (1 - vi) * np.log(1 - vi)
        return out

    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return 2.0 * h((gx + gy) / 2.0) - h(gx) - h(gy)


def verify_jsd2_lemma(resolution: int = 400, seed: int = 0) -> VerificationReport:
    """Four-part grid check of the doubled binary JSD.

    (i)   jsd2(x, x') >= (x - x')^2          (nats)
    (ii)  jsd2(x, 0)  >= x                   (base 2)
    (iii) jsd2(., x') nondecreasing on [x', 1]
    (iv)  midpoint convexity in (x, x') jointly (random pairs)
    """
    if resolution < 100:
        raise ValueError("resolution must be >= 100")
    xs = np.linspace(0.0, 1.0, resolution)
    grid = _jsd2_grid(xs, xs)

    margin_i = float(np.min(grid - (xs[:, None] - xs[None, :]) ** 2))
    xs1k = np.linspace(0.0, 1.0, 1000)
    line = _jsd2_grid(xs1k, np.array([0.0]))[:, 0]
    margin_ii_bits = float(np.min(line / _LN2 - xs1k))
    margin_ii_nats = float(np.min(line - xs1k))
    margin_iii = float("inf")
    for j, xp in enumerate(xs):
        seg = grid[j:, j]  # jsd2(x, xp) for x >= xp
        if seg.size > 1:
            margin_iii = min(margin_iii, float(np.min(np.diff(seg))))
    rng = np.random.default_rng(seed)
    pairs = rng.uniform(1e-6, 1.0 - 1e-6, size=(2000, 4))
    mid = _pointwise_jsd2((pairs[:, 0] + pairs[:, 2]) / 2, (pairs[:, 1] + pairs[:, 3]) / 2)
    ends = _pointwise_jsd2(pairs[:, 0], pairs[:, 1]) + _pointwise_jsd2(pairs[:, 2], pairs[:, 3])
    margin_iv = float(np.min(ends / 2.0 - mid))

    worst = min(margin_i, margin_ii_bits, margin_iii, margin_iv)
    return VerificationReport.from_margin(
        "jsd2-lemma-grid",
        {"resolution": resolution, "seed": seed},
        worst,
        1e-12,
        quadratic_lower_nats=margin_i,
        linear_lower_bits=margin_ii_bits,
        linear_lower_nats=margin_ii_nats,
        monotone=margin_iii,
        midpoint_convexity=margin_iv,
    )


def _pointwise_jsd2(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    def h(v):
        v = np.clip(v, 1e-300, 1.0)
        return np.where((v > 0) & (v < 1), -v * np.log(v) - (1 - v) * np.log(np.clip(1 - v, 1e-300, 1)), 0.0)

    return 2.0 * h((x + y) / 2.0) - h(x) - h(y)


def exp_jsd2_sum(n: int, v: int) -> float:
    """Exact ``S(n, V)`` by log-sum-exp over the hypergeometric support."""
    terms = []
    for j in range(max(0, v - n), min(n, v) + 1):
        terms.append(
            n * binary_jsd2(j / n, (v - j) / n)
            + log_choose(n, j)
            + log_choose(n, v - j)
            - log_choose(2 * n, v)
        )
    terms = np.asarray(terms)
    m = float(terms.max())
    return float(np.exp(m) * np.exp(terms - m).sum())


def verify_exp_jsd2_sum(n_range=range(10, 15), rtol: float = 1e-9) -> VerificationReport:
    """Check ``S(n, V) <= n (1 + rtol)`` for every V in [1, 2n].

    Values of n below 10 are admitted but flagged as outside the stated
    range of the inequality.
    """
    worst = float("inf")
    failures = []
    per_n = {}
    outside = [int(n) for n in n_range if n < 10]
    for n in n_range:
        worst_n = float("inf")
        for v in range(1, 2 * n + 1):
            s = exp_jsd2_sum(n, v)
            margin = (n * (1.0 + rtol) - s) / n
            if margin < worst_n:
                worst_n = margin
            if s > n * (1.0 + rtol):
                failures.append({"n": int(n), "V": int(v), "sum": s})
        per_n[str(int(n))] = worst_n
        worst = min(worst, worst_n)
    return VerificationReport.from_margin(
        "exp-jsd2-hypergeometric-sum",
        {"n_range": [int(n) for n in n_range], "rtol": rtol},
        worst,
        0.0,
        failures=failures,
        worst_margin_per_n=per_n,
        outside_stated_range=outside,
    )


def verify_binomial_sandwich(max_n: int = 200) -> VerificationReport:
    """Sandwich bounds for C(n,j) e^{-n h(j/n)} over all 1 <= j <= n-1, n <= max_n.

    The lower bound is attained exactly at n=2, j=1, so margins are taken
    relative to a 1e-12 floating-point slack.
    """
    worst = float("inf")
    worst_case = None
    for n in range(2, max_n + 1):
        js = np.arange(1, n)
        log_v = np.array([log_choose(n, int(j)) for j in js]) - n * np.array(
            [binary_entropy(j / n) for j in js]
        )
        value = np.exp(log_v)
        lower = np.sqrt(n / (8.0 * js * (n - js)))
        upper = np.sqrt(n / (2.0 * np.pi * js * (n - js)))
        margins = np.minimum(value - lower, upper - value) / np.maximum(value, 1e-300)
        j_bad = int(np.argmin(margins))
        if float(margins[j_bad]) < worst:
            worst = float(margins[j_bad])
            worst_case = {"n": n, "j": int(js[j_bad])}
    return VerificationReport.from_margin(
        "binomial-entropy-sandwich",
        {"max_n": max_n},
        worst,
        1e-12,
        worst_case=worst_case,
    )
