"""Monte Carlo certification of the exponential moment of the L1 distance
between paired empirical label distributions.

The claim under test: for ``lam / n < 0.68``,

    log E[exp(lam * ||p_hat - p_hat'||_1)] <= (K + 2)/2 + 6 lam^2 / n.

A purely empirical upper confidence bound cannot certify this at feasible
sample sizes: mass ~1/trials hiding at the maximal distance 2 would
contribute ~exp(2 lam)/trials, which dwarfs the bound.  The certificate
therefore splits the moment at a data-driven point d0:

* below d0, a 99.5% empirical-Bernstein bound on E[exp(lam * min(D, d0))]
  (bounded range exp(lam d0));
* above d0, an analytic tail from bounded differences: changing one of the
  2n labels moves D by at most 2/n, so P(D - E[D] >= u) <= exp(-n u^2 / 4),
  anchored at a 99.5% empirical-Bernstein bound for E[D].

Union bound: 99% coverage overall.  The tail integral is Gaussian and
evaluated in closed form.
"""

from __future__ import annotations

import math

import numpy as np

from ..validation import check_natural, check_prob_vector
from .report import VerificationReport

__all__ = ["verify_l1_moment", "exact_log_mgf_binary", "l1_moment_bound"]


def l1_moment_bound(n_classes: int, n: int, lam: float) -> float:
    """The claimed log-moment bound ``(K + 2)/2 + 6 lam^2 / n``."""
    return (n_classes + 2.0) / 2.0 + 6.0 * lam * lam / n


def _bernstein_ucb(samples: np.ndarray, value_range: float, alpha: float) -> float:
    """One-sided empirical-Bernstein upper confidence bound on the mean."""
    t = samples.size
    la = math.log(1.0 / alpha)
    return float(
        samples.mean()
        + math.sqrt(2.0 * samples.var(ddof=1) * la / t)
        + 7.0 * value_range * la / (3.0 * (t - 1))
    )


def verify_l1_moment(
    n_classes: int,
    n: int,
    lam: float,
    trials: int = 10**5,
    seed: int = 0,
    label_dist=None,
    confidence: float = 0.99,
) -> VerificationReport:
    """99% UCB of the log moment vs. the claimed bound; pass if UCB <= bound."""
    check_natural(n_classes, "n_classes", minimum=2)
    check_natural(n, "n", minimum=1)
    check_natural(trials, "trials", minimum=100)
    if lam < 0.0:
        raise ValueError("lam must be >= 0")
    if lam / n >= 0.68:
        raise ValueError(f"lam/n must be < 0.68, got {lam / n:.3f}")
    p = (
        np.full(n_classes, 1.0 / n_classes)
        if label_dist is None
        else check_prob_vector(label_dist, "label_dist")
    )
    if p.shape[0] != n_classes:
        raise ValueError("label_dist length must equal n_classes")

    rng = np.random.default_rng(seed)
    counts_a = rng.multinomial(n, p, size=trials)
    counts_b = rng.multinomial(n, p, size=trials)
    dist = np.abs(counts_a - counts_b).sum(axis=1) / n

    alpha = (1.0 - confidence) / 2.0
    mean_ucb = _bernstein_ucb(dist, 2.0, alpha)
    d0 = min(2.0, mean_ucb + 2.0 * lam / n + 6.0 / math.sqrt(n))
    bulk = np.exp(lam * np.minimum(dist, d0))
    bulk_ucb = _bernstein_ucb(bulk, math.exp(lam * d0), alpha)
    if d0 >= 2.0:
        tail = 0.0
    else:
        boundary = math.exp(lam * d0 - n * (d0 - mean_ucb) ** 2 / 4.0)
        # Integral of lam * exp(lam s - n (s - mu)^2 / 4) over s >= d0.
        rate = n / 4.0
        shift = mean_ucb + 2.0 * lam / n
        integral = (
            lam
            * math.exp(lam * mean_ucb + lam * lam / n)
            * 0.5
            * math.sqrt(math.pi / rate)
            * math.erfc((d0 - shift) * math.sqrt(rate))
        )
        tail = boundary + integral

    log_mgf_ucb = math.log(bulk_ucb + tail)
    bound = l1_moment_bound(n_classes, n, lam)
    point_estimate = math.log(np.exp(lam * dist).mean())
    return VerificationReport.from_margin(
        f"l1-moment-K{n_classes}-n{n}-lam{lam:g}",
        {
            "n_classes": n_classes,
            "n": n,
            "lam": lam,
            "trials": trials,
            "seed": seed,
            "confidence": confidence,
            "label_dist": [float(v) for v in p],
        },
        bound - log_mgf_ucb,
        0.0,
        log_mgf_ucb=log_mgf_ucb,
        log_mgf_estimate=point_estimate,
        bound=bound,
        truncation_point=d0,
        tail_contribution=tail,
    )


def exact_log_mgf_binary(n: int, lam: float, p: float = 0.5) -> float:
    """Exact log moment for two classes, by the binomial double sum (oracle)."""
    check_natural(n, "n", minimum=1)
    ks = np.arange(n + 1)
    log_pmf = (
        np.array([math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1) for k in ks])
        + ks * math.log(p)
        + (n - ks) * math.log(1.0 - p)
    )
    pmf = np.exp(log_pmf)
    grid = np.abs(ks[:, None] - ks[None, :]) * (2.0 / n)
    return float(np.log(np.sum(pmf[:, None] * pmf[None, :] * np.exp(lam * grid))))
