"""Block-coding coverage curves: how often a random codebook of size
ceil(exp(m R)) contains the realized (rearranged) prediction vector.

Each trial draws, independently per block, i.i.d. labels, a rearrangement
(training-position subset by default, pair swaps optionally) and a
prediction vector from the rearranged conditional.  Rather than
materializing the codebook, the coverage indicator is integrated out
analytically: a single codeword drawn from the prior matches with some
probability q, so a size-l codebook covers with probability 1 - (1 - q)^l.
This is exactly the coverage probability over the joint draw of data and
codebook, with far lower variance, and it makes coverage exactly monotone
in the rate for fixed data.

For the lossy criterion a codeword is acceptable when its ghost-minus-train
disagreement statistic falls within ``epsilon`` of the realized one
(one-sided, averaged over all m n sample slots); its single-codeword
probability is computed exactly by convolving per-block statistic
distributions.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from ..symmetry import DiscreteConditional, RearrangementJoint, _apply
from ..validation import check_natural, check_prob_vector
from .report import VerificationReport

__all__ = [
    "CodebookSpec",
    "CoveragePoint",
    "covering_simulation",
    "block_divergence_stats",
    "verify_covering_monotonicity",
]

CODEBOOK_CAP = 2**22
_ENUM_CAP = 4096


@dataclass
class CodebookSpec:
    """Covering-experiment configuration.

    ``conditional`` is the per-block kernel in canonical arrangement
    (training half first); ``prior`` is either a symmetric
    :class:`DiscreteConditional` over the same space or a 1-D marginal over
    the prediction alphabet (used as an i.i.d. product over all 2n slots).
    """

    m: int
    conditional: DiscreteConditional
    label_dist: tuple
    prior: object = None  # DiscreteConditional | 1-D marginal | None (uniform)
    rearrangement: str = "T"
    seed: int = 0

    def __post_init__(self):
        check_natural(self.m, "m", minimum=1)
        if self.rearrangement not in ("T", "J"):
            raise ValueError("rearrangement must be 'T' or 'J'")
        cond = self.conditional
        if cond.pred_alphabet ** cond.length > _ENUM_CAP:
            raise ValueError("prediction space too large for exact covering")
        if self.m * cond.n > 64:
            raise ValueError("m * n exceeds the covering budget")
        object.__setattr__(self, "label_dist", tuple(check_prob_vector(self.label_dist)))

    def prior_row(self, y: tuple) -> np.ndarray:
        """Prior probability row over prediction vectors, given labels ``y``."""
        cond = self.conditional
        if self.prior is None:
            size = cond.pred_alphabet**cond.length
            return np.full(size, 1.0 / size)
        if isinstance(self.prior, DiscreteConditional):
            return self.prior.table[y]
        marginal = check_prob_vector(self.prior, "prior")
        row = np.ones(1)
        for _ in range(cond.length):
            row = np.kron(row, marginal)
        return row


class CoveragePoint(NamedTuple):
    rate: float
    codebook_size: int
    coverage: float
    stderr: float


def _codebook_size(m: int, rate: float) -> int:
    if rate < 0.0:
        raise ValueError("rates must be >= 0")
    size = math.ceil(math.exp(m * rate))
    if size > CODEBOOK_CAP:
        raise ValueError(
            f"codebook size {size} exceeds the {CODEBOOK_CAP} budget at rate {rate}"
        )
    return size


def _single_codeword_probs(
    spec: CodebookSpec, epsilon: Optional[float], trials: int, seed_seq
) -> np.ndarray:
    """One match/acceptance probability per trial, exact given the data draw."""
    cond = spec.conditional
    n, length = cond.n, cond.length
    joint = RearrangementJoint(cond, spec.label_dist)
    perms = joint.rearrangements(spec.rearrangement)
    pred_vectors = cond.pred_vectors()
    label_dist = np.asarray(spec.label_dist)
    rng = np.random.default_rng(seed_seq)

    # Disagreement statistic per candidate vector: ghost errors minus train
    # errors, for a given label vector and rearrangement (lossy mode only).
    stat_cache: dict = {}

    def stats_for(y: tuple, perm: tuple) -> np.ndarray:
        key = (y, perm)
        if key not in stat_cache:
            train_pos, ghost_pos = perm[:n], perm[n:]
            arr = np.empty(len(pred_vectors), dtype=np.int64)
            for idx, v in enumerate(pred_vectors):
                ghost = sum(1 for p in ghost_pos if y[p] != v[p])
                train = sum(1 for p in train_pos if y[p] != v[p])
                arr[idx] = ghost - train
            stat_cache[key] = arr
        return stat_cache[key]

    out = np.empty(trials)
    for t in range(trials):
        log_match = 0.0
        total_real_stat = 0
        code_dist = np.array([1.0])  # distribution of the codeword statistic sum
        offset = 0  # code_dist[i] = P(sum == offset + i)
        for _ in range(spec.m):
            y = tuple(int(c) for c in rng.choice(len(label_dist), size=length, p=label_dist))
            perm = perms[rng.integers(len(perms))]
            y_perm = _apply(y, perm)
            row = cond.table[y_perm]
            sampled = int(rng.choice(row.size, p=row))
            w = pred_vectors[sampled]
            realized = [0] * length
            for slot, pos in enumerate(perm):
                realized[pos] = w[slot]
            realized = tuple(realized)
            prior_row = spec.prior_row(y)
            if epsilon is None:
                p_match = float(prior_row[cond.pred_index(realized)])
                log_match += math.log(p_match) if p_match > 0.0 else -math.inf
            else:
                stats = stats_for(y, perm)
                total_real_stat += int(stats[cond.pred_index(realized)])
                lo = int(stats.min())
                block = np.zeros(int(stats.max()) - lo + 1)
                np.add.at(block, stats - lo, prior_row)
                code_dist = np.convolve(code_dist, block)
                offset += lo
        if epsilon is None:
            out[t] = math.exp(log_match) if np.isfinite(log_match) else 0.0
        else:
            # accept codeword iff (realized - codeword stat) / (m n) < epsilon
            threshold = total_real_stat - epsilon * spec.m * n
            values = offset + np.arange(code_dist.size)
            out[t] = float(code_dist[values > threshold].sum())
    return np.clip(out, 0.0, 1.0)


def covering_simulation(
    spec: CodebookSpec,
    rates: Sequence[float],
    trials: int = 200,
    epsilon: Optional[float] = None,
    workers: int = 1,
) -> list[CoveragePoint]:
    """Empirical coverage at each rate, from ``trials`` shared data draws.

    All rates reuse the same draws, so coverage is exactly nondecreasing in
    the rate within one run.  Trials are split into fixed shards with
    per-shard seeds; the shard results are reduced in shard order, so the
    output is independent of ``workers``.
    """
    check_natural(trials, "trials", minimum=1)
    sizes = [_codebook_size(spec.m, r) for r in rates]
    shard_size = 64
    n_shards = (trials + shard_size - 1) // shard_size
    seeds = np.random.SeedSequence(spec.seed).spawn(n_shards)
    shard_trials = [
        min(shard_size, trials - i * shard_size) for i in range(n_shards)
    ]

    def run(i: int) -> np.ndarray:
        return _single_codeword_probs(spec, epsilon, shard_trials[i], seeds[i])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(n_shards)))
    else:
        parts = [run(i) for i in range(n_shards)]
    probs = np.concatenate(parts)

    points = []
    for rate, size in zip(rates, sizes):
        with np.errstate(divide="ignore"):
            miss = np.where(probs >= 1.0, -np.inf, size * np.log1p(-probs))
        coverage = -np.expm1(miss)
        points.append(
            CoveragePoint(
                rate=float(rate),
                codebook_size=size,
                coverage=float(coverage.mean()),
                stderr=float(coverage.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0,
            )
        )
    return points


def block_divergence_stats(spec: CodebookSpec) -> tuple[float, float]:
    """(label-averaged KL(conditional || prior), conditional entropy), in nats.

    Both per block; their sum is the exact-match rate threshold, and the KL
    alone is the threshold once the conditional is near-deterministic.
    """
    cond = spec.conditional
    label_dist = np.asarray(spec.label_dist)
    kl = 0.0
    entropy = 0.0
    for y in cond.label_vectors():
        w = float(np.prod([label_dist[c] for c in y]))
        if w == 0.0:
            continue
        p = cond.table[y]
        q = spec.prior_row(y)
        mask = p > 0.0
        kl += w * float(np.sum(p[mask] * (np.log(p[mask]) - np.log(q[mask]))))
        entropy += -w * float(np.sum(p[mask] * np.log(p[mask])))
    return kl, entropy


def verify_covering_monotonicity(
    spec_factory,
    n_seeds: int = 20,
    trials: int = 64,
    rate_points: int = 6,
    min_wins: Optional[int] = None,
) -> VerificationReport:
    """Coverage is nondecreasing in rate, and the high-rate point beats the
    low-rate point, across paired seeds (at least ``min_wins`` of them;
    defaults to all but one).

    ``spec_factory(seed)`` builds the :class:`CodebookSpec` for one seed.
    The sweep spans [max(KL - 0.5, 0), KL + 0.5] in ``rate_points`` steps.
    """
    if min_wins is None:
        min_wins = n_seeds - 1
    wins = 0
    monotone_all = True
    curves = {}
    for seed in range(n_seeds):
        spec = spec_factory(seed)
        kl, _ = block_divergence_stats(spec)
        low, high = max(kl - 0.5, 0.0), kl + 0.5
        rates = np.linspace(low, high, rate_points)
        points = covering_simulation(spec, rates, trials=trials)
        coverages = [p.coverage for p in points]
        if any(c2 < c1 - 1e-12 for c1, c2 in zip(coverages, coverages[1:])):
            monotone_all = False
        if coverages[-1] > coverages[0]:
            wins += 1
        curves[str(seed)] = coverages
    margin = float(wins - min_wins)
    if not monotone_all:
        margin = min(margin, -1.0)
    return VerificationReport.from_margin(
        "covering-rate-monotonicity",
        {
            "n_seeds": n_seeds,
            "trials": trials,
            "rate_points": rate_points,
            "min_wins": min_wins,
        },
        margin,
        0.0,
        wins=wins,
        monotone_within_every_seed=monotone_all,
        coverage_curves=curves,
    )
