"""End-to-end check: measured generalization gap vs. the in-expectation bound.

The learner is a stochastic memorizing threshold rule on a tiny integer
feature grid, applied independently to each of ``n_pairs`` train/ghost
sample pairs ("cells"): the cell's single training sample (x, y) places a
threshold that classifies it correctly (x itself for a positive sample,
x + 1 for a negative one), and every prediction is replaced by a uniform
coin flip with probability ``flip_prob``.

Because the cells are independent, the description-length term of the full
2 n-sample experiment factorizes: it equals ``n_pairs`` times the exact
pair-level conditional mutual information between the swap variable and the
predictions, which a one-pair table enumeration provides.  The bound
``sqrt(2 * total_mi / n_pairs)`` therefore applies to the cell-averaged
expected gap, and the check compares it against a Monte Carlo estimate over
full dataset draws (three standard errors of slack).
"""

from __future__ import annotations

import math

import numpy as np

from ..bounds import expected_gap_bound
from ..symmetry import DiscreteConditional, RearrangementJoint, conditional_mutual_information
from ..validation import check_natural, check_unit_interval
from .report import VerificationReport

__all__ = ["pair_kernel_table", "paired_threshold_experiment"]


def _rule_threshold(x: int, y: int) -> int:
    return x if y == 1 else x + 1


def _predict_prob_one(x: int, threshold: int, flip_prob: float) -> float:
    """P(prediction = 1 | input x) for the stochastic threshold rule."""
    base = 1.0 if x >= threshold else 0.0
    return (1.0 - flip_prob) * base + flip_prob * 0.5


def pair_kernel_table(grid: int = 4, flip_prob: float = 0.2) -> DiscreteConditional:
    """Exact P(train prediction, ghost prediction | train label, ghost label).

    Features are uniform on {0, ..., grid-1} with true label 1{x >= grid/2};
    the feature draw and the prediction noise are integrated out exactly.
    """
    check_natural(grid, "grid", minimum=2)
    if grid % 2 != 0:
        raise ValueError("grid must be even so labels are balanced")
    check_unit_interval(flip_prob, "flip_prob")
    boundary = grid // 2
    by_label = {0: range(0, boundary), 1: range(boundary, grid)}
    table = {}
    for y_t in (0, 1):
        for y_g in (0, 1):
            row = np.zeros(4)
            for x_t in by_label[y_t]:
                theta = _rule_threshold(x_t, y_t)
                p_t1 = _predict_prob_one(x_t, theta, flip_prob)
                for x_g in by_label[y_g]:
                    p_g1 = _predict_prob_one(x_g, theta, flip_prob)
                    w = 1.0 / (len(by_label[y_t]) * len(by_label[y_g]))
                    for pred_t in (0, 1):
                        for pred_g in (0, 1):
                            prob = (p_t1 if pred_t else 1.0 - p_t1) * (
                                p_g1 if pred_g else 1.0 - p_g1
                            )
                            row[2 * pred_t + pred_g] += w * prob
            table[(y_t, y_g)] = row
    return DiscreteConditional(n=1, label_alphabet=2, pred_alphabet=2, table=table)


def paired_threshold_experiment(
    n_pairs: int = 20,
    grid: int = 4,
    flip_prob: float = 0.2,
    draws: int = 10_000,
    seed: int = 0,
    slack_stderrs: float = 3.0,
) -> VerificationReport:
    """Monte Carlo expected gap <= sqrt(2 * MI / n) + ``slack_stderrs`` SEs."""
    check_natural(n_pairs, "n_pairs", minimum=1)
    check_natural(draws, "draws", minimum=2)
    kernel = pair_kernel_table(grid, flip_prob)
    mi_pair = conditional_mutual_information(
        RearrangementJoint(kernel, (0.5, 0.5)), "J"
    )
    total_mi = n_pairs * mi_pair
    bound = expected_gap_bound(total_mi, n_pairs)

    rng = np.random.default_rng(seed)
    x_train = rng.integers(0, grid, size=(draws, n_pairs))
    x_ghost = rng.integers(0, grid, size=(draws, n_pairs))
    boundary = grid // 2
    y_train = (x_train >= boundary).astype(int)
    y_ghost = (x_ghost >= boundary).astype(int)
    thresholds = np.where(y_train == 1, x_train, x_train + 1)
    # Expected 0-1 loss per sample: flips are uniform, threshold errors exact.
    base_train = (x_train >= thresholds).astype(int)
    base_ghost = (x_ghost >= thresholds).astype(int)
    loss_train = flip_prob / 2.0 + (1.0 - flip_prob) * (base_train != y_train)
    loss_ghost = flip_prob / 2.0 + (1.0 - flip_prob) * (base_ghost != y_ghost)
    gaps = (loss_ghost - loss_train).mean(axis=1)
    gap_mean = float(gaps.mean())
    stderr = float(gaps.std(ddof=1) / math.sqrt(draws))

    margin = bound + slack_stderrs * stderr - gap_mean
    return VerificationReport.from_margin(
        "paired-threshold-gap-vs-bound",
        {
            "n_pairs": n_pairs,
            "grid": grid,
            "flip_prob": flip_prob,
            "draws": draws,
            "seed": seed,
        },
        margin,
        0.0,
        gap_mean=gap_mean,
        gap_stderr=stderr,
        mi_per_pair=mi_pair,
        total_mi=total_mi,
        bound=bound,
    )
