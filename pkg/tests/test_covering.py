"""Covering simulator: degenerate cases, monotonicity, lossy acceptance."""

import itertools

import numpy as np
import pytest

from mdlb import DiscreteConditional
from mdlb.cli import binary_noise_conditional, default_covering_spec
from mdlb.simulate import (
    CodebookSpec,
    block_divergence_stats,
    covering_simulation,
    verify_covering_monotonicity,
)


def point_mass_conditional():
    table = {}
    for y in itertools.product(range(2), repeat=2):
        row = np.zeros(4)
        row[0] = 1.0  # always predicts (0, 0)
        table[y] = row
    return DiscreteConditional(1, 2, 2, table)


class TestDegenerateCases:
    def test_point_mass_prior_covers_at_rate_zero(self):
        cond = point_mass_conditional()
        spec = CodebookSpec(m=4, conditional=cond, label_dist=(0.5, 0.5), prior=cond)
        points = covering_simulation(spec, rates=[0.0], trials=16)
        assert points[0].codebook_size == 1
        assert points[0].coverage == pytest.approx(1.0, abs=0)

    def test_zero_mass_prior_never_covers(self):
        cond = point_mass_conditional()
        spec = CodebookSpec(
            m=4,
            conditional=cond,
            label_dist=(0.5, 0.5),
            prior=np.array([0.0, 1.0]),  # prior mass only on the unused symbol
        )
        points = covering_simulation(spec, rates=[0.0, 1.0], trials=16)
        assert all(p.coverage == 0.0 for p in points)

    def test_budget_enforced(self):
        cond = point_mass_conditional()
        spec = CodebookSpec(m=8, conditional=cond, label_dist=(0.5, 0.5))
        with pytest.raises(ValueError):
            covering_simulation(spec, rates=[3.0], trials=4)


class TestMonotonicityAndDeterminism:
    def test_monotone_within_seed(self):
        spec = default_covering_spec(3)
        kl, _ = block_divergence_stats(spec)
        rates = np.linspace(max(kl - 0.5, 0.0), kl + 0.5, 6)
        points = covering_simulation(spec, rates, trials=32)
        coverages = [p.coverage for p in points]
        assert all(b >= a for a, b in zip(coverages, coverages[1:]))
        assert coverages[-1] > coverages[0]

    def test_worker_count_does_not_change_results(self):
        spec = default_covering_spec(5)
        rates = [0.5, 1.0]
        serial = covering_simulation(spec, rates, trials=130, workers=1)
        threaded = covering_simulation(spec, rates, trials=130, workers=4)
        assert serial == threaded

    def test_seeded_rerun_identical(self):
        spec = default_covering_spec(7)
        a = covering_simulation(spec, [0.8], trials=64)
        b = covering_simulation(default_covering_spec(7), [0.8], trials=64)
        assert a == b

    def test_acceptance_style_sweep(self):
        report = verify_covering_monotonicity(
            lambda i: default_covering_spec(i), n_seeds=5, trials=32
        )
        assert report.passed
        assert report.details["wins"] == 5


class TestDivergenceStats:
    def test_uniform_prior_cross_entropy(self):
        # With the uniform prior, KL + entropy = 2 log 2 per block exactly.
        spec = CodebookSpec(
            m=8,
            conditional=binary_noise_conditional(0.05),
            label_dist=(0.5, 0.5),
            prior=None,
        )
        kl, entropy = block_divergence_stats(spec)
        assert kl + entropy == pytest.approx(2 * np.log(2), abs=1e-12)

    def test_near_deterministic_conditional_small_entropy(self):
        spec = default_covering_spec(0)
        kl, entropy = block_divergence_stats(spec)
        assert entropy < 0.45
        assert kl > 0.5


class TestLossyCovering:
    def test_lossy_at_least_lossless(self):
        spec = default_covering_spec(11)
        rates = [0.3, 0.8]
        lossless = covering_simulation(spec, rates, trials=48)
        lossy = covering_simulation(spec, rates, trials=48, epsilon=0.5)
        for ll, ls in zip(lossless, lossy):
            assert ls.coverage >= ll.coverage - 1e-12

    def test_huge_epsilon_accepts_everything(self):
        spec = default_covering_spec(13)
        points = covering_simulation(spec, [0.0], trials=16, epsilon=10.0)
        assert points[0].coverage == pytest.approx(1.0, abs=0)

    def test_epsilon_zero_stricter_than_large(self):
        spec = default_covering_spec(17)
        tight = covering_simulation(spec, [0.5], trials=48, epsilon=1e-9)
        loose = covering_simulation(spec, [0.5], trials=48, epsilon=1.0)
        assert tight[0].coverage <= loose[0].coverage
