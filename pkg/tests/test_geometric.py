"""Two-cluster compression demo: exact rate, distortion, and MI ladder."""

import math

import numpy as np
import pytest

from mdlb.simulate import geometric_compression_demo


class TestGeometricDemo:
    def test_lossy_rate_is_one_bit(self):
        report = geometric_compression_demo()
        assert report.lossy_rate_nats == pytest.approx(math.log(2), abs=0)
        assert report.lossy_rate_bits == 1.0

    def test_lossy_distortion_at_most_five_percent(self):
        report = geometric_compression_demo()
        assert report.lossy_distortion <= 0.05 + 1e-15
        assert report.lossy_distortion == pytest.approx(0.05, abs=1e-12)

    def test_distortion_monte_carlo_oracle(self):
        rng = np.random.default_rng(0)
        x = rng.uniform(0.0, 1.0, 400_000)
        u = np.where(x < 0.5, -1.0 + x / 5.0, 1.0 + x / 5.0)
        center = np.where(x < 0.5, -0.9, 1.1)
        mc = float(np.abs(u - center).mean())
        assert geometric_compression_demo().lossy_distortion == pytest.approx(mc, abs=2e-3)

    def test_mi_ladder_strictly_increasing(self):
        report = geometric_compression_demo()
        values = [mi for _, mi in report.quantized_mi]
        assert len(values) == 5
        assert all(b > a for a, b in zip(values, values[1:]))
        assert report.strictly_increasing()

    def test_finest_exceeds_coarsest_soundly(self):
        report = geometric_compression_demo()
        ladder = dict(report.quantized_mi)
        assert ladder[12] > ladder[4] + 1.0

    def test_mi_monte_carlo_oracle(self):
        # histogram MI estimate at q = 2^-6 agrees with the exact interval value
        q = 2.0**-6
        rng = np.random.default_rng(1)
        x = rng.uniform(0.0, 1.0, 500_000)
        u = np.where(x < 0.5, -1.0 + x / 5.0, 1.0 + x / 5.0)
        xi = np.floor(x / q).astype(int)
        ui = np.floor(u / q).astype(int) - math.floor(-1.0 / q)
        joint = np.zeros((xi.max() + 1, ui.max() + 1))
        np.add.at(joint, (xi, ui), 1.0)
        joint /= joint.sum()
        px = joint.sum(1, keepdims=True)
        pu = joint.sum(0, keepdims=True)
        mask = joint > 0
        mc = float(np.sum(joint[mask] * np.log(joint[mask] / (px @ pu)[mask])))
        exact = dict(geometric_compression_demo().quantized_mi)[6]
        assert mc == pytest.approx(exact, abs=0.01)

    def test_report_passes(self):
        assert geometric_compression_demo().to_report().passed

    def test_deterministic(self):
        a = geometric_compression_demo().to_report().to_json()
        b = geometric_compression_demo().to_report().to_json()
        assert a == b
