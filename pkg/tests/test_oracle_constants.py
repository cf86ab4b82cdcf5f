"""Re-derive the frozen numeric expectations with a 40-digit oracle.

The other test modules assert against hard-coded decimals; this module is
where those decimals come from, so a typo in a frozen constant (or a drift
in the implementation) is caught from an independent code path.
"""

import math

import mpmath as mp
import pytest

from mdlb import (
    binary_entropy,
    binary_jsd2,
    binary_jsd2_inverse,
    binomial_entropy_sandwich,
    expected_gap_bound,
    kl_categorical,
    kl_diag_gaussian,
    label_tail_bounds,
    population_risk_bound,
    representation_gap_bound,
    representation_tail_bound,
    vc_complexity_term,
)
from mdlb.divergences import DiagGaussian

mp.mp.dps = 40


def _hb(x):
    x = mp.mpf(x)
    if x == 0 or x == 1:
        return mp.mpf(0)
    return -x * mp.log(x) - (1 - x) * mp.log(1 - x)


def _jsd2(x, xp):
    return 2 * _hb((mp.mpf(x) + mp.mpf(xp)) / 2) - _hb(x) - _hb(xp)


class TestEntropyFamily:
    def test_binary_entropy_quarter(self):
        assert binary_entropy(0.25) == pytest.approx(float(_hb("0.25")), abs=1e-14)

    def test_jsd2_half_zero(self):
        assert binary_jsd2(0.5, 0.0) == pytest.approx(float(_jsd2("0.5", 0)), abs=1e-14)

    def test_jsd2_inverse_solution(self):
        root = mp.findroot(lambda x: _jsd2(x, mp.mpf("0.2")) - mp.mpf("0.05"), mp.mpf("0.4"))
        assert binary_jsd2_inverse(0.2, 0.05) == pytest.approx(float(root), abs=1e-11)


class TestDivergences:
    def test_gaussian_wide(self):
        p = DiagGaussian([0.0], [4.0])
        q = DiagGaussian([0.0], [1.0])
        exact = (4 - 1 - mp.log(4)) / 2
        assert kl_diag_gaussian(p, q) == pytest.approx(float(exact), abs=1e-14)

    def test_categorical(self):
        exact = mp.mpf("0.5") * mp.log(2) + mp.mpf("0.5") * mp.log(mp.mpf(2) / 3)
        assert kl_categorical([0.5, 0.5], [0.25, 0.75]) == pytest.approx(
            float(exact), abs=1e-14
        )


class TestSandwich:
    def test_ten_three(self):
        s = binomial_entropy_sandwich(10, 3)
        exact_v = math.comb(10, 3) * mp.e ** (-10 * _hb(mp.mpf(3) / 10))
        assert s.value == pytest.approx(float(exact_v), rel=1e-12)
        assert s.lower == pytest.approx(float(mp.sqrt(mp.mpf(10) / (8 * 3 * 7))), abs=1e-15)
        assert s.upper == pytest.approx(
            float(mp.sqrt(mp.mpf(10) / (2 * mp.pi * 3 * 7))), abs=1e-15
        )


class TestBoundFormulas:
    def test_label_tail_pair(self):
        n, delta = 50, mp.mpf("0.05")
        plain = mp.sqrt(mp.mpf(4) / (2 * n - 1) * mp.log(mp.sqrt(2 * n) / delta))
        lossy = mp.sqrt(mp.log(2 / delta) / (2 * n)) + mp.sqrt(
            mp.mpf(4) / (2 * n - 1) * mp.log(mp.sqrt(8 * n) / delta)
        )
        pair = label_tail_bounds(0.0, n, 0.05)
        assert pair.plain == pytest.approx(float(plain), abs=1e-14)
        assert pair.lossy == pytest.approx(float(lossy), abs=1e-14)

    def test_representation_pair(self):
        assert representation_gap_bound(5.0, 2000, 10, 0.01) == pytest.approx(
            float(2 * mp.sqrt(mp.mpf(22) / 2000) + mp.mpf("0.01")), abs=1e-14
        )
        a = 1 + 2 + mp.log(40)
        exact = 2 * mp.sqrt(2 * a / 1000) + mp.sqrt(mp.log(40) / 1000)
        assert representation_tail_bound(1.0, 1000, 2, 0.05) == pytest.approx(
            float(exact), abs=1e-14
        )

    def test_population_risk_pair(self):
        target = mp.log(100) / 100
        root = mp.findroot(lambda x: _jsd2(x, 0) - target, mp.mpf("0.06"))
        res = population_risk_bound(0.0, 100, 0.0)
        assert res.risk == pytest.approx(float(root), abs=1e-11)
        assert res.linear == pytest.approx(float(target), abs=1e-16)

    def test_vc_budget(self):
        assert vc_complexity_term(100, 1) == pytest.approx(
            float(mp.log(200 * mp.e)), abs=1e-13
        )
        assert expected_gap_bound(vc_complexity_term(100, 1), 100) == pytest.approx(
            float(mp.sqrt(2 * mp.log(200 * mp.e) / 100)), abs=1e-14
        )
