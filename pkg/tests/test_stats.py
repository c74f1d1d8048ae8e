import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import ndtr

from peakwalks.paths import parse_path
from peakwalks.sampling import RandomSource
from peakwalks.stats import (
    Histogram,
    chi_square_critical,
    chi_square_uniform,
    ks_critical,
    ks_statistic,
    modulus_of_continuity,
    peak_clt_sample,
    peak_spread,
    pearson,
)


def gen(seed=0):
    return RandomSource(seed).generator()


def test_ks_critical_constant():
    assert ks_critical(1) == pytest.approx(1.9495, abs=1e-4)


def test_ks_self_and_mismatch():
    g = gen(1)
    assert ks_statistic(g.normal(size=5000), ndtr).passed
    assert not ks_statistic(g.normal(size=10**4), lambda x: ndtr(2 * x)).passed


def test_ks_hand_value():
    samples = np.full(100, 0.5)
    assert ks_statistic(samples, lambda x: np.clip(x, 0, 1)).statistic == pytest.approx(0.5)
    with pytest.raises(ValueError):
        ks_statistic([], ndtr)


def test_ks_invariant_under_monotone_maps():
    x = gen(2).normal(size=1000)
    a = ks_statistic(x, ndtr).statistic
    b = ks_statistic(np.exp(x), lambda y: ndtr(np.log(y))).statistic
    assert a == pytest.approx(b, abs=1e-12)


def test_lattice_correction_removes_the_jump_floor():
    # A rounded normal sample: raw D is stuck near half a jump, the corrected D is not.
    g = gen(3)
    h = 0.1
    x = np.round(g.normal(scale=0.5, size=10**5) / h) * h
    rep = ks_statistic(x, lambda v: ndtr(np.asarray(v) / 0.5), lattice=h)
    assert rep.detail["raw_D"] > 0.035
    assert rep.statistic < 0.01


def test_chi_square():
    equal = chi_square_uniform([100] * 10)
    assert equal.statistic == 0 and equal.passed
    assert not chi_square_uniform([1000] + [0] * 9).passed
    g = gen(4)
    assert chi_square_uniform(np.bincount(g.integers(0, 126, 10**5), minlength=126)).passed
    with pytest.raises(ValueError):
        chi_square_uniform([1, 2, 3])


def test_wilson_hilferty_is_close_to_exact_quantile():
    from scipy.stats import chi2

    for df in (5, 49, 125, 224):
        assert chi_square_critical(df) == pytest.approx(chi2.isf(1e-3, df), rel=0.02)


def test_pearson():
    x = gen(5).normal(size=100)
    assert pearson(x, x) == pytest.approx(1.0)
    assert pearson(x, -x) == pytest.approx(-1.0)
    m = 10**5
    a, b = RandomSource(6, 0).generator().normal(size=m), RandomSource(6, 1).generator().normal(size=m)
    assert abs(pearson(a, b)) < 3 / math.sqrt(m) * 1.5
    with pytest.raises(ValueError):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        pearson([1], [1])


def test_histogram_merge():
    edges = [0, 1, 2, 3]
    g = gen(7)
    a, b, c = (g.uniform(0, 3, size=50) for _ in range(3))
    ha, hb, hc = (Histogram.from_samples(s, edges) for s in (a, b, c))
    assert ha.merge(hb) == hb.merge(ha)
    assert ha.merge(hb).merge(hc) == ha.merge(hb.merge(hc))
    assert ha.merge(hb) == Histogram.from_samples(np.concatenate([a, b]), edges)
    assert ha.total == 50
    with pytest.raises(ValueError):
        ha.merge(Histogram.from_samples(a, [0, 1, 3]))


def test_peak_clt_sample_small():
    rep = peak_clt_sample("w", 1000, 2000, gen(8))
    assert set(rep.detail) == {"mean", "variance"}
    assert abs(rep.detail["variance"] - 1 / 16) < 0.02
    with pytest.raises(ValueError):
        peak_clt_sample("w", 0, 10, gen(8))


def test_modulus_of_continuity():
    t = np.linspace(0, 1, 101)
    assert modulus_of_continuity(t, 0.1) == pytest.approx(0.1)
    assert modulus_of_continuity(np.zeros(50), 0.3) == 0.0
    with pytest.raises(ValueError):
        modulus_of_continuity(t, 0)


@given(st.lists(st.floats(-10, 10), min_size=2, max_size=40), st.floats(0.01, 0.5))
def test_modulus_is_monotone(values, delta):
    assert modulus_of_continuity(values, delta) <= modulus_of_continuity(values, min(1.0, 2 * delta)) + 1e-12


def test_peak_spread():
    n = 40
    even = parse_path("ud" * (n // 2))
    assert peak_spread(even, n // 2) <= 1 / n
    front = parse_path("ud" * 10 + "d" * 20)
    assert peak_spread(front, 10) == pytest.approx(10 / (2 * n), abs=1 / n)
    with pytest.raises(ValueError):
        peak_spread(front, 3)


@given(st.text(alphabet="ud", min_size=1, max_size=60))
def test_peak_spread_bounds(text):
    from peakwalks.paths import num_peaks

    p = parse_path(text)
    value = peak_spread(p, num_peaks(p))
    assert 0 <= value <= 0.5
