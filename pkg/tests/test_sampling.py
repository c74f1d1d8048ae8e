from collections import Counter

import numpy as np
import pytest

from peakwalks.enumeration import brute_enumerate, count_family, family_predicate
from peakwalks.paths import FamilySpec, in_family, num_peaks, serialize_path
from peakwalks.sampling import (
    BatchRequest,
    EmptyFamilyError,
    RandomSource,
    sample_batch,
    sample_bridge,
    sample_composition,
    sample_excursion,
    sample_fair_walk,
    sample_family,
    sample_meander,
    sample_run_path,
    sample_unconditioned,
    sample_walk,
    weighted_index,
)
from peakwalks.stats import chi_square_uniform


def rng(seed=11, stream=0):
    return RandomSource(seed, stream).generator()


def chi_square_over_support(draw, support, draws):
    index = {serialize_path(p): i for i, p in enumerate(support)}
    counts = np.zeros(len(index), dtype=int)
    for _ in range(draws):
        counts[index[serialize_path(draw())]] += 1
    return chi_square_uniform(counts)


def test_composition_examples():
    g = rng()
    seen = Counter(tuple(sample_composition(2, 2, False, g)) for _ in range(3000))
    assert set(seen) == {(0, 2), (1, 1), (2, 0)}
    seen = Counter(tuple(sample_composition(3, 2, True, g)) for _ in range(1000))
    assert set(seen) == {(1, 2), (2, 1)}
    assert sample_composition(0, 0, True, g).size == 0
    with pytest.raises(ValueError):
        sample_composition(1, 2, True, g)
    with pytest.raises(ValueError):
        sample_composition(1, 0, False, g)


def test_composition_uniformity():
    g = rng(3)
    # Non-negative compositions of 4 into 3 parts: C(6, 2) = 15 outcomes.
    counts = Counter(tuple(sample_composition(4, 3, False, g)) for _ in range(30000))
    assert len(counts) == 15
    assert chi_square_uniform(list(counts.values())).passed


def test_trivial_families():
    g = rng()
    assert {str(sample_walk(2, 1, g)) for _ in range(20)} == {"ud"}
    assert {str(sample_bridge(2, 0, g)) for _ in range(20)} == {"du"}
    assert {str(sample_excursion(2, 1, g)) for _ in range(20)} == {"ud"}
    assert {str(sample_meander(1, 0, g)) for _ in range(20)} == {"u"}
    assert {str(sample_run_path("u", "d", 1, 4, 0, g)) for _ in range(20)} == {"uudd"}
    assert str(sample_excursion(0, 0, g)) == ""


@pytest.mark.parametrize(
    "family, n, k",
    [("w", 8, 2), ("b", 12, 2), ("e", 12, 3), ("m", 12, 4), ("m", 11, 3), ("w", 7, 0), ("m", 6, 0)],
)
def test_sampler_uniformity(family, n, k):
    support = list(brute_enumerate(n, family_predicate(family, k)))
    assert len(support) == count_family(FamilySpec(family, n, k))
    g = rng(5)
    report = chi_square_over_support(lambda: sample_family(FamilySpec(family, n, k), g), support, 40 * len(support) + 2000)
    assert report.passed, report


def test_run_path_uniformity():
    support = [p for p in brute_enumerate(5) if p.end == 1 and p.steps[0] < 0 and p.steps[-1] > 0 and num_peaks(p) == 1]
    g = rng(9)
    assert chi_square_over_support(lambda: sample_run_path("d", "u", 1, 5, 1, g), support, 5000).passed


def test_outputs_satisfy_postconditions():
    g = rng(2)
    for family, n, k in [("w", 40, 7), ("b", 40, 7), ("e", 40, 7), ("m", 40, 7), ("m", 41, 7)]:
        for _ in range(200):
            p = sample_family(FamilySpec(family, n, k), g)
            assert p.n == n and num_peaks(p) == k and in_family(p, family)


def test_infeasible_requests():
    g = rng()
    with pytest.raises(EmptyFamilyError):
        sample_family(FamilySpec("b", 5, 1), g)
    with pytest.raises(EmptyFamilyError):
        sample_excursion(6, 0, g)
    with pytest.raises(EmptyFamilyError):
        sample_walk(4, 3, g)
    with pytest.raises(EmptyFamilyError):
        sample_run_path("u", "d", 0, 4, 0, g)
    with pytest.raises(EmptyFamilyError):
        sample_unconditioned("e", 5, g)


def test_determinism_and_streams():
    a = [str(sample_walk(50, 10, rng(1, 0))) for _ in range(3)]
    b = [str(sample_walk(50, 10, rng(1, 0))) for _ in range(3)]
    assert a == b
    assert str(sample_walk(50, 10, rng(1, 0))) != str(sample_walk(50, 10, rng(1, 1)))


def test_unconditioned_small_families():
    g = rng(4)
    assert {str(sample_unconditioned("e", 4, g)) for _ in range(200)} == {"uudd", "udud"}
    assert {str(sample_unconditioned("b", 2, g)) for _ in range(200)} == {"ud", "du"}


def test_unconditioned_walk_matches_coin_flips():
    g = rng(8)
    draws = 60000
    ours = Counter(serialize_path(sample_unconditioned("w", 8, g)) for _ in range(draws))
    flips = Counter(serialize_path(sample_fair_walk(8, g)) for _ in range(draws))
    assert len(ours) == len(flips) == 256
    assert chi_square_uniform(list(ours.values())).passed
    assert chi_square_uniform(list(flips.values())).passed


def test_unconditioned_peak_law():
    g = rng(12)
    for family in "wbem":
        counts = Counter(num_peaks(sample_unconditioned(family, 12, g)) for _ in range(20000))
        weights = [count_family(FamilySpec(family, 12, k)) for k in range(7)]
        total = sum(weights)
        stat = sum((counts[k] - 20000 * w / total) ** 2 / (20000 * w / total) for k, w in enumerate(weights) if w)
        assert stat < 25, (family, stat)


def test_weighted_index_never_picks_zero_weight():
    g = rng()
    picks = {weighted_index((0, 3, 0, 1, 0), g) for _ in range(500)}
    assert picks == {1, 3}
    with pytest.raises(EmptyFamilyError):
        weighted_index((0, 0), g)


def test_batch_is_independent_of_worker_count():
    req = BatchRequest("m", 21, 4, seed=5)
    one = [str(p) for p in sample_batch(req, 250, workers=1, chunk=60)]
    three = [str(p) for p in sample_batch(req, 250, workers=3, chunk=60)]
    assert one == three and len(one) == 250
    with pytest.raises(EmptyFamilyError):
        list(sample_batch(BatchRequest("e", 3, 1, 0), 5))
