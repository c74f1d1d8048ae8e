import numpy as np
import pytest
from hypothesis import given, strategies as st

from peakwalks.enumeration import brute_enumerate
from peakwalks.paths import (
    FamilySpec,
    LatticePath,
    PathFormatError,
    SimpleChain,
    classify,
    counting_process,
    in_family,
    num_peaks,
    parse_path,
    peaks,
    serialize_path,
    valleys,
)

step_strings = st.text(alphabet="ud", max_size=40)


def test_heights_are_cached_and_consistent():
    p = parse_path("uudd")
    assert p.heights.tolist() == [0, 1, 2, 1, 0]
    assert len(p.heights) == p.n + 1
    with pytest.raises(ValueError):
        p.heights[0] = 3


def test_path_is_immutable():
    p = parse_path("ud")
    with pytest.raises(AttributeError):
        p.steps = np.array([1, 1])


@pytest.mark.parametrize(
    "text, expected",
    [("uudd", [2]), ("udud", [1, 3]), ("dd", []), ("", []), ("u", [])],
)
def test_peaks(text, expected):
    assert peaks(parse_path(text)) == expected


@pytest.mark.parametrize("text, expected", [("du", [1]), ("uudd", []), ("udud", [2])])
def test_valleys(text, expected):
    assert valleys(parse_path(text)) == expected


@pytest.mark.parametrize(
    "text, expected",
    [("uudd", [0, 0, 1, 1, 1]), ("udud", [0, 1, 1, 2, 2]), ("dddd", [0, 0, 0, 0, 0])],
)
def test_counting_process(text, expected):
    assert counting_process(parse_path(text)).tolist() == expected


@pytest.mark.parametrize(
    "text, expected",
    [("uudd", {"w", "b", "e", "m"}), ("du", {"w", "b"}), ("uu", {"w", "m"}), ("", {"w", "b", "e", "m"})],
)
def test_classify(text, expected):
    assert classify(parse_path(text)) == frozenset(expected)


def test_parse_and_serialize():
    assert parse_path("ud").steps.tolist() == [1, -1]
    assert parse_path("").n == 0
    with pytest.raises(PathFormatError) as err:
        parse_path("ux")
    assert err.value.index == 1


def test_constructor_rejects_bad_increments():
    with pytest.raises(ValueError):
        LatticePath([1, 0, -1])


@given(step_strings)
def test_serialize_round_trip(text):
    p = parse_path(text)
    assert serialize_path(p) == text
    assert classify(parse_path(serialize_path(p))) == classify(p)


@given(step_strings)
def test_counting_process_ends_at_peak_count(text):
    p = parse_path(text)
    assert counting_process(p)[-1] == len(peaks(p)) == num_peaks(p)


def test_peak_valley_difference_is_fixed_by_end_steps():
    for n in range(13):
        for p in brute_enumerate(n):
            diff = len(peaks(p)) - len(valleys(p))
            if n < 2:
                assert diff == 0
                continue
            first, last = p.steps[0], p.steps[-1]
            expected = 1 if (first, last) == (1, -1) else -1 if (first, last) == (-1, 1) else 0
            assert diff == expected


def test_family_spec_validation():
    with pytest.raises(ValueError):
        FamilySpec("x", 4, 1)
    with pytest.raises(ValueError):
        FamilySpec("w", -1, 0)
    assert not FamilySpec("b", 5, 1).feasible
    assert not FamilySpec("e", 4, 0).feasible
    assert FamilySpec("e", 0, 0).feasible
    assert not FamilySpec("w", 4, 3).feasible


def test_in_family_matches_classify():
    for p in brute_enumerate(6):
        for fam in "wbem":
            assert in_family(p, fam) == (fam in classify(p))


def test_simple_chain():
    c = SimpleChain.from_heights([0, 1, 1, 2])
    assert c.end == 2
    assert c.rises.tolist() == [1, 0, 1]
    with pytest.raises(ValueError):
        SimpleChain([0, 2])


def test_pickle_round_trip():
    import pickle

    p = parse_path("uddu")
    assert pickle.loads(pickle.dumps(p)) == p
    c = SimpleChain([1, 0, 1])
    assert pickle.loads(pickle.dumps(c)) == c
