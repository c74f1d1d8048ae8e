import math

import pytest

from peakwalks.enumeration import (
    binom_conv,
    brute_count,
    brute_enumerate,
    brute_family_table,
    catalan,
    count_excursion_via_T,
    count_family,
    count_family_total,
    count_T,
    count_T_nonneg,
    family_predicate,
    g_kernel,
    su2_sides,
    verify_su2,
)
from peakwalks.paths import FamilySpec, is_excursion, parse_path, peaks


def fam(f, n, k):
    return count_family(FamilySpec(f, n, k))


@pytest.mark.parametrize("m, p, expected", [(5, 2, 10), (3, 5, 0), (-1, 0, 0), (4, -1, 0), (0, 0, 1)])
def test_binom_conv(m, p, expected):
    assert binom_conv(m, p) == expected


def test_count_family_examples():
    assert fam("w", 12, 3) == 1716
    assert fam("e", 12, 3) == 50
    assert fam("w", 2, 1) == 1
    assert all(fam("b", 2 * n, 0) == 1 for n in range(20))
    assert fam("e", 0, 0) == 1
    assert fam("e", 4, 0) == 0
    assert fam("b", 5, 1) == 0


def test_count_family_total_examples():
    assert count_family_total("e", 12) == 132
    assert count_family_total("w", 10) == 1024
    assert count_family_total("m", 4) == 6
    assert count_family_total("b", 3) == 0


@pytest.mark.parametrize("family", "wbem")
def test_row_sums_match_totals(family):
    for n in range(0, 201, 7):
        assert sum(fam(family, n, k) for k in range(n // 2 + 1)) == count_family_total(family, n)


def test_meanders_and_bridges_agree_for_even_length():
    for n in range(0, 201, 2):
        for k in range(n // 2 + 1):
            assert fam("b", n, k) == fam("m", n, k)


def test_narayana_symmetry():
    for half in range(1, 101):
        for k in range(1, half + 1):
            assert fam("e", 2 * half, k) == fam("e", 2 * half, half + 1 - k)


def test_counts_match_brute_force_small():
    for n in range(13):
        table = brute_family_table(n)
        for family in "wbem":
            for k in range(n // 2 + 1):
                assert fam(family, n, k) == table[family][k], (family, n, k)


def test_brute_enumerate_and_count():
    assert brute_count(4, is_excursion) == 2
    assert brute_count(12, family_predicate("w", 3)) == 1716
    assert brute_count(0) == 1
    assert [str(p) for p in brute_enumerate(0)] == [""]
    with pytest.raises(ValueError):
        brute_count(25)


@pytest.mark.parametrize(
    "args, expected", [((4, 0, 0, 0, 0), 1), ((4, 1, 0, 0, 2), 2), ((3, 0, 0, 0, 0), 0)]
)
def test_g_kernel(args, expected):
    assert g_kernel(*args) == expected


def test_g_kernel_undercounts_monotone_paths():
    # The all-up path of length 3 has no peak and is the only member of
    # T_uu^0(3, 0, 3), but the kernel form C(2, 0) C(-1, -1) gives 0.
    assert count_T("u", "u", 0, 3, 0, 3) == 1
    assert g_kernel(3, 0, -1, 0, 3) == 0


@pytest.mark.parametrize(
    "args, expected",
    [(("u", "d", 1, 4, 0, 0), 1), (("u", "d", 1, 3, 0, 1), 1), (("d", "u", 0, 2, 0, 0), 1)],
)
def test_count_T_examples(args, expected):
    assert count_T(*args) == expected


def test_count_T_translation_invariance():
    for x in range(-3, 4):
        assert count_T("u", "d", 2, 9, x, x + 1) == count_T("u", "d", 2, 9, 0, 1)


def test_count_T_sums_to_binomial():
    for l in range(1, 15):
        for y in range(-l, l + 1):
            total = sum(count_T(a, b, j, l, 0, y) for a in "ud" for b in "ud" for j in range(l))
            expected = math.comb(l, (l + y) // 2) if (l + y) % 2 == 0 else 0
            assert total == expected


@pytest.mark.parametrize(
    "args, expected",
    [(("u", "d", 1, 3, 0, 1), 1), (("u", "u", 1, 5, 0, 1), 1), (("d", "u", 0, 2, 1, 1), 1)],
)
def test_count_T_nonneg_examples(args, expected):
    assert count_T_nonneg(*args) == expected


def test_count_T_nonneg_uu_example_by_enumeration():
    # Only "uuddu" qualifies: "ududu" has two peaks and "udduu" dips below 0.
    hits = [
        str(p)
        for p in brute_enumerate(5)
        if p.end == 1 and p.heights.min() >= 0 and p.steps[0] > 0 and p.steps[-1] > 0 and len(peaks(p)) == 1
    ]
    assert hits == ["uuddu"]


def test_count_T_nonneg_boundaries():
    assert count_T_nonneg("d", "d", 1, 6, 0, 2) == 0
    assert count_T_nonneg("u", "u", 1, 6, 2, 0) == 0
    with pytest.raises(ValueError):
        count_T_nonneg("u", "d", 1, 6, -1, 1)
    with pytest.raises(ValueError):
        count_T_nonneg("u", "d", 1, 6, 0, 0)
    with pytest.raises(ValueError):
        count_T("x", "d", 1, 6, 0, 0)


def _literal_nonneg(a, b, j, l, x, y):
    # Reflected-difference formula read with the kernel's binomial convention.
    ju, jd = j - (b == "d"), j - (a == "u")
    return g_kernel(l, ju, jd, x, y) - g_kernel(l, j - (a == "u") - (b == "d"), j, -x, y)


def test_literal_reflected_formula_misses_the_all_up_path():
    # Documented defect: the literal form gives 0 for the single all-up path.
    for l in range(1, 8):
        assert count_T_nonneg("u", "u", 0, l, 0, l) == 1
        assert _literal_nonneg("u", "u", 0, l, 0, l) == 0


def test_count_excursion_via_T():
    assert count_excursion_via_T(12, 3) == 50
    assert count_excursion_via_T(4, 1) == 1
    assert count_excursion_via_T(2, 1) == 1
    for half in range(1, 30):
        for k in range(half + 2):
            assert count_excursion_via_T(2 * half, k) == fam("e", 2 * half, k)


def test_su2():
    assert verify_su2(1, 1, 1, 1)
    assert verify_su2(5, 7, 2, 3)
    for a in range(1, 31, 3):
        for b in range(1, 31, 2):
            for c in range(1, 31, 4):
                for k in range(1, 31, 5):
                    assert verify_su2(a, b, c, k)
    with pytest.raises(ValueError):
        verify_su2(0, 1, 1, 1)
    lhs, rhs = su2_sides(2, 4, 1, 1)
    assert lhs == rhs


def test_catalan():
    assert [catalan(n) for n in range(7)] == [1, 1, 2, 5, 14, 42, 132]


def test_brute_enumerate_filters():
    got = sorted(str(p) for p in brute_enumerate(4, family_predicate("e")))
    assert got == ["udud", "uudd"]
    assert parse_path("uudd") in list(brute_enumerate(4, family_predicate("e", 1)))
