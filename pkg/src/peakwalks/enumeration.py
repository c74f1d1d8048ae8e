"""Exact path counts.

Every count is a Python ``int``.  The binomial follows the convention that
``C(m, p)`` is zero unless ``0 <= p <= m`` (so negative arguments give zero).
"""

from __future__ import annotations

import math
from typing import Callable, Iterator, Literal

import numpy as np

from .paths import FamilySpec, LatticePath, num_peaks, in_family

StepType = Literal["u", "d"]
STEP_TYPES: tuple[StepType, StepType] = ("u", "d")

BRUTE_MAX_N = 24


def binom_conv(m: int, p: int) -> int:
    if m < 0 or p < 0 or p > m:
        return 0
    return math.comb(m, p)


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


def count_family(spec: FamilySpec) -> int:
    """Number of paths in family ``spec.family`` of length ``spec.n`` with exactly ``spec.k`` peaks."""
    family, n, k = spec.family, spec.n, spec.k
    if family == "w":
        return binom_conv(n + 1, n - 2 * k)
    if family == "m":
        return binom_conv(n // 2, k) * binom_conv((n + 1) // 2, k)
    if n % 2:
        return 0
    half = n // 2
    if family == "b":
        return binom_conv(half, k) ** 2
    # Narayana; the empty excursion is the only one with n = 0.
    if half == 0:
        return int(k == 0)
    return binom_conv(half, k) * binom_conv(half, k - 1) // half


def count_family_total(family: str, n: int) -> int:
    if n < 0:
        return 0
    if family == "w":
        return 2**n
    if family == "m":
        return math.comb(n, n // 2)
    if n % 2:
        return 0
    if family == "b":
        return math.comb(n, n // 2)
    if family == "e":
        return catalan(n // 2)
    raise ValueError(f"unknown family {family!r}")


def g_kernel(l: int, j1: int, j2: int, x: int, y: int) -> int:
    """C((l+y-x)/2 - 1, j1) * C((l-y+x)/2 - 1, j2), and 0 when l+y-x is odd."""
    if (l + y - x) % 2:
        return 0
    return binom_conv((l + y - x) // 2 - 1, j1) * binom_conv((l - y + x) // 2 - 1, j2)


def _positive_compositions(total: int, parts: int) -> int:
    # C(total-1, parts-1), except that 0 splits into 0 parts in exactly one way.
    if parts == 0:
        return int(total == 0)
    return binom_conv(total - 1, parts - 1)


def run_counts(a: StepType, b: StepType, j: int) -> tuple[int, int]:
    """(number of u-runs, number of d-runs) of a path with first step a, last b and j peaks."""
    return j + (b == "u"), j + (a == "d")


def count_T(a: StepType, b: StepType, j: int, l: int, x: int, y: int) -> int:
    """Paths of length l from x to y with first step a, last step b and j peaks.

    Counted through the run decomposition; this agrees with
    ``g_kernel(l, j - [b=d], j - [a=u], x, y)`` except for the monotone paths
    (no u-step or no d-step at all), where the kernel's ``C(-1, -1) = 0``
    undercounts by one.
    """
    _check_types(a, b)
    if l < 1 or j < 0:
        return 0
    rise = y - x
    if (l + rise) % 2:
        return 0
    ups, downs = (l + rise) // 2, (l - rise) // 2
    if ups < 0 or downs < 0:
        return 0
    u_runs, d_runs = run_counts(a, b, j)
    return _positive_compositions(ups, u_runs) * _positive_compositions(downs, d_runs)


def _check_types(a: str, b: str) -> None:
    if a not in STEP_TYPES or b not in STEP_TYPES:
        raise ValueError(f"step types must be 'u' or 'd', got {a!r}, {b!r}")


def count_T_nonneg(a: StepType, b: StepType, j: int, l: int, x: int, y: int) -> int:
    """Non-negative paths in T_ab^j(l, x, y), by the reflected-difference formula.

    Accepted arguments: x >= 0 and y >= 1 when a = 'u'; x >= 1 and y >= 1 when
    a = 'd'.  Two boundary cases are trivially empty and return 0 instead of
    raising: a = 'd' with x = 0, and b = 'u' with y = 0.  Anything else outside
    those ranges raises ``ValueError``.

    The first term is the unrestricted count ``count_T``; the subtracted term
    counts the paths that touch -1.  Both use the composition convention so
    that monotone paths are counted (see ``count_T``).
    """
    _check_types(a, b)
    if x >= 0 and y >= 0:
        if a == "d" and x == 0:
            return 0
        if b == "u" and y == 0:
            return 0
    lo_x = 0 if a == "u" else 1
    if x < lo_x or y < 1:
        raise ValueError(
            f"count_T_nonneg({a}{b}) is only valid for x >= {lo_x}, y >= 1; got x={x}, y={y}"
        )
    if l < 1 or j < 0:
        return 0
    total = count_T(a, b, j, l, x, y)
    # Paths reaching -1: the second kernel term, with its two binomials read as
    # composition counts.
    j1 = j - (a == "u") - (b == "d")
    if (l + y + x) % 2:
        return total
    ups, downs = (l + y + x) // 2, (l - y - x) // 2
    if ups < 0 or downs < 0:
        return total
    touching = _positive_compositions(ups, j1 + 1) * _positive_compositions(downs, j + 1)
    return total - touching


def count_excursion_via_T(n: int, k: int) -> int:
    """#E_n^(k) assembled from the non-negative T-counts ending one step early."""
    if n % 2:
        raise ValueError("excursions have even length")
    if n == 0:
        return int(k == 0)
    return count_T_nonneg("u", "d", k, n - 1, 0, 1) + (
        count_T_nonneg("u", "u", k - 1, n - 1, 0, 1) if k >= 1 else 0
    )


def su2_sides(a: int, b: int, c: int, k: int) -> tuple[int, int]:
    """Both sides of the alternating binomial summation identity."""
    lhs = 0
    for y in range(c, b + 1):
        lhs += binom_conv(a + y, k) * binom_conv(b - y, k - 1)
        lhs -= binom_conv(a + y, k - 1) * binom_conv(b - y, k)
    rhs = binom_conv(a + c, k) * binom_conv(b - c + 1, k)
    return lhs, rhs


def verify_su2(a: int, b: int, c: int, k: int) -> bool:
    if min(a, b, c, k) < 1:
        raise ValueError("a, b, c, k must be positive integers")
    lhs, rhs = su2_sides(a, b, c, k)
    return lhs == rhs


# ---------- brute-force oracle ----------

def _check_brute_n(n: int) -> None:
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > BRUTE_MAX_N:
        raise ValueError(f"brute-force enumeration is limited to n <= {BRUTE_MAX_N}, got {n}")


def all_step_matrix(n: int) -> np.ndarray:
    """All 2^n step sequences as an int8 matrix of shape (2^n, n), row r <-> bits of r."""
    _check_brute_n(n)
    codes = np.arange(2**n, dtype=np.int64)[:, None]
    bits = (codes >> np.arange(n, dtype=np.int64)[None, :]) & 1
    return (2 * bits - 1).astype(np.int8)


def brute_enumerate(n: int, predicate: Callable[[LatticePath], bool] | None = None) -> Iterator[LatticePath]:
    """Yield every path of length n (optionally filtered), 4096 rows at a time."""
    _check_brute_n(n)
    chunk = 4096
    shifts = np.arange(n, dtype=np.int64)[None, :]
    for start in range(0, 2**n, chunk):
        codes = np.arange(start, min(start + chunk, 2**n), dtype=np.int64)[:, None]
        rows = (2 * ((codes >> shifts) & 1) - 1).astype(np.int8)
        for row in rows:
            path = LatticePath._trusted(row)
            if predicate is None or predicate(path):
                yield path


def brute_count(n: int, predicate: Callable[[LatticePath], bool] | None = None) -> int:
    return sum(1 for _ in brute_enumerate(n, predicate))


def family_predicate(family: str, k: int | None = None) -> Callable[[LatticePath], bool]:
    def pred(path: LatticePath) -> bool:
        if not in_family(path, family):
            return False
        return k is None or num_peaks(path) == k

    pred.__name__ = f"in_{family}" + ("" if k is None else f"_with_{k}_peaks")
    return pred


def brute_family_table(n: int) -> dict[str, np.ndarray]:
    """Per-family peak-count histograms over all 2^n paths (vectorized oracle).

    Returns ``{family: counts}`` where ``counts[k]`` is the number of paths of
    that family with k peaks, for k = 0..n//2.
    """
    steps = all_step_matrix(n)
    heights = np.cumsum(steps, axis=1, dtype=np.int64)
    if n >= 2:
        npk = np.count_nonzero((steps[:, :-1] > 0) & (steps[:, 1:] < 0), axis=1)
    else:
        npk = np.zeros(steps.shape[0], dtype=np.int64)
    end = heights[:, -1] if n else np.zeros(1, dtype=np.int64)
    low = np.minimum(heights.min(axis=1), 0) if n else np.zeros(1, dtype=np.int64)
    masks = {
        "w": np.ones(steps.shape[0], dtype=bool),
        "b": end == 0,
        "m": low >= 0,
    }
    masks["e"] = masks["b"] & masks["m"]
    size = n // 2 + 1
    return {fam: np.bincount(npk[m], minlength=size)[:size] for fam, m in masks.items()}
