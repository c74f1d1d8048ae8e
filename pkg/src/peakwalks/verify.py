"""Verification suites: exact oracle comparisons and seeded Monte Carlo checks.

Each suite returns a list of TestReports.  Exact checks report the number of
mismatches as the statistic with critical value 1, so they pass iff nothing
disagrees.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from typing import Callable

import numpy as np
from scipy.special import ndtr

from . import bijections as bj
from .enumeration import (
    STEP_TYPES,
    all_step_matrix,
    brute_enumerate,
    brute_family_table,
    catalan,
    count_family,
    count_T,
    count_T_nonneg,
    family_predicate,
    verify_su2,
)
from .limits import binomial_llt_error, bridge_ratio, lambda_eval, marginal_cdf, s_eval, scaling_params
from .paths import FAMILIES, FamilySpec, SimpleChain, counting_process, is_excursion, num_peaks, peaks, serialize_path
from .sampling import BatchRequest, RandomSource, sample_batch
from .stats import TestReport, chi_square_uniform, ks_statistic, peak_clt_sample, pearson, peak_spread

DEFAULT_SEED = 7
SUITES = ("counts", "bijections", "uniformity", "clt", "limits")
KS_BAND = 0.015
CORRELATION_BAND = 0.02


def _exact(name: str, mismatches: int, checked: int, **detail) -> TestReport:
    return TestReport(name, float(mismatches), 1.0, checked, detail={"checked": checked, **detail})


# ---------- counts ----------

def check_family_counts(max_n: int = 16) -> TestReport:
    bad = checked = 0
    for n in range(max_n + 1):
        table = brute_family_table(n)
        for family in FAMILIES:
            for k, brute in enumerate(table[family].tolist()):
                checked += 1
                bad += count_family(FamilySpec(family, n, k)) != brute
    return _exact("family-counts", bad, checked, max_n=max_n)


def _run_statistics(l: int):
    steps = all_step_matrix(l)
    heights = np.cumsum(steps, axis=1, dtype=np.int64)
    first = steps[:, 0] > 0
    last = steps[:, -1] > 0
    npk = np.count_nonzero((steps[:, :-1] > 0) & (steps[:, 1:] < 0), axis=1) if l >= 2 else np.zeros(len(steps), int)
    low = np.minimum(heights.min(axis=1), 0)
    return first, last, npk, heights[:, -1], low


def check_t_counts(max_l: int = 14) -> TestReport:
    """count_T and count_T_nonneg against every path of length l <= max_l."""
    bad = checked = 0
    for l in range(1, max_l + 1):
        first, last, npk, end, low = _run_statistics(l)
        groups: dict[tuple, list[int]] = defaultdict(list)
        for f, b, j, e, lo in zip(first.tolist(), last.tolist(), npk.tolist(), end.tolist(), low.tolist()):
            groups[("u" if f else "d", "u" if b else "d", j, e)].append(lo)
        lows = {key: np.sort(np.array(v)) for key, v in groups.items()}
        for a in STEP_TYPES:
            for b in STEP_TYPES:
                for j in range(l // 2 + 2):
                    for x in range(-l, l + 1):
                        for y in range(-l, l + 1):
                            arr = lows.get((a, b, j, y - x))
                            brute = 0 if arr is None else arr.size
                            checked += 1
                            bad += count_T(a, b, j, l, x, y) != brute
                            in_range = x >= (0 if a == "u" else 1) and y >= 1
                            boundary = x >= 0 and y >= 0 and ((a == "d" and x == 0) or (b == "u" and y == 0))
                            if in_range or boundary:
                                stays = 0 if arr is None else int(arr.size - np.searchsorted(arr, -x))
                                checked += 1
                                bad += count_T_nonneg(a, b, j, l, x, y) != stays
    return _exact("t-counts", bad, checked, max_l=max_l)


def check_su2(max_ab: int = 30, max_ck: int = 10) -> TestReport:
    bad = checked = 0
    for a in range(1, max_ab + 1):
        for b in range(1, max_ab + 1):
            for c in range(1, max_ck + 1):
                for k in range(1, max_ck + 1):
                    checked += 1
                    bad += not verify_su2(a, b, c, k)
    return _exact("su2-identity", bad, checked)


def suite_counts(max_n: int = 16, **_) -> list[TestReport]:
    return [check_family_counts(max_n), check_t_counts(min(max_n, 14)), check_su2()]


# ---------- bijections ----------

def check_phi(max_n: int = 14) -> TestReport:
    bad = checked = 0
    for n in range(max_n + 1):
        for path in brute_enumerate(n):
            chain = bj.phi(path)
            checked += 1
            bad += bj.phi_inv(chain) != path or chain.end != 2 * num_peaks(path) + 1
        # Chains of n+1 steps with odd end: the other composition.
        for rises in all_step_matrix(n + 1) if n + 1 <= 14 else ():
            chain = SimpleChain((rises > 0).astype(np.int8))
            if chain.end % 2 == 0:
                continue
            checked += 1
            bad += bj.phi(bj.phi_inv(chain)) != chain
    return _exact("phi-roundtrip", bad, checked, max_n=max_n)


def check_psi(max_n: int = 12) -> TestReport:
    bad = checked = 0
    for n in range(max_n + 1):
        for path in brute_enumerate(n):
            if path.end == n % 2:
                image = bj.psi(path)
                checked += 1
                bad += (
                    int(image.heights.min()) < 0
                    or peaks(image) != peaks(path)
                    or bj.psi_inv(image) != path
                )
            if int(path.heights.min()) >= 0:
                checked += 1
                bad += bj.psi(bj.psi_inv(path)) != path
    return _exact("psi-roundtrip", bad, checked, max_n=max_n)


def check_rhat(max_n: int = 12) -> TestReport:
    """Cyclic lemma on lengths 2N+1 <= max_n + 1."""
    bad = checked = 0
    for length in range(1, max_n + 2, 2):
        for path in brute_enumerate(length):
            if path.end != -1:
                continue
            if int(path.heights[:-1].min()) >= 0:
                for i in range(bj.non_peak_positions(path).size):
                    image = bj.rhat(path, i)
                    checked += 1
                    bad += image.end != -1 or num_peaks(image) != num_peaks(path) or bj.rhat_inv(image) != (path, i)
            if not (length > 1 and path.steps[0] < 0 and path.steps[-1] > 0):
                checked += 1
                bad += bj.rhat(*bj.rhat_inv(path)) != path
    return _exact("rhat-roundtrip", bad, checked, max_n=max_n)


def _excursions(max_n: int):
    for n in range(2, max_n + 1, 2):
        yield from brute_enumerate(n, is_excursion)


def check_rho_and_tree(max_n: int = 12) -> TestReport:
    bad = checked = 0
    for exc in _excursions(max_n):
        poly = bj.rho(exc)
        tree = bj.excursion_to_tree(exc)
        checked += 1
        bad += (
            bj.rho_inv(poly) != exc
            or bj.rho(bj.rho_inv(poly)) != poly
            or bj.tree_to_excursion(tree) != exc
            or bj.excursion_to_tree(bj.tree_to_excursion(tree)) != tree
            or tree.leaves != num_peaks(exc)
        )
    return _exact("rho-tree-roundtrip", bad, checked, max_n=max_n)


def check_polyomino_census(max_half: int = 7) -> TestReport:
    bad = checked = 0
    for half in range(1, max_half + 1):
        widths: Counter[int] = Counter()
        for exc in brute_enumerate(2 * half, is_excursion):
            poly = bj.rho(exc)
            widths[poly.width] += 1
            checked += 1
            bad += poly.area != int(exc.heights[peaks(exc)].sum())
        checked += 1
        bad += sum(widths.values()) != catalan(half)
        for k in range(1, half + 1):
            checked += 1
            bad += widths[k] != count_family(FamilySpec("e", 2 * half, k))
    return _exact("polyomino-census", bad, checked, max_half=max_half)


def suite_bijections(max_n: int = 12, **_) -> list[TestReport]:
    return [
        check_phi(min(max_n + 2, 14)),
        check_psi(max_n),
        check_rhat(max_n),
        check_rho_and_tree(max_n),
        check_polyomino_census(min(7, max_n // 2 + 1)),
    ]


# ---------- uniformity ----------

UNIFORMITY_CASES = (("w", 8, 2), ("b", 12, 2), ("e", 12, 3), ("m", 12, 4))


def check_uniformity(family: str, n: int, k: int, samples: int, seed: int, workers: int = 1) -> TestReport:
    support = {serialize_path(p): i for i, p in enumerate(brute_enumerate(n, family_predicate(family, k)))}
    counts = np.zeros(len(support), dtype=np.int64)
    outside = 0
    for path in sample_batch(BatchRequest(family, n, k, seed), samples, workers):
        idx = support.get(serialize_path(path))
        if idx is None:
            outside += 1
        else:
            counts[idx] += 1
    report = chi_square_uniform(counts, name=f"uniform-{family}-{n}-{k}", seed=seed)
    report.detail["outside_support"] = outside
    if outside:
        report.statistic = math.inf
    return report


def suite_uniformity(samples: int = 100_000, seed: int = DEFAULT_SEED, workers: int = 1, **_) -> list[TestReport]:
    return [check_uniformity(f, n, k, samples, seed, workers) for f, n, k in UNIFORMITY_CASES]


# ---------- peak-count CLT and the unconditioned walk ----------

def check_peak_clt(family: str, n: int, samples: int, seed: int) -> TestReport:
    return peak_clt_sample(family, n, samples, RandomSource(seed).generator(), seed=seed)


def unconditioned_walk_marginals(n: int, samples: int, seed: int, workers: int = 1):
    """(4(Lambda_{n/2} - n/8)/sqrt(n), S(n/2)/sqrt(n)) under the uniform walk."""
    half = n // 2
    counts = np.empty(samples)
    heights = np.empty(samples)
    for i, path in enumerate(sample_batch(BatchRequest("w", n, None, seed), samples, workers)):
        counts[i] = counting_process(path)[half]
        heights[i] = path.heights[half]
    return 4 * (counts - half / 4) / math.sqrt(n), heights / math.sqrt(n)


def check_unconditioned_walk(n: int, samples: int, seed: int, workers: int = 1) -> list[TestReport]:
    lam, height = unconditioned_walk_marginals(n, samples, seed, workers)
    ks = ks_statistic(lam, lambda x: ndtr(x / math.sqrt(0.5)), lattice=4 / math.sqrt(n),
                      name="walk-peak-process-ks", seed=seed)
    ks.detail["ks_critical"] = ks.critical
    ks.critical = KS_BAND
    r = pearson(lam, height)
    corr = TestReport("walk-peak-height-correlation", abs(r), CORRELATION_BAND, samples, seed, detail={"r": r})
    return [ks, corr]


def suite_clt(n: int = 4000, samples: int = 100_000, seed: int = DEFAULT_SEED, workers: int = 1, **_) -> list[TestReport]:
    reports = [check_peak_clt(f, n, samples, seed) for f in FAMILIES]
    return reports + check_unconditioned_walk(n, samples, seed, workers)


# ---------- Theorem-4 marginals ----------

LIMIT_VARIANCE = {"w": 0.5, "b": 0.25}


def limit_cdf(family: str) -> Callable[[np.ndarray], np.ndarray]:
    if family in LIMIT_VARIANCE:
        sd = math.sqrt(LIMIT_VARIANCE[family])
        return lambda x: ndtr(np.asarray(x) / sd)
    return lambda x: marginal_cdf(family, 0.5, x)


def conditioned_marginals(family: str, n: int, k: int, samples: int, seed: int, workers: int = 1):
    """(s_n(1/2), lambda_n(1/2)) over uniform k-peak paths."""
    params = scaling_params(n, k)
    s = np.empty(samples)
    lam = np.empty(samples)
    for i, path in enumerate(sample_batch(BatchRequest(family, n, k, seed), samples, workers)):
        s[i] = s_eval(path, params, 0.5)
        lam[i] = lambda_eval(path, k, params, 0.5)
    return s, lam


def check_marginals(family: str, n: int, k: int, samples: int, seed: int, workers: int = 1) -> list[TestReport]:
    params = scaling_params(n, k)
    s, lam = conditioned_marginals(family, n, k, samples, seed, workers)
    # S(n/2) has the parity of n/2, so s_n(1/2) sits on a grid of pitch 2/beta.
    lam_ks = ks_statistic(lam, lambda x: ndtr(2 * np.asarray(x)), lattice=2 / params.gamma,
                          name=f"{family}-lambda-ks", seed=seed)
    s_ks = ks_statistic(s, limit_cdf(family), lattice=2 / params.beta, name=f"{family}-height-ks", seed=seed)
    for rep in (lam_ks, s_ks):
        rep.detail["ks_critical"] = rep.critical
        rep.critical = KS_BAND
    s_ks.detail["beta"] = params.beta
    s_ks.detail["mean"] = float(s.mean())
    r = pearson(s, lam)
    corr = TestReport(f"{family}-height-peak-correlation", abs(r), CORRELATION_BAND, samples, seed, detail={"r": r})
    return [lam_ks, s_ks, corr]


def check_peak_spread(n: int, k: int, samples: int, seed: int, workers: int = 1) -> TestReport:
    values = np.array([peak_spread(p, k) for p in sample_batch(BatchRequest("e", n, k, seed), samples, workers)])
    return TestReport("excursion-peak-spread", float(values.mean()), 0.01, samples, seed,
                      detail={"scale": scaling_params(n, k).gamma / n})


def check_local_limit(n: int, k: int) -> list[TestReport]:
    p = scaling_params(n, k).p
    sigma = math.sqrt(n * p * (1 - p))
    lo, hi = math.ceil(n * p - 3 * sigma), math.floor(n * p + 3 * sigma)
    worst = max(binomial_llt_error(n, p, m) for m in range(lo, hi + 1))
    ratio = bridge_ratio(n, k)
    target = math.sqrt(2 / math.pi)
    return [
        TestReport("binomial-local-limit", worst, 0.01, hi - lo + 1, detail={"m_range": [lo, hi]}),
        TestReport("bridge-ratio", abs(ratio / target - 1), 0.05, 1, detail={"ratio": ratio, "target": target}),
    ]


def suite_limits(
    family: str | None = None,
    n: int = 10_000,
    k: int = 200,
    samples: int = 100_000,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    spread_samples: int = 10_000,
    **_,
) -> list[TestReport]:
    families = FAMILIES if family is None else (family,)
    reports: list[TestReport] = []
    for fam in families:
        reports.extend(check_marginals(fam, n, k, samples, seed, workers))
    if family in (None, "e"):
        reports.append(check_peak_spread(n, k, spread_samples, seed, workers))
    reports.extend(check_local_limit(n, k))
    return reports


SUITE_FUNCTIONS = {
    "counts": suite_counts,
    "bijections": suite_bijections,
    "uniformity": suite_uniformity,
    "clt": suite_clt,
    "limits": suite_limits,
}


def run_suite(name: str, **options) -> list[TestReport]:
    if name not in SUITE_FUNCTIONS:
        raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")
    return SUITE_FUNCTIONS[name](**options)
