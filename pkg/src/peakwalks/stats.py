"""Goodness-of-fit statistics and the path functionals used in the checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Callable, Sequence

import numpy as np
from scipy import stats as sps

from .paths import FamilySpec, LatticePath, counting_process, num_peaks
from .sampling import sample_family, sample_peak_count

DEFAULT_ALPHA = 1e-3


@dataclass
class TestReport:
    """Outcome of one check.  ``passed`` means statistic < critical."""

    __test__ = False  # not a pytest class

    name: str
    statistic: float
    critical: float
    sample_size: int
    seed: int | None = None
    p_value: float | None = None
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.statistic < self.critical)

    def row(self) -> dict:
        out = {
            "name": self.name,
            "statistic": self.statistic,
            "critical": self.critical,
            "p_value": self.p_value,
            "passed": self.passed,
            "sample_size": self.sample_size,
            "seed": self.seed,
        }
        out.update(self.detail)
        return out


@dataclass(frozen=True)
class Histogram:
    edges: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) != len(self.edges) - 1:
            raise ValueError("need one count per bin")
        if any(b <= a for a, b in zip(self.edges, self.edges[1:])):
            raise ValueError("edges must be strictly increasing")

    @classmethod
    def from_samples(cls, samples, edges: Sequence[float]) -> "Histogram":
        counts, _ = np.histogram(np.asarray(samples, dtype=float), bins=np.asarray(edges, dtype=float))
        return cls(tuple(float(e) for e in edges), tuple(int(c) for c in counts))

    @property
    def total(self) -> int:
        return sum(self.counts)

    def merge(self, other: "Histogram") -> "Histogram":
        if self.edges != other.edges:
            raise ValueError("cannot merge histograms with different edges")
        return Histogram(self.edges, tuple(a + b for a, b in zip(self.counts, other.counts)))


def ks_critical(m: int, alpha: float = DEFAULT_ALPHA) -> float:
    """Asymptotic Kolmogorov critical value c(alpha)/sqrt(m)."""
    return math.sqrt(-math.log(alpha / 2) / 2) / math.sqrt(m)


def ks_statistic(
    samples,
    cdf: Callable[[np.ndarray], np.ndarray],
    alpha: float = DEFAULT_ALPHA,
    lattice: float | None = None,
    name: str = "ks",
    seed: int | None = None,
) -> TestReport:
    """Kolmogorov distance between the sample and a continuous reference CDF.

    With ``lattice=h`` the sample is taken to live on a grid of pitch h and
    each atom is spread uniformly over its cell before comparison; the
    distance is then read at the cell boundaries and the atoms.  Without that
    correction a lattice sample sits at least about (jump height)/2 away from
    any continuous law, whatever the sample size.
    """
    xs = np.sort(np.asarray(samples, dtype=float).reshape(-1))
    m = xs.size
    if m == 0:
        raise ValueError("empty sample")
    if m < 100:
        raise ValueError(f"need at least 100 samples, got {m}")
    atoms, counts = np.unique(xs, return_counts=True)
    below = np.concatenate(([0], np.cumsum(counts)[:-1])) / m
    upto = np.cumsum(counts) / m
    raw = float(max(np.max(np.abs(upto - cdf(atoms))), np.max(np.abs(below - cdf(atoms)))))
    detail = {"raw_D": raw}
    if lattice is None:
        stat = raw
    else:
        half = lattice / 2.0
        stat = float(
            max(
                np.max(np.abs(below - cdf(atoms - half))),
                np.max(np.abs(upto - cdf(atoms + half))),
                np.max(np.abs((below + upto) / 2 - cdf(atoms))),
            )
        )
        detail["lattice"] = lattice
    return TestReport(
        name=name,
        statistic=stat,
        critical=ks_critical(m, alpha),
        sample_size=m,
        seed=seed,
        detail=detail,
    )


def chi_square_critical(df: int, alpha: float = DEFAULT_ALPHA) -> float:
    """Wilson-Hilferty approximation to the upper-alpha chi-square quantile."""
    z = NormalDist().inv_cdf(1 - alpha)
    c = 2.0 / (9.0 * df)
    return df * (1 - c + z * math.sqrt(c)) ** 3


def chi_square_uniform(
    observed: Sequence[int],
    alpha: float = DEFAULT_ALPHA,
    name: str = "chi2",
    seed: int | None = None,
) -> TestReport:
    """Pearson chi-square of the counts against equal cell probabilities."""
    obs = np.asarray(observed, dtype=float)
    cells = obs.size
    total = obs.sum()
    if cells == 0:
        raise ValueError("no cells")
    expected = total / cells
    if expected < 5:
        raise ValueError(f"expected count per cell is {expected:.2f} < 5")
    stat = float(np.sum((obs - expected) ** 2) / expected)
    df = cells - 1
    if df == 0:
        return TestReport(name, 0.0, math.inf, int(total), seed, 1.0, {"cells": cells})
    return TestReport(
        name=name,
        statistic=stat,
        critical=chi_square_critical(df, alpha),
        sample_size=int(total),
        seed=seed,
        p_value=float(sps.chi2.sf(stat, df)),
        detail={"cells": cells},
    )


def pearson(xs, ys) -> float:
    a = np.asarray(xs, dtype=float)
    b = np.asarray(ys, dtype=float)
    if a.shape != b.shape or a.size < 2:
        raise ValueError("need two equal-length samples of size >= 2")
    a = a - a.mean()
    b = b - b.mean()
    denom = math.sqrt(float(a @ a) * float(b @ b))
    if denom == 0:
        raise ValueError("a sample has zero variance")
    return float(np.clip((a @ b) / denom, -1.0, 1.0))


CLT_BAND = 0.005
FULL_PATH_CHECKS = 1000


def peak_clt_sample(family: str, n: int, m: int, rng: np.random.Generator, seed: int | None = None) -> TestReport:
    """Mean and variance of (Lambda_n - n/4)/sqrt(n) over m uniform paths.

    The statistic is the larger of |mean| and |variance - 1/16|; both must
    stay inside CLT_BAND.
    """
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    # A uniform family member is "draw k, then a uniform path with k peaks",
    # so Lambda_n is the drawn k.  Full paths are built for a prefix as a check.
    values = np.array([sample_peak_count(family, n, rng) for _ in range(m)], dtype=float)
    for _ in range(min(m, FULL_PATH_CHECKS)):
        k = sample_peak_count(family, n, rng)
        if num_peaks(sample_family(FamilySpec(family, n, k), rng)) != k:
            raise AssertionError(f"{family}-sampler returned a path without {k} peaks")
    z = (values - n / 4) / math.sqrt(n)
    mean, var = float(z.mean()), float(z.var(ddof=1))
    return TestReport(
        name=f"peak-clt-{family}",
        statistic=max(abs(mean), abs(var - 1 / 16)),
        critical=CLT_BAND,
        sample_size=m,
        seed=seed,
        detail={"mean": mean, "variance": var},
    )


def modulus_of_continuity(values, delta: float) -> float:
    """sup |f(t) - f(s)| over grid points with |t - s| <= delta.

    ``values`` are f at the evenly spaced points i/n, i = 0..n.
    """
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    f = np.asarray(values, dtype=float)
    n = f.size - 1
    if n < 1:
        return 0.0
    span = int(math.floor(delta * n + 1e-9))
    if span == 0:
        return 0.0
    if span >= n:
        return float(f.max() - f.min())
    windows = np.lib.stride_tricks.sliding_window_view(f, span + 1)
    return float(np.max(windows.max(axis=1) - windows.min(axis=1)))


def peak_spread(path: LatticePath, k: int) -> float:
    """sup over l of |Lambda_l - (l/n) k| / n."""
    if num_peaks(path) != k:
        raise ValueError(f"path has {num_peaks(path)} peaks, expected {k}")
    n = path.n
    if n == 0:
        return 0.0
    lam = counting_process(path)
    return float(np.max(np.abs(lam - np.arange(n + 1) * (k / n))) / n)
