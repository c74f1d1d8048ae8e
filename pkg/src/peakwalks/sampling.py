"""Exact-uniform samplers for walks, bridges, excursions and meanders with k peaks.

Every sampler pushes uniform choices (subsets, compositions) through an
exact bijection, so there is no rejection step and the cost is O(n) per path.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Sequence

import numpy as np

from .bijections import phi_inv, psi, rhat_inv
from .enumeration import count_family, count_family_total, count_T, run_counts
from .paths import FAMILIES, FamilySpec, LatticePath, SimpleChain

WORKERS_ENV = "PEAKWALKS_WORKERS"
DEFAULT_CHUNK = 1000


class EmptyFamilyError(ValueError):
    """Raised when a sampler is asked for a member of an empty family."""


@dataclass(frozen=True)
class RandomSource:
    """Deterministic random state keyed by (seed, stream)."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.PCG64(seq))


# ---------- primitive uniform objects ----------

def sample_subset(population: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform ``size``-subset of ``range(population)``, sorted."""
    if not 0 <= size <= population:
        raise ValueError(f"cannot choose {size} of {population}")
    if size == 0:
        return np.zeros(0, dtype=np.int64)
    return np.sort(rng.choice(population, size=size, replace=False))


def sample_composition(total: int, parts: int, positive: bool, rng: np.random.Generator) -> np.ndarray:
    """Uniform composition of ``total`` into ``parts`` ordered parts (stars and bars)."""
    if parts < 0 or total < 0:
        raise ValueError("total and parts must be non-negative")
    if parts == 0:
        if total:
            raise ValueError(f"cannot split {total} into zero parts")
        return np.zeros(0, dtype=np.int64)
    if positive:
        if total < parts:
            raise ValueError(f"cannot split {total} into {parts} positive parts")
        cuts = sample_subset(total - 1, parts - 1, rng) + 1
        return np.diff(np.concatenate(([0], cuts, [total])))
    bars = sample_subset(total + parts - 1, parts - 1, rng)
    return np.diff(np.concatenate(([-1], bars, [total + parts - 1]))) - 1


@lru_cache(maxsize=256)
def _cumulative(weights: tuple[int, ...]) -> np.ndarray:
    total = sum(weights)
    if total == 0:
        raise EmptyFamilyError("all weights are zero")
    running, table = 0, []
    for w in weights:
        running += w
        table.append(float(Fraction(running, total)))
    return np.array(table)


def weighted_index(weights: Sequence[int], rng: np.random.Generator) -> int:
    """Draw i with probability weights[i] / sum(weights); weights are exact ints."""
    table = _cumulative(tuple(weights))
    return int(np.searchsorted(table, rng.random(), side="right"))


def _runs_to_path(values: np.ndarray, lengths: np.ndarray) -> LatticePath:
    return LatticePath._trusted(np.repeat(values.astype(np.int8), lengths))


# ---------- conditioned samplers ----------

def sample_walk(n: int, k: int, rng: np.random.Generator) -> LatticePath:
    """Uniform on W_n^(k): 2k+1 rises among the n+1 chain steps, then phi_inv."""
    if n < 0 or not 0 <= k <= n // 2:
        raise EmptyFamilyError(f"W_{n}^({k}) is empty")
    rises = np.zeros(n + 1, dtype=np.int8)
    rises[sample_subset(n + 1, 2 * k + 1, rng)] = 1
    return phi_inv(SimpleChain(rises))


def sample_bridge(n: int, k: int, rng: np.random.Generator) -> LatticePath:
    """Uniform on B_n^(k).

    Between consecutive peaks ("ud" pairs) sit k+1 intervals; interval l holds
    x_l down-steps followed by x'_l up-steps, where x and x' are independent
    uniform non-negative compositions of n/2 - k into k+1 parts.
    """
    if n < 0 or n % 2 or not 0 <= k <= n // 2:
        raise EmptyFamilyError(f"B_{n}^({k}) is empty")
    free = n // 2 - k
    downs = sample_composition(free, k + 1, False, rng)
    ups = sample_composition(free, k + 1, False, rng)
    lengths = np.ones((k + 1, 4), dtype=np.int64)
    lengths[:, 0], lengths[:, 1] = downs, ups
    lengths[-1, 2:] = 0
    values = np.tile(np.array([-1, 1, 1, -1], dtype=np.int8), k + 1)
    return _runs_to_path(values, lengths.ravel())


def sample_run_path(a: str, b: str, j: int, l: int, y: int, rng: np.random.Generator) -> LatticePath:
    """Uniform on T_ab^j(l, 0, y) by drawing the u-run and d-run lengths."""
    if count_T(a, b, j, l, 0, y) == 0:
        raise EmptyFamilyError(f"T_{a}{b}^{j}({l}, 0, {y}) is empty")
    u_runs, d_runs = run_counts(a, b, j)
    up_lengths = sample_composition((l + y) // 2, u_runs, True, rng)
    down_lengths = sample_composition((l - y) // 2, d_runs, True, rng)
    total = u_runs + d_runs
    lengths = np.empty(total, dtype=np.int64)
    values = np.empty(total, dtype=np.int8)
    first, second = (up_lengths, down_lengths) if a == "u" else (down_lengths, up_lengths)
    lengths[0::2], lengths[1::2] = first, second
    values[0::2] = 1 if a == "u" else -1
    values[1::2] = -values[0]
    return _runs_to_path(values, lengths)


EXCURSION_TYPES = (("u", "u"), ("u", "d"), ("d", "d"))
ALL_TYPES = (("u", "u"), ("u", "d"), ("d", "u"), ("d", "d"))


@lru_cache(maxsize=256)
def _type_weights(types: tuple[tuple[str, str], ...], j: int, l: int, y: int) -> tuple[int, ...]:
    return tuple(count_T(a, b, j, l, 0, y) for a, b in types)


def _sample_typed(types, j: int, l: int, y: int, rng: np.random.Generator) -> LatticePath:
    weights = _type_weights(types, j, l, y)
    a, b = types[weighted_index(weights, rng)]
    return sample_run_path(a, b, j, l, y, rng)


def sample_excursion(n: int, k: int, rng: np.random.Generator) -> LatticePath:
    """Uniform on E_n^(k) through the cyclic lemma.

    Draw a uniform path of length n+1 ending at -1 with k peaks whose first
    and last steps are not (d, u), rotate it into an excursion followed by a
    down-step, and drop that step.
    """
    if n == 0 and k == 0:
        return LatticePath._trusted(np.zeros(0, dtype=np.int8))
    if n < 0 or n % 2 or not 1 <= k <= n // 2:
        raise EmptyFamilyError(f"E_{n}^({k}) is empty")
    hat = _sample_typed(EXCURSION_TYPES, k, n + 1, -1, rng)
    source, _ = rhat_inv(hat)
    return LatticePath._trusted(source.steps[:-1])


def sample_meander(n: int, k: int, rng: np.random.Generator) -> LatticePath:
    if n < 0 or not 0 <= k <= n // 2:
        raise EmptyFamilyError(f"M_{n}^({k}) is empty")
    if k == 0:
        return LatticePath._trusted(np.ones(n, dtype=np.int8))
    if n % 2 == 0:
        return psi(sample_bridge(n, k, rng))
    return psi(_sample_typed(ALL_TYPES, k, n, 1, rng))


_CONDITIONED: dict[str, Callable[[int, int, np.random.Generator], LatticePath]] = {
    "w": sample_walk,
    "b": sample_bridge,
    "e": sample_excursion,
    "m": sample_meander,
}


def sample_family(spec: FamilySpec, rng: np.random.Generator) -> LatticePath:
    if count_family(spec) == 0:
        raise EmptyFamilyError(f"{spec.family}-family with n={spec.n}, k={spec.k} is empty")
    return _CONDITIONED[spec.family](spec.n, spec.k, rng)


@lru_cache(maxsize=64)
def _peak_weights(family: str, n: int) -> tuple[int, ...]:
    return tuple(count_family(FamilySpec(family, n, k)) for k in range(n // 2 + 1))


def sample_peak_count(family: str, n: int, rng: np.random.Generator) -> int:
    """Number of peaks of a uniform member of the whole family."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    return int(np.searchsorted(_peak_table(family, n), rng.random(), side="right"))


@lru_cache(maxsize=64)
def _peak_table(family: str, n: int) -> np.ndarray:
    if count_family_total(family, n) == 0:
        raise EmptyFamilyError(f"{family}-family of length {n} is empty")
    return _cumulative(_peak_weights(family, n))


def sample_unconditioned(family: str, n: int, rng: np.random.Generator) -> LatticePath:
    """Uniform on the whole family of length n: draw k exactly, then condition."""
    k = sample_peak_count(family, n, rng)
    return _CONDITIONED[family](n, k, rng)


def sample_fair_walk(n: int, rng: np.random.Generator) -> LatticePath:
    """n independent fair coin flips; the reference law for unconditioned walks."""
    return LatticePath._trusted(rng.choice(np.array([-1, 1], dtype=np.int8), size=n))


# ---------- batches ----------

@dataclass(frozen=True)
class BatchRequest:
    """What to draw: ``k=None`` means unconditioned on the peak count."""

    family: str
    n: int
    k: int | None
    seed: int

    def draw(self, rng: np.random.Generator) -> LatticePath:
        if self.k is None:
            return sample_unconditioned(self.family, self.n, rng)
        return sample_family(FamilySpec(self.family, self.n, self.k), rng)

    def check(self) -> None:
        if self.k is None:
            if count_family_total(self.family, self.n) == 0:
                raise EmptyFamilyError(f"{self.family}-family of length {self.n} is empty")
        elif count_family(FamilySpec(self.family, self.n, self.k)) == 0:
            raise EmptyFamilyError(
                f"{self.family}-family with n={self.n}, k={self.k} is empty"
            )


def _run_chunk(args: tuple[BatchRequest, int, int]) -> list[LatticePath]:
    request, stream, size = args
    rng = RandomSource(request.seed, stream).generator()
    return [request.draw(rng) for _ in range(size)]


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def sample_batch(
    request: BatchRequest,
    count: int,
    workers: int = 1,
    chunk: int = DEFAULT_CHUNK,
) -> Iterator[LatticePath]:
    """Yield ``count`` draws in a fixed order.

    Draw i comes from stream ``i // chunk`` so the output does not depend on
    the number of workers.
    """
    request.check()
    jobs = [(request, s, min(chunk, count - s * chunk)) for s in range(-(-count // chunk))]
    if workers <= 1 or len(jobs) <= 1:
        for job in jobs:
            yield from _run_chunk(job)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for paths in pool.map(_run_chunk, jobs):
            yield from paths
