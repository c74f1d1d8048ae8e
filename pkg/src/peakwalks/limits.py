"""Scaling constants, normalized processes and the Brownian limit densities."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import integrate, special

from .enumeration import count_family
from .paths import FamilySpec, LatticePath, counting_process

SQRT_2PI = math.sqrt(2.0 * math.pi)
QUAD_TOL = 1e-11


@dataclass(frozen=True)
class ScalingParams:
    p: float
    beta: float
    gamma: float


def scaling_params(n: int, k: int) -> ScalingParams:
    """p = 2k/n, beta = sqrt(n(1-p)/p), gamma = sqrt(n p (1-p))."""
    if not 0 < 2 * k < n:
        raise ValueError(f"scaling needs 0 < k < n/2, got n={n}, k={k}")
    p = 2 * k / n
    beta = math.sqrt(n * (1 - p) / p)
    return ScalingParams(p=p, beta=beta, gamma=math.sqrt(n * p * (1 - p)))


def _check_times(t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any((arr < 0) | (arr > 1)) or np.any(np.isnan(arr)):
        raise ValueError("t must lie in [0, 1]")
    return arr


def s_eval(path: LatticePath, params: ScalingParams, t):
    """S(nt) / beta, linearly interpolated between integer abscissae."""
    arr = _check_times(t)
    out = np.interp(arr * path.n, np.arange(path.n + 1), path.heights) / params.beta
    return float(out) if out.ndim == 0 else out


def lambda_eval(path: LatticePath, k: int, params: ScalingParams, t):
    """2 (Lambda_{nt} - t k) / gamma, linearly interpolated."""
    arr = _check_times(t)
    lam = np.interp(arr * path.n, np.arange(path.n + 1), counting_process(path))
    out = 2.0 * (lam - arr * k) / params.gamma
    return float(out) if out.ndim == 0 else out


# ---------- densities ----------

@dataclass(frozen=True)
class TimeGrid:
    """0 < t_1 < ... < t_l = 1."""

    times: tuple[float, ...]

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        object.__setattr__(self, "times", times)
        if not times:
            raise ValueError("a time grid needs at least one time")
        if times[-1] != 1.0:
            raise ValueError("the last time must be 1")
        if times[0] <= 0 or any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("times must be strictly increasing and positive")

    @property
    def steps(self) -> np.ndarray:
        return np.diff(np.concatenate(([0.0], self.times)))


def transition_density(t: float, x, y):
    """Heat kernel p_t(x, y)."""
    d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    return np.exp(-d * d / (2.0 * t)) / np.sqrt(2.0 * math.pi * np.asarray(t, dtype=float))


def _walk_product(dts: np.ndarray, xs: np.ndarray) -> float:
    prev = np.concatenate(([0.0], xs[:-1]))
    return float(np.prod(transition_density(dts, prev, xs)))


def _meander_raw(dts: np.ndarray, xs: np.ndarray) -> float:
    if np.any(xs < 0):
        return 0.0
    t1, x1 = dts[0], xs[0]
    val = SQRT_2PI * x1 / t1 * float(transition_density(t1, 0.0, x1))
    for dt, a, b in zip(dts[1:], xs[:-1], xs[1:]):
        val *= float(transition_density(dt, a, b) - transition_density(dt, a, -b))
    return val


def _excursion_raw(dts: np.ndarray, xs: np.ndarray) -> float:
    # dts has one more entry than xs: the last gap ends at time 1.
    last = dts[-1]
    return _meander_raw(dts[:-1], xs) * xs[-1] / last * float(transition_density(last, xs[-1], 0.0))


_norm_lock = threading.Lock()
_norm_cache: dict[tuple[float, ...], float] = {}


def excursion_normalizer(grid: TimeGrid) -> float:
    """Total mass of the raw excursion product over the grid.

    The killed kernels between interior times integrate out against the exit
    factor x/(1-t) p_{1-t}(x, 0), which is space-time harmonic for the killed
    heat flow.  The mass therefore reduces to a single integral at t_1.
    """
    key = grid.times
    with _norm_lock:
        if key in _norm_cache:
            return _norm_cache[key]
    if len(key) < 2:
        raise ValueError("the excursion density needs at least one interior time")
    t1 = key[0]

    def integrand(x: float) -> float:
        return _excursion_raw(np.array([t1, 1.0 - t1]), np.array([x]))

    mass, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=QUAD_TOL, epsrel=QUAD_TOL)
    with _norm_lock:
        _norm_cache[key] = mass
    return mass


def fdd_density(family: str, grid: TimeGrid, values: Sequence[float]) -> float:
    """Joint density of the limit process at the grid times.

    Walks and meanders take one value per grid time.  Bridges and excursions
    are pinned at time 1, so they take one value per interior time.  The
    excursion product is divided by its total mass (see ``excursion_normalizer``).
    """
    xs = np.asarray(values, dtype=float).reshape(-1)
    dts = grid.steps
    size = len(grid.times)
    want = size if family in ("w", "m") else size - 1
    if family not in ("w", "b", "e", "m"):
        raise ValueError(f"unknown family {family!r}")
    if xs.size != want:
        raise ValueError(f"family {family} on a {size}-point grid takes {want} values, got {xs.size}")
    if family == "w":
        return _walk_product(dts, xs)
    if family == "m":
        return _meander_raw(dts, xs)
    if family == "b":
        if want == 0:
            raise ValueError("the bridge density needs at least one interior time")
        return SQRT_2PI * _walk_product(dts[:-1], xs) * float(transition_density(dts[-1], xs[-1], 0.0))
    if want == 0:
        raise ValueError("the excursion density needs at least one interior time")
    return _excursion_raw(dts, xs) / excursion_normalizer(grid)


def marginal_pdf(family: str, t: float, x):
    """Density of the limit process at the single time t."""
    if not 0 < t <= 1 or (t == 1 and family in ("b", "e")):
        raise ValueError(f"t={t} is outside the support of the {family} marginal")
    grid = TimeGrid((t, 1.0)) if t < 1 else TimeGrid((1.0,))
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if family == "w":
        vals = transition_density(t, 0.0, xs)
    elif family in ("b", "e"):
        vals = np.array([fdd_density(family, grid, [v]) for v in xs])
    elif family == "m":
        vals = np.array([_meander_marginal(t, v) for v in xs])
    else:
        raise ValueError(f"unknown family {family!r}")
    return float(vals[0]) if np.ndim(x) == 0 else vals


def _meander_marginal(t: float, x: float) -> float:
    # The last coordinate of the meander density, integrated over [0, inf).
    if x < 0:
        return 0.0
    entrance = SQRT_2PI * x / t * float(transition_density(t, 0.0, x))
    if t == 1:
        return entrance
    return entrance * float(special.erf(x / math.sqrt(2.0 * (1.0 - t))))


def marginal_cdf(family: str, t: float, x):
    """P(x_t <= x) for the limit process; accepts a scalar or an array of x."""
    if not 0 < t < 1 and not (t == 1 and family in ("w", "m")):
        raise ValueError(f"t={t} is outside (0, 1) for the {family} marginal")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if family == "w":
        out = special.ndtr(xs / math.sqrt(t))
    elif family == "b":
        out = special.ndtr(xs / math.sqrt(t * (1 - t)))
    elif family in ("e", "m"):
        out = _quadrature_cdf(family, t, xs)
    else:
        raise ValueError(f"unknown family {family!r}")
    return float(out[0]) if np.ndim(x) == 0 else out


def _quadrature_cdf(family: str, t: float, xs: np.ndarray) -> np.ndarray:
    """Integrate the density from 0 up through the sorted points, piece by piece."""
    order = np.argsort(xs)
    sorted_x = np.clip(xs[order], 0.0, None)
    out = np.empty_like(sorted_x)
    acc, prev = 0.0, 0.0
    pdf = lambda v: marginal_pdf(family, t, v)
    for i, v in enumerate(sorted_x):
        if np.isinf(v):
            piece, _ = integrate.quad(pdf, prev, np.inf, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
        elif v > prev:
            piece, _ = integrate.quad(pdf, prev, v, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
        else:
            piece = 0.0
        acc += piece
        out[i] = acc
        if not np.isinf(v):
            prev = v
    result = np.empty_like(out)
    result[order] = out
    return np.minimum(result, 1.0)


def peak_clt_pdf(t):
    """N(0, 1/16) density."""
    return 4.0 * np.exp(-8.0 * np.asarray(t, dtype=float) ** 2) / SQRT_2PI


# ---------- local limit diagnostics ----------

def _exact_fraction(p: float) -> Fraction:
    # Use the decimal literal the caller wrote (0.04 -> 1/25), not its binary rounding.
    return Fraction(repr(float(p)))


def binomial_llt_error(l: int, p: float, m: int) -> float:
    """|sigma P(Bin(l, p) = m) - phi((m - l p) / sigma)|, probability computed exactly."""
    if l < 1 or not 0 < p < 1:
        raise ValueError("need l >= 1 and 0 < p < 1")
    q = _exact_fraction(p)
    prob = Fraction(math.comb(l, m)) * q**m * (1 - q) ** (l - m) if 0 <= m <= l else Fraction(0)
    sigma = math.sqrt(l * p * (1 - p))
    z = (m - l * p) / sigma
    return abs(sigma * float(prob) - math.exp(-z * z / 2) / SQRT_2PI)


@lru_cache(maxsize=32)
def bridge_fraction(n: int, k: int) -> Fraction:
    """#B_n^(k) / #W_n^(k), exactly: the chance a k-peak walk ends at 0."""
    walks = count_family(FamilySpec("w", n, k))
    if walks == 0:
        raise ValueError(f"no walks of length {n} with {k} peaks")
    return Fraction(count_family(FamilySpec("b", n, k)), walks)


def bridge_ratio(n: int, k: int) -> float:
    """beta_n times the chance a k-peak walk ends at 0; tends to sqrt(2/pi)."""
    return scaling_params(n, k).beta * float(bridge_fraction(n, k))
