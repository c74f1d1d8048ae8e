"""Lattice paths with +/-1 steps, their peaks, valleys and peak-counting process.

A path of length ``n`` is stored as its increments ``steps[0..n-1]`` (step
``i`` in the usual 1-based numbering is ``steps[i - 1]``) together with the
eagerly cached heights ``S(0..n)``.  Positions are step-boundary indices, so a
peak at ``x`` means ``S(x - 1) = S(x + 1) = S(x) - 1`` with ``1 <= x <= n - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

Family = Literal["w", "b", "e", "m"]
FAMILIES: tuple[Family, ...] = ("w", "b", "e", "m")

UP, DOWN = 1, -1


class PathFormatError(ValueError):
    """Raised when a step string contains something other than 'u'/'d'."""

    def __init__(self, index: int, char: str):
        super().__init__(f"invalid step {char!r} at index {index}; expected 'u' or 'd'")
        self.index = index
        self.char = char


class LatticePath:
    """Immutable +/-1 trajectory starting at height 0."""

    __slots__ = ("steps", "heights")

    steps: np.ndarray
    heights: np.ndarray

    def __init__(self, steps: Iterable[int] | np.ndarray):
        arr = np.array(steps, dtype=np.int8).reshape(-1)
        if arr.size and not np.all((arr == 1) | (arr == -1)):
            raise ValueError("increments must all be +1 or -1")
        heights = np.zeros(arr.size + 1, dtype=np.int64)
        np.cumsum(arr, out=heights[1:])
        arr.flags.writeable = False
        heights.flags.writeable = False
        object.__setattr__(self, "steps", arr)
        object.__setattr__(self, "heights", heights)

    def __setattr__(self, name, value):
        raise AttributeError("LatticePath is immutable")

    def __reduce__(self):
        return (LatticePath._trusted, (np.array(self.steps),))

    @classmethod
    def _trusted(cls, steps: np.ndarray) -> "LatticePath":
        # Skips validation; callers guarantee an int8 array of +/-1.
        self = object.__new__(cls)
        steps = np.ascontiguousarray(steps, dtype=np.int8)
        heights = np.zeros(steps.size + 1, dtype=np.int64)
        np.cumsum(steps, out=heights[1:])
        steps.flags.writeable = False
        heights.flags.writeable = False
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "heights", heights)
        return self

    @property
    def n(self) -> int:
        return int(self.steps.size)

    @property
    def end(self) -> int:
        return int(self.heights[-1])

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticePath):
            return NotImplemented
        return np.array_equal(self.steps, other.steps)

    def __hash__(self) -> int:
        return hash(self.steps.tobytes())

    def __repr__(self) -> str:
        text = serialize_path(self)
        if len(text) > 40:
            text = text[:37] + "..."
        return f"LatticePath({text!r})"

    def __str__(self) -> str:
        return serialize_path(self)


@dataclass(frozen=True)
class FamilySpec:
    """A conditioned family: paths of ``family`` with length ``n`` and ``k`` peaks."""

    family: Family
    n: int
    k: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if self.k < 0:
            raise ValueError("k must be non-negative")

    @property
    def feasible(self) -> bool:
        """False when the family is empty for trivial reasons (parity, too many peaks)."""
        if self.k > self.n // 2:
            return False
        if self.family in ("b", "e") and self.n % 2:
            return False
        if self.family == "e" and self.n > 0 and self.k == 0:
            return False
        return True


class SimpleChain:
    """Non-decreasing chain with 0/1 increments, ``H_0 = 0``."""

    __slots__ = ("rises", "heights")

    rises: np.ndarray
    heights: np.ndarray

    def __init__(self, rises: Iterable[int] | np.ndarray):
        arr = np.array(rises, dtype=np.int8).reshape(-1)
        if arr.size and not np.all((arr == 0) | (arr == 1)):
            raise ValueError("simple-chain increments must be 0 or 1")
        heights = np.zeros(arr.size + 1, dtype=np.int64)
        np.cumsum(arr, out=heights[1:])
        arr.flags.writeable = False
        heights.flags.writeable = False
        object.__setattr__(self, "rises", arr)
        object.__setattr__(self, "heights", heights)

    def __setattr__(self, name, value):
        raise AttributeError("SimpleChain is immutable")

    def __reduce__(self):
        return (SimpleChain, (np.array(self.rises),))

    @classmethod
    def from_heights(cls, heights: Iterable[int]) -> "SimpleChain":
        h = np.asarray(list(heights), dtype=np.int64)
        if h.size == 0 or h[0] != 0:
            raise ValueError("heights must start at 0")
        return cls(np.diff(h))

    @property
    def end(self) -> int:
        return int(self.heights[-1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimpleChain):
            return NotImplemented
        return np.array_equal(self.rises, other.rises)

    def __hash__(self) -> int:
        return hash(self.rises.tobytes())

    def __repr__(self) -> str:
        return f"SimpleChain(heights={self.heights.tolist()})"


def parse_path(text: str) -> LatticePath:
    """Parse a 'u'/'d' string.  The error names the first offending index."""
    raw = np.frombuffer(text.encode("latin-1", errors="replace"), dtype=np.uint8)
    bad = np.flatnonzero((raw != ord("u")) & (raw != ord("d")))
    if bad.size:
        i = int(bad[0])
        raise PathFormatError(i, text[i])
    return LatticePath._trusted(np.where(raw == ord("u"), 1, -1).astype(np.int8))


def serialize_path(path: LatticePath) -> str:
    return np.where(path.steps > 0, ord("u"), ord("d")).astype(np.uint8).tobytes().decode("ascii")


def peak_mask(path: LatticePath) -> np.ndarray:
    """Boolean mask over positions 0..n, true at peaks."""
    s = path.steps
    mask = np.zeros(s.size + 1, dtype=bool)
    if s.size >= 2:
        mask[1:-1] = (s[:-1] > 0) & (s[1:] < 0)
    return mask


def peaks(path: LatticePath) -> list[int]:
    return np.flatnonzero(peak_mask(path)).tolist()


def valleys(path: LatticePath) -> list[int]:
    s = path.steps
    if s.size < 2:
        return []
    return (np.flatnonzero((s[:-1] < 0) & (s[1:] > 0)) + 1).tolist()


def num_peaks(path: LatticePath) -> int:
    s = path.steps
    if s.size < 2:
        return 0
    return int(np.count_nonzero((s[:-1] > 0) & (s[1:] < 0)))


def counting_process(path: LatticePath) -> np.ndarray:
    """Lambda_l = number of peaks in [0, l], for l = 0..n."""
    return np.cumsum(peak_mask(path), dtype=np.int64)


def is_bridge(path: LatticePath) -> bool:
    return path.end == 0


def is_meander(path: LatticePath) -> bool:
    return int(path.heights.min()) >= 0


def is_excursion(path: LatticePath) -> bool:
    return is_bridge(path) and is_meander(path)


def classify(path: LatticePath) -> frozenset[str]:
    tags = {"w"}
    if is_bridge(path):
        tags.add("b")
    if is_meander(path):
        tags.add("m")
    if "b" in tags and "m" in tags:
        tags.add("e")
    return frozenset(tags)


def in_family(path: LatticePath, family: Family) -> bool:
    if family == "w":
        return True
    if family == "b":
        return is_bridge(path)
    if family == "m":
        return is_meander(path)
    if family == "e":
        return is_excursion(path)
    raise ValueError(f"unknown family {family!r}")
