"""Path correspondences.

* ``phi`` / ``phi_inv``: walks with k peaks <-> simple chains ending at 2k+1.
* ``reflect`` / ``contract``: the trajectory surgeries behind the T-counts.
* ``psi`` / ``psi_inv``: bridges (or paths ending at +1) <-> meanders, keeping
  every peak where it is.
* ``rotate``, ``rhat`` / ``rhat_inv``: the cyclic lemma restricted to
  rotations at non-peak positions.
* ``rho`` / ``rho_inv``: excursions <-> parallelogram polyominoes.
* ``excursion_to_tree`` / ``tree_to_excursion``: the contour-walk codec.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .paths import (
    LatticePath,
    SimpleChain,
    is_excursion,
    peak_mask,
    serialize_path,
)


class NotInDomainError(ValueError):
    """The input is outside the domain of the requested correspondence."""


# ---------- Phi: walks <-> simple chains ----------

def phi(path: LatticePath) -> SimpleChain:
    # Direction changes, with a virtual down-step before and up-step after.
    ext = np.empty(path.n + 2, dtype=np.int8)
    ext[0], ext[-1] = -1, 1
    ext[1:-1] = path.steps
    return SimpleChain((ext[1:] != ext[:-1]).astype(np.int8))


def phi_inv(chain: SimpleChain) -> LatticePath:
    """Rebuild S from the hitting times of H.

    With turning points tau_0 = 0 and tau_l = T_l - 1 (T_l the first time H
    reaches l) and m = H_{k+1} turning points in [0, k]:

        S(k) = sum_{i < m} (-1)^(i+1) (tau_{i+1} - tau_i) + (-1)^(m+1) (k - tau_m)
    """
    if chain.end % 2 == 0:
        raise NotInDomainError(f"chain ends at even height {chain.end}; only odd ends are images")
    h = chain.heights
    n = h.size - 2
    turning = np.concatenate(([0], np.flatnonzero(chain.rises))).astype(np.int64)
    signs = np.where(np.arange(turning.size - 1) % 2 == 0, -1, 1)
    partial = np.concatenate(([0], np.cumsum(signs * np.diff(turning))))
    k = np.arange(n + 1)
    level = h[1 : n + 2]
    heights = partial[level] + np.where(level % 2 == 0, -1, 1) * (k - turning[level])
    return LatticePath._trusted(np.diff(heights).astype(np.int8))


# ---------- reflection and contraction ----------

def reflect(path: LatticePath, t: int) -> LatticePath:
    if not 0 <= t <= path.n:
        raise ValueError(f"reflection abscissa {t} outside [0, {path.n}]")
    steps = path.steps.copy()
    steps[t:] *= -1
    return LatticePath._trusted(steps)


def contract(path: LatticePath, c: int, d: int) -> LatticePath:
    if not 0 <= c <= d <= path.n:
        raise ValueError(f"contraction interval [{c}, {d}] not inside [0, {path.n}]")
    return LatticePath._trusted(np.concatenate((path.steps[:c], path.steps[d:])))


# ---------- Psi: bridges <-> meanders ----------

def _psi_endpoint(n: int) -> int:
    return n % 2


def psi(path: LatticePath) -> LatticePath:
    """Turn over every step that first reaches a new negative level."""
    want = _psi_endpoint(path.n)
    if path.end != want:
        raise NotInDomainError(f"psi expects a path of length {path.n} ending at {want}, got {path.end}")
    h = path.heights
    running_min = np.minimum.accumulate(h)
    flips = np.flatnonzero(h[1:] < running_min[:-1])
    steps = path.steps.copy()
    steps[flips] = 1
    return LatticePath._trusted(steps)


def psi_inv(meander: LatticePath) -> LatticePath:
    """Turn over the last up-step into each level 1..floor(Z_n / 2)."""
    z = meander.heights
    if int(z.min()) < 0:
        raise NotInDomainError("psi_inv expects a non-negative path")
    suffix_min = np.minimum.accumulate(z[::-1])[::-1]
    last_ups = np.flatnonzero(z[:-1] < suffix_min[1:])
    last_ups = last_ups[z[last_ups + 1] <= meander.end // 2]
    steps = meander.steps.copy()
    steps[last_ups] = -1
    return LatticePath._trusted(steps)


# ---------- cyclic lemma ----------

def rotate(path: LatticePath, theta: int) -> LatticePath:
    """Exchange the first theta steps with the rest."""
    if not 0 <= theta <= path.n:
        raise ValueError(f"rotation {theta} outside [0, {path.n}]")
    return LatticePath._trusted(np.concatenate((path.steps[theta:], path.steps[:theta])))


def non_peak_positions(path: LatticePath) -> np.ndarray:
    """Positions 0..n-1 that are not peaks, ascending."""
    return np.flatnonzero(~peak_mask(path)[:-1])


def _check_excursion_hat(path: LatticePath) -> None:
    n = path.n
    if n % 2 == 0:
        raise NotInDomainError(f"expected odd length 2N+1, got {n}")
    if path.end != -1 or int(path.heights[:-1].min()) < 0:
        raise NotInDomainError("expected an excursion followed by one down-step")


def rhat(excursion_hat: LatticePath, index: int) -> LatticePath:
    """Rotate at the index-th non-peak position (0-based) of the input."""
    _check_excursion_hat(excursion_hat)
    positions = non_peak_positions(excursion_hat)
    if not 0 <= index < positions.size:
        raise ValueError(f"rotation index {index} outside [0, {positions.size - 1}]")
    return rotate(excursion_hat, int(positions[index]))


def rhat_inv(path: LatticePath) -> tuple[LatticePath, int]:
    n = path.n
    if n % 2 == 0 or path.end != -1:
        raise NotInDomainError(f"expected odd length ending at -1, got length {n} ending at {path.end}")
    if n > 1 and path.steps[0] < 0 and path.steps[-1] > 0:
        # The cyclic preimage would be rotated at one of its own peaks.
        raise NotInDomainError("paths starting with d and ending with u are not in the image of rhat")
    first_min = int(np.argmin(path.heights))
    source = rotate(path, first_min % n)
    theta = (n - first_min) % n
    positions = non_peak_positions(source)
    index = int(np.searchsorted(positions, theta))
    return source, index


# ---------- Delest-Viennot: excursions <-> parallelogram polyominoes ----------

@dataclass(frozen=True)
class Polyomino:
    """Parallelogram polyomino stored column by column as (floor, height)."""

    columns: tuple[tuple[int, int], ...]

    def __post_init__(self):
        cols = tuple((int(f), int(h)) for f, h in self.columns)
        object.__setattr__(self, "columns", cols)
        if not cols:
            raise ValueError("a polyomino has at least one column")
        if cols[0][0] != 0:
            raise ValueError("the first column must sit on floor 0")
        for i, (floor, height) in enumerate(cols):
            if height < 1:
                raise ValueError(f"column {i} has height {height} < 1")
        for i, ((f0, h0), (f1, h1)) in enumerate(zip(cols, cols[1:])):
            if f1 < f0:
                raise ValueError(f"floor drops between columns {i} and {i + 1}")
            if f1 + h1 < f0 + h0:
                raise ValueError(f"top drops between columns {i} and {i + 1}")
            if f1 >= f0 + h0:
                raise ValueError(f"columns {i} and {i + 1} do not overlap")

    @property
    def width(self) -> int:
        return len(self.columns)

    @property
    def height(self) -> int:
        return self.columns[-1][0] + self.columns[-1][1]

    @property
    def area(self) -> int:
        return sum(h for _, h in self.columns)

    @property
    def perimeter(self) -> int:
        return 2 * (self.width + self.height)

    def render(self, cell: str = "#", empty: str = ".") -> str:
        rows = []
        for level in range(self.height - 1, -1, -1):
            rows.append("".join(cell if f <= level < f + h else empty for f, h in self.columns))
        return "\n".join(rows)

    def to_dict(self) -> dict:
        return {
            "columns": [{"floor": f, "height": h} for f, h in self.columns],
            "area": self.area,
            "width": self.width,
            "height": self.height,
            "perimeter": self.perimeter,
        }


def rho(excursion: LatticePath) -> Polyomino:
    if not is_excursion(excursion) or excursion.n == 0:
        raise NotInDomainError(f"rho expects a non-empty excursion, got {serialize_path(excursion)!r}")
    peak_at = np.flatnonzero(peak_mask(excursion))
    tops = excursion.heights[peak_at]
    downs = np.cumsum(excursion.steps < 0)
    # Down steps strictly after peak i and up to peak i+1.
    between = np.diff(downs[peak_at - 1]) if peak_at.size > 1 else np.zeros(0, dtype=np.int64)
    floors = np.concatenate(([0], np.cumsum(between - 1)))
    return Polyomino(tuple(zip(floors.tolist(), tops.tolist())))


def rho_inv(poly: Polyomino) -> LatticePath:
    steps: list[int] = []
    level = 0
    prev_floor = None
    for floor, height in poly.columns:
        if prev_floor is not None:
            descent = floor - prev_floor + 1
            steps.extend([-1] * descent)
            level -= descent
        steps.extend([1] * (height - level))
        level = height
        prev_floor = floor
    steps.extend([-1] * level)
    return LatticePath(steps)


# ---------- contour walk codec ----------

@dataclass(frozen=True)
class PlaneTree:
    """Rooted ordered tree; ``children[v]`` lists v's children left to right, root is 0."""

    children: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        kids = tuple(tuple(int(c) for c in row) for row in self.children)
        object.__setattr__(self, "children", kids)
        size = len(kids)
        if size == 0:
            raise ValueError("a tree has at least the root")
        seen = [False] * size
        seen[0] = True
        stack = [0]
        count = 1
        while stack:
            v = stack.pop()
            for c in kids[v]:
                if not 0 <= c < size or seen[c]:
                    raise ValueError(f"node {c} is out of range or has two parents")
                seen[c] = True
                count += 1
                stack.append(c)
        if count != size:
            raise ValueError("tree is not connected to the root")

    @property
    def edges(self) -> int:
        return len(self.children) - 1

    @property
    def leaves(self) -> int:
        # The root of a one-node tree is not counted: it has no incoming edge.
        return sum(1 for v, row in enumerate(self.children) if not row and v != 0)

    def render(self) -> str:
        lines: list[str] = []

        def walk(v: int, depth: int) -> None:
            lines.append("  " * depth + ("o" if self.children[v] else "*"))
            for c in self.children[v]:
                walk(c, depth + 1)

        walk(0, 0)
        return "\n".join(lines)


def excursion_to_tree(excursion: LatticePath) -> PlaneTree:
    if not is_excursion(excursion):
        raise NotInDomainError(f"not an excursion: {serialize_path(excursion)!r}")
    children: list[list[int]] = [[]]
    stack = [0]
    for step in excursion.steps.tolist():
        if step > 0:
            children.append([])
            children[stack[-1]].append(len(children) - 1)
            stack.append(len(children) - 1)
        else:
            stack.pop()
    return PlaneTree(tuple(tuple(row) for row in children))


def tree_to_excursion(tree: PlaneTree) -> LatticePath:
    steps: list[int] = []
    # Iterative depth-first contour: push a marker for the return step.
    stack: list[int] = [c for c in reversed(tree.children[0])]
    while stack:
        v = stack.pop()
        if v < 0:
            steps.append(-1)
            continue
        steps.append(1)
        stack.append(-1)
        stack.extend(reversed(tree.children[v]))
    return LatticePath(steps)

