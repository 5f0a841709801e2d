"""Uniform Cartesian grid, inside/outside mask and point classification."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EXTERIOR, BOUNDARY, COMPUTATIONAL = 0, 1, 2


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    """Points ``(x_L + i h, y_L + j h)`` for ``0 <= i < nx``, ``0 <= j < ny``."""

    x_lo: float
    y_lo: float
    h: float
    nx: int
    ny: int

    def __post_init__(self):
        if not self.h > 0:
            raise GridError("grid spacing must be positive")
        if self.nx < 3 or self.ny < 3:
            raise GridError("need at least 3 points per direction")

    @classmethod
    def from_box(cls, x_lo, x_hi, y_lo, y_hi, n):
        """``n`` intervals along x; y uses the same spacing, rounding the count up."""
        h = (x_hi - x_lo) / n
        ny = math.ceil((y_hi - y_lo) / h - 1e-9)
        return cls(float(x_lo), float(y_lo), float(h), n + 1, ny + 1)

    @property
    def x(self):
        return self.x_lo + self.h * np.arange(self.nx)

    @property
    def y(self):
        return self.y_lo + self.h * np.arange(self.ny)

    def mesh(self):
        """Coordinate arrays of shape ``(nx, ny)`` indexed ``[i, j]``."""
        return np.meshgrid(self.x, self.y, indexing="ij")


def build_mask(grid: Grid, geom) -> np.ndarray:
    """1 where psi < 0 strictly; psi == 0 counts as outside."""
    X, Y = grid.mesh()
    psi = geom.psi(X, Y)
    return (psi < 0).astype(np.int8)


@dataclass
class Classification:
    grid: Grid
    mask: np.ndarray
    tag: np.ndarray
    # lexicographic (fast-in-x) unknown number of each point, -1 elsewhere
    index: np.ndarray
    # fast-in-y unknown numbers
    index_y: np.ndarray
    ij: np.ndarray
    perm: np.ndarray

    @property
    def n_comp(self) -> int:
        return int(self.ij.shape[0])

    @property
    def boundary_ij(self):
        return np.argwhere(self.tag.T == BOUNDARY)[:, ::-1]

    def counts(self):
        return {
            "exterior": int(np.sum(self.tag == EXTERIOR)),
            "boundary": int(np.sum(self.tag == BOUNDARY)),
            "computational": int(np.sum(self.tag == COMPUTATIONAL)),
        }

    def ascii(self) -> str:
        """Rows top (largest y) to bottom; '0' outside, 'B' boundary, 'C' computational."""
        chars = np.array(["0", "B", "C"])
        return "\n".join("".join(chars[self.tag[:, j]]) for j in range(self.grid.ny - 1, -1, -1))


def classify(grid: Grid, mask: np.ndarray) -> Classification:
    m = np.asarray(mask, dtype=np.int8)
    if m.shape != (grid.nx, grid.ny):
        raise GridError("mask shape does not match grid")
    if m[0, :].any() or m[-1, :].any() or m[:, 0].any() or m[:, -1].any():
        raise GridError("geometry touches grid boundary")
    nb = np.zeros_like(m, dtype=np.int16)
    nb[1:-1, 1:-1] = m[2:, 1:-1] + m[:-2, 1:-1] + m[1:-1, 2:] + m[1:-1, :-2]
    tag = np.zeros_like(m)
    tag[(m == 1) & (nb < 4)] = BOUNDARY
    tag[(m == 1) & (nb == 4)] = COMPUTATIONAL

    # np.argwhere on the transpose walks j-major, i fastest
    ij = np.argwhere(tag.T == COMPUTATIONAL)[:, ::-1].copy()
    index = np.full(m.shape, -1, dtype=np.int64)
    index[ij[:, 0], ij[:, 1]] = np.arange(len(ij))
    ij_y = np.argwhere(tag == COMPUTATIONAL)
    index_y = np.full(m.shape, -1, dtype=np.int64)
    index_y[ij_y[:, 0], ij_y[:, 1]] = np.arange(len(ij_y))
    perm = index_y[ij[:, 0], ij[:, 1]]
    return Classification(grid, m, tag, index, index_y, ij, perm)


@dataclass(frozen=True)
class Segment:
    direction: str
    line: int
    start: int
    n: int


def extract_segments(cls: Classification, direction: str) -> list[Segment]:
    """Maximal runs of consecutive computational points along each grid line."""
    comp = cls.tag == COMPUTATIONAL
    if direction == "x":
        lines = comp.T  # line j runs over i
    elif direction == "y":
        lines = comp
    else:
        raise ValueError(f"direction must be 'x' or 'y', got {direction!r}")
    out = []
    for line, row in enumerate(lines):
        if not row.any():
            continue
        padded = np.concatenate([[False], row, [False]]).astype(np.int8)
        d = np.diff(padded)
        starts = np.flatnonzero(d == 1)
        ends = np.flatnonzero(d == -1)
        out.extend(Segment(direction, line, int(s), int(e - s)) for s, e in zip(starts, ends))
    return out


@dataclass
class GridContext:
    grid: Grid
    cls: Classification
    psi: np.ndarray

    @property
    def mask(self):
        return self.cls.mask


def build_context(grid: Grid, geom) -> GridContext:
    X, Y = grid.mesh()
    psi = np.asarray(geom.psi(X, Y), dtype=float)
    mask = (psi < 0).astype(np.int8)
    return GridContext(grid, classify(grid, mask), psi)
