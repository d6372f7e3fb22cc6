"""Uniform rectangular grids in dimensions one to three."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

MAX_DIM = 3


@dataclass(frozen=True)
class Grid:
    """Immutable uniform node lattice.

    Nodes sit at ``origin + index * h`` componentwise, for integer
    multi-indices ``0 <= index[k] < counts[k]``.  Cells are the axis-aligned
    hypercubes spanned by 2**dim adjacent nodes; a cell is addressed by the
    node index of its upper corner, so valid cell indices have every
    component >= 1.
    """

    origin: tuple[float, ...]
    h: float
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        origin = tuple(float(c) for c in self.origin)
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "counts", counts)
        if len(origin) != len(counts):
            raise ValueError("origin and counts must have the same length")
        if not 1 <= len(counts) <= MAX_DIM:
            raise ValueError(f"grid dimension must be between 1 and {MAX_DIM}")
        if not self.h > 0.0:
            raise ValueError("grid spacing h must be positive")
        if any(c < 2 for c in counts):
            raise ValueError("every axis needs at least two nodes")

    @property
    def dim(self) -> int:
        return len(self.counts)

    @property
    def num_nodes(self) -> int:
        return int(np.prod(self.counts))

    def hull(self) -> tuple[np.ndarray, np.ndarray]:
        """Closed bounding box spanned by the nodes, as ``(lo, hi)``."""
        lo = np.asarray(self.origin, dtype=float)
        hi = lo + self.h * (np.asarray(self.counts) - 1)
        return lo, hi

    def in_bounds(self, index: tuple[int, ...]) -> bool:
        return len(index) == self.dim and all(
            0 <= i < c for i, c in zip(index, self.counts)
        )

    def node_position(self, index: tuple[int, ...]) -> np.ndarray:
        """Coordinates of a node; each component is one multiply-add."""
        if not self.in_bounds(index):
            raise IndexError(f"node index {index} out of bounds for {self.counts}")
        return np.asarray(self.origin) + self.h * np.asarray(index, dtype=float)

    def node_positions(self) -> np.ndarray:
        """All node coordinates, shape ``counts + (dim,)``, read-only."""
        return _node_positions(self)

    def cell_corners(self, cell: tuple[int, ...]) -> list[tuple[int, ...]]:
        """The 2**dim node indices spanning a cell.

        ``cell`` is the index of the cell's upper corner node, so every
        component must be in ``1 .. counts[k]-1``.
        """
        if len(cell) != self.dim or any(
            not 1 <= c < n for c, n in zip(cell, self.counts)
        ):
            raise IndexError(f"cell index {cell} out of bounds for {self.counts}")
        return [
            tuple(c - 1 + o for c, o in zip(cell, offs))
            for offs in product((0, 1), repeat=self.dim)
        ]

    def contains_points(self, points: np.ndarray, pad: float = 0.0) -> np.ndarray:
        """Componentwise hull membership (optionally padded outward)."""
        pts = np.asarray(points, dtype=float)
        lo, hi = self.hull()
        return np.all((pts >= lo - pad) & (pts <= hi + pad), axis=-1)

    def covers(self, shape) -> bool:
        """True iff the shape's bounding box lies inside the node hull."""
        try:
            lo_s, hi_s = shape.bounding_box()
        except ValueError:
            return False
        lo, hi = self.hull()
        return bool(np.all(lo_s >= lo) and np.all(hi_s <= hi))

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "origin": list(self.origin),
            "h": self.h,
            "counts": list(self.counts),
        }

    @staticmethod
    def from_json_dict(data: dict) -> "Grid":
        g = Grid(origin=tuple(data["origin"]), h=data["h"], counts=tuple(data["counts"]))
        if "dim" in data and int(data["dim"]) != g.dim:
            raise ValueError("declared dim does not match origin/counts length")
        return g


@lru_cache(maxsize=8)
def _node_positions(grid: Grid) -> np.ndarray:
    axes = [
        grid.origin[k] + grid.h * np.arange(grid.counts[k], dtype=float)
        for k in range(grid.dim)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack(mesh, axis=-1)
    pts.setflags(write=False)
    return pts
