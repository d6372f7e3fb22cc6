"""Scalar fields on grids and redistancing via first-order fast marching."""

from __future__ import annotations

import csv
import heapq
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import Grid
from .shapes import Shape

FIELD_MAGIC = b"HDFLD01\x00"


@dataclass(frozen=True)
class ScalarField:
    """One float64 value per grid node; values are finite and read-only."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.shape != self.grid.counts:
            raise ValueError(
                f"values shape {vals.shape} does not match grid counts {self.grid.counts}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def sample_exact_sd(g: Grid, shape: Shape) -> ScalarField:
    """Evaluate an exact signed distance on all nodes.

    Refuses shapes whose ``exact`` flag is false (their values are only
    conservative level sets) and grids that do not cover the shape.
    """
    if shape.dim != g.dim:
        raise ValueError("shape dimension does not match grid dimension")
    if not shape.exact:
        raise ValueError(
            "shape does not carry an exact signed distance; "
            "use sample_levelset plus fast_march instead"
        )
    if not g.covers(shape):
        raise ValueError("grid does not cover the shape")
    return ScalarField(g, shape.evaluate_sd(g.node_positions()))


def sample_levelset(g: Grid, shape: Shape) -> ScalarField:
    """Evaluate a sign-correct level-set function on all nodes.

    Unlike :func:`sample_exact_sd` this makes no distance claim; feed the
    result to :func:`fast_march` to recover approximate signed distances.
    """
    if shape.dim != g.dim:
        raise ValueError("shape dimension does not match grid dimension")
    return ScalarField(g, shape.evaluate_sd(g.node_positions()))


def positive_part(f: ScalarField) -> ScalarField:
    """Unsigned distance to the set: ``max(sd, 0)``."""
    return ScalarField(f.grid, np.maximum(f.values, 0.0))


def negative_part(f: ScalarField) -> ScalarField:
    """Unsigned distance to the complement: ``max(-sd, 0)``."""
    return ScalarField(f.grid, np.maximum(-f.values, 0.0))


def _band_initialize(values: np.ndarray, h: float) -> np.ndarray:
    """Distance seeds next to the zero level set.

    For every edge where the level set changes sign the crossing position is
    estimated by linear interpolation.  Per axis the closer of the two
    crossings is kept, and axes combine with the inverse-square rule, which
    is exact when the interface is a hyperplane.
    """
    dim = values.ndim
    axis_dist = np.full(values.shape + (dim,), np.inf)
    for axis in range(dim):
        lo = tuple(slice(None, -1) if k == axis else slice(None) for k in range(dim))
        hi = tuple(slice(1, None) if k == axis else slice(None) for k in range(dim))
        a, b = values[lo], values[hi]
        cross = (a * b) < 0.0
        if not np.any(cross):
            continue
        denom = np.abs(a) + np.abs(b)
        da = np.where(cross, h * np.abs(a) / np.where(denom == 0, 1.0, denom), np.inf)
        db = np.where(cross, h * np.abs(b) / np.where(denom == 0, 1.0, denom), np.inf)
        sl = axis_dist[..., axis]
        sl[lo] = np.minimum(sl[lo], da)
        sl[hi] = np.minimum(sl[hi], db)
    with np.errstate(divide="ignore"):
        inv_sq = np.where(np.isfinite(axis_dist), 1.0 / (axis_dist * axis_dist), 0.0)
    inv_sq = inv_sq.sum(axis=-1)
    dist = np.full_like(values, np.inf)
    seeded = inv_sq > 0.0
    dist[seeded] = 1.0 / np.sqrt(inv_sq[seeded])
    dist[values == 0.0] = 0.0
    return dist


def _solve_upwind(upwind: list[float], h: float) -> float:
    """Smallest d with sum over active axes of (d - u_k)^2 = h^2."""
    u = sorted(upwind)
    d = u[0] + h
    for m in range(1, len(u)):
        if d <= u[m]:
            break
        vals = u[: m + 1]
        s = sum(vals)
        s2 = sum(v * v for v in vals)
        n = m + 1
        disc = s * s - n * (s2 - h * h)
        if disc < 0.0:
            break
        d = (s + np.sqrt(disc)) / n
    return d


def fast_march(phi: ScalarField) -> ScalarField:
    """Signed distance to the zero level set of ``phi``, first-order upwind.

    Both signs must occur.  The band next to the interface is initialized by
    linear interpolation along sign-changing edges, then each side is marched
    outward with a binary heap; ties pop in node-index order, so the result
    is deterministic.  The output keeps the sign pattern of the input and is
    accurate to O(h).
    """
    v = phi.values
    if not ((v > 0).any() and (v < 0).any()):
        raise ValueError("no interface: level set does not change sign")
    g = phi.grid
    h = g.h
    counts = g.counts
    dist0 = _band_initialize(v, h)

    flat_v = v.ravel()
    strides = np.array(
        [int(np.prod(counts[k + 1 :])) for k in range(g.dim)], dtype=np.int64
    )
    size = flat_v.size
    out = np.full(size, np.inf)

    for side in (1.0, -1.0):
        on_side = (np.sign(flat_v) == side) | (flat_v == 0.0)
        dist = np.where(np.isfinite(dist0.ravel()) & on_side, dist0.ravel(), np.inf)
        accepted = np.zeros(size, dtype=bool)
        heap = [(d, i) for i, d in enumerate(dist) if np.isfinite(d)]
        heapq.heapify(heap)
        while heap:
            d, i = heapq.heappop(heap)
            if accepted[i] or d > dist[i]:
                continue
            accepted[i] = True
            # Relax the 2*dim lattice neighbours that lie on this side.
            rem = i
            idx = []
            for s in strides:
                idx.append(rem // s)
                rem %= s
            for axis in range(g.dim):
                for step in (-1, 1):
                    j_axis = idx[axis] + step
                    if not 0 <= j_axis < counts[axis]:
                        continue
                    j = i + step * strides[axis]
                    if accepted[j] or not on_side[j]:
                        continue
                    upwind = []
                    rem_j = j
                    jdx = []
                    for s in strides:
                        jdx.append(rem_j // s)
                        rem_j %= s
                    for ax2 in range(g.dim):
                        best = np.inf
                        for st2 in (-1, 1):
                            k_axis = jdx[ax2] + st2
                            if not 0 <= k_axis < counts[ax2]:
                                continue
                            k = j + st2 * strides[ax2]
                            if accepted[k]:
                                best = min(best, dist[k])
                        if np.isfinite(best):
                            upwind.append(best)
                    if not upwind:
                        continue
                    cand = _solve_upwind(upwind, h)
                    if cand < dist[j]:
                        dist[j] = cand
                        heapq.heappush(heap, (cand, j))
        chosen = on_side & np.isfinite(dist)
        out[chosen] = np.minimum(out[chosen], dist[chosen])

    out = out.reshape(counts)
    if not np.all(np.isfinite(out)):
        raise RuntimeError("fast marching left unreached nodes")
    signed = np.sign(v) * out
    return ScalarField(g, signed)


def write_field_csv(f: ScalarField, path) -> None:
    """One row per node: index components, coordinates, value."""
    g = f.grid
    dim = g.dim
    index_cols = ["i", "j", "k"][:dim]
    coord_cols = ["x", "y", "z"][:dim]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(index_cols + coord_cols + ["value"])
        for index in np.ndindex(g.counts):
            pos = g.node_position(index)
            writer.writerow(
                [*(str(i) for i in index)]
                + [repr(float(c)) for c in pos]
                + [repr(float(f.values[index]))]
            )


def write_field_binary(f: ScalarField, path) -> None:
    """Raw dump: 8-byte magic, then little-endian float64 in column-major order."""
    payload = np.asfortranarray(f.values).astype("<f8").tobytes(order="F")
    with open(path, "wb") as fh:
        fh.write(FIELD_MAGIC)
        fh.write(payload)


def read_field_binary(g: Grid, path) -> ScalarField:
    raw = Path(path).read_bytes()
    if raw[: len(FIELD_MAGIC)] != FIELD_MAGIC:
        raise ValueError("not a field file: bad magic")
    body = raw[len(FIELD_MAGIC) :]
    expected = g.num_nodes * struct.calcsize("<d")
    if len(body) != expected:
        raise ValueError(
            f"payload holds {len(body)} bytes, grid needs {expected}"
        )
    vals = np.frombuffer(body, dtype="<f8").reshape(g.counts, order="F")
    return ScalarField(g, vals.copy())
