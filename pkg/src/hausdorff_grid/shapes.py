"""Implicit geometry: primitives with exact signed distances plus CSG trees.

Sign convention: negative inside, zero on the boundary, positive outside.
All sets are closed, so membership is ``sd <= 0``.

Combining children with min/max keeps the *sign* correct everywhere but the
magnitude is only conservative: ``|evaluate_sd|`` never exceeds the true
distance to the boundary.  The ``exact`` flag records whether the value is
the true signed distance; it defaults to ``False`` for CSG nodes and may be
overridden by constructors that know better (disjoint unions, nested
differences).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .grid import MAX_DIM


@dataclass(frozen=True)
class PointCloudSample:
    """Finite sample of a set: ``kind`` is ``"volume"`` or ``"boundary"``.

    ``resolution`` is the sampling pitch: volume samples come from a lattice
    with spacing <= resolution, boundary samples from parameterizations with
    spacing <= resolution along the surface.
    """

    points: np.ndarray
    kind: str
    resolution: float

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError("points must have shape (count, dim)")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)


class Shape:
    """Base class; subclasses provide vectorized ``evaluate_sd``."""

    exact: bool

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def evaluate_sd(self, points: np.ndarray) -> np.ndarray:
        """Signed distance (or conservative level-set value) at ``points``.

        ``points`` has shape ``(..., dim)``; the result drops the last axis.
        """
        raise NotImplementedError

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def membership(self, points: np.ndarray) -> np.ndarray:
        return self.evaluate_sd(points) <= 0.0

    def _as_points(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != self.dim:
            raise ValueError(
                f"points have dimension {pts.shape[-1]}, shape has {self.dim}"
            )
        return pts


@dataclass(frozen=True)
class Ball(Shape):
    center: tuple[float, ...]
    radius: float
    exact: bool = field(default=True, init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not 1 <= len(self.center) <= MAX_DIM:
            raise ValueError(f"dimension must be between 1 and {MAX_DIM}")
        if not self.radius > 0.0:
            raise ValueError("radius must be positive")

    @property
    def dim(self) -> int:
        return len(self.center)

    def evaluate_sd(self, points: np.ndarray) -> np.ndarray:
        pts = self._as_points(points)
        return np.linalg.norm(pts - np.asarray(self.center), axis=-1) - self.radius

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        c = np.asarray(self.center)
        return c - self.radius, c + self.radius


@dataclass(frozen=True)
class Box(Shape):
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    exact: bool = field(default=True, init=False)

    def __post_init__(self) -> None:
        lo = tuple(float(c) for c in self.lo)
        hi = tuple(float(c) for c in self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if len(lo) != len(hi):
            raise ValueError("lo and hi must have the same length")
        if not 1 <= len(lo) <= MAX_DIM:
            raise ValueError(f"dimension must be between 1 and {MAX_DIM}")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValueError("box must have positive extent on every axis")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def evaluate_sd(self, points: np.ndarray) -> np.ndarray:
        pts = self._as_points(points)
        q = np.maximum(np.asarray(self.lo) - pts, pts - np.asarray(self.hi))
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=-1)
        inside = np.minimum(np.max(q, axis=-1), 0.0)
        return outside + inside

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.lo), np.asarray(self.hi)


def _check_children_dims(children) -> int:
    dims = {c.dim for c in children}
    if len(dims) != 1:
        raise ValueError("all children must share one dimension")
    return dims.pop()


@dataclass(frozen=True)
class Union(Shape):
    children: tuple[Shape, ...]
    exact: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("union needs at least one child")
        _check_children_dims(self.children)

    @property
    def dim(self) -> int:
        return self.children[0].dim

    def evaluate_sd(self, points: np.ndarray) -> np.ndarray:
        vals = [c.evaluate_sd(points) for c in self.children]
        return np.minimum.reduce(vals)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        boxes = [c.bounding_box() for c in self.children]
        lo = np.minimum.reduce([b[0] for b in boxes])
        hi = np.maximum.reduce([b[1] for b in boxes])
        return lo, hi


@dataclass(frozen=True)
class Intersection(Shape):
    children: tuple[Shape, ...]
    exact: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("intersection needs at least one child")
        _check_children_dims(self.children)

    @property
    def dim(self) -> int:
        return self.children[0].dim

    def evaluate_sd(self, points: np.ndarray) -> np.ndarray:
        vals = [c.evaluate_sd(points) for c in self.children]
        return np.maximum.reduce(vals)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        # The intersection sits inside every child's box.
        boxes = [c.bounding_box() for c in self.children]
        lo = np.maximum.reduce([b[0] for b in boxes])
        hi = np.minimum.reduce([b[1] for b in boxes])
        return lo, np.maximum(lo, hi)


@dataclass(frozen=True)
class Complement(Shape):
    child: Shape

    def __post_init__(self) -> None:
        object.__setattr__(self, "exact", self.child.exact)

    @property
    def dim(self) -> int:
        return self.child.dim

    def evaluate_sd(self, points: np.ndarray) -> np.ndarray:
        return -self.child.evaluate_sd(points)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        raise ValueError("complement of a bounded set is unbounded")


@dataclass(frozen=True)
class Difference(Shape):
    """Points of ``a`` outside the interior of ``b`` (a closed set)."""

    a: Shape
    b: Shape
    exact: bool = False

    def __post_init__(self) -> None:
        if self.a.dim != self.b.dim:
            raise ValueError("all children must share one dimension")

    @property
    def dim(self) -> int:
        return self.a.dim

    def evaluate_sd(self, points: np.ndarray) -> np.ndarray:
        return np.maximum(self.a.evaluate_sd(points), -self.b.evaluate_sd(points))

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.a.bounding_box()


def ring_with_inner_ball(
    dim: int,
    displacement: tuple[float, ...] | None,
    outer_radius: float = 9.0,
    ring_width: float = 1.0,
    inner_radius: float = 1.0,
) -> tuple[Shape, Shape]:
    """The benchmark pair: annular shell ``b`` and shell-plus-ball ``a``.

    The shell spans radii ``outer_radius - ring_width .. outer_radius``; the
    extra ball of ``inner_radius`` sits at ``displacement`` inside the
    cavity.  Both returned shapes carry exact signed distances: an annulus'
    max-combination is exact, and the ball is disjoint from the shell by the
    validity check, which makes the min-combination exact as well.

    Pass ``displacement=None`` for the bare shell on both sides.
    """
    if not 0 < ring_width < outer_radius:
        raise ValueError("ring width must be in (0, outer_radius)")
    cavity = outer_radius - ring_width
    origin = (0.0,) * dim
    ring = Difference(Ball(origin, outer_radius), Ball(origin, cavity), exact=True)
    if displacement is None:
        return ring, ring
    disp = tuple(float(c) for c in displacement)
    if len(disp) != dim:
        raise ValueError("displacement length must equal dim")
    if float(np.linalg.norm(disp)) + inner_radius >= cavity:
        raise ValueError("inner ball must stay strictly inside the cavity")
    a = Union((ring, Ball(disp, inner_radius)), exact=True)
    return a, ring


def _lattice_axes(lo: np.ndarray, hi: np.ndarray, gap: float) -> list[np.ndarray]:
    axes = []
    for a, b in zip(lo, hi):
        extent = b - a
        n = max(2, int(np.ceil(extent / gap)) + 1)
        axes.append(np.linspace(a, b, n))
    return axes


def lattice_points(lo, hi, gap: float) -> np.ndarray:
    """Regular lattice covering ``[lo, hi]`` with pitch <= gap, shape (N, dim)."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if not gap > 0:
        raise ValueError("gap must be positive")
    if np.any(hi <= lo):
        raise ValueError("box must have positive extent on every axis")
    axes = _lattice_axes(lo, hi, gap)
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def sample_volume(shape: Shape, target_gap: float) -> PointCloudSample:
    """Lattice points of pitch <= target_gap that lie in the closed set.

    Every point of the set is within ``sqrt(dim) * target_gap`` of a sample,
    provided the set is not thinner than the lattice pitch near its boundary.
    """
    lo, hi = shape.bounding_box()
    pts = lattice_points(lo, hi, target_gap)
    keep = shape.membership(pts)
    if not np.any(keep):
        raise ValueError("empty set: no lattice point lies inside the shape")
    return PointCloudSample(pts[keep], "volume", float(target_gap))


def _fibonacci_sphere(count: int) -> np.ndarray:
    # Deterministic quasi-uniform covering of the unit 2-sphere.
    i = np.arange(count, dtype=float) + 0.5
    z = 1.0 - 2.0 * i / count
    theta = np.pi * (1.0 + np.sqrt(5.0)) * i
    rho = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    return np.stack([rho * np.cos(theta), rho * np.sin(theta), z], axis=-1)


def _ball_boundary(ball: Ball, gap: float) -> np.ndarray:
    c = np.asarray(ball.center)
    r = ball.radius
    if ball.dim == 1:
        return np.array([[c[0] - r], [c[0] + r]])
    if ball.dim == 2:
        n = max(8, int(np.ceil(2.0 * np.pi * r / gap)))
        ang = 2.0 * np.pi * np.arange(n) / n
        return c + r * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    n = max(32, int(np.ceil(16.0 * r * r / (gap * gap))))
    return c + r * _fibonacci_sphere(n)


def _box_boundary(box: Box, gap: float) -> np.ndarray:
    lo = np.asarray(box.lo)
    hi = np.asarray(box.hi)
    if box.dim == 1:
        return np.array([[lo[0]], [hi[0]]])
    pieces = []
    axes = _lattice_axes(lo, hi, gap)
    for k in range(box.dim):
        others = [axes[j] for j in range(box.dim) if j != k]
        mesh = np.meshgrid(*others, indexing="ij")
        face = np.stack([m.ravel() for m in mesh], axis=-1)
        for value in (lo[k], hi[k]):
            col = np.full((face.shape[0], 1), value)
            pieces.append(np.concatenate([face[:, :k], col, face[:, k:]], axis=1))
    return np.concatenate(pieces, axis=0)


def _boundary_candidates(shape: Shape, gap: float) -> np.ndarray:
    if isinstance(shape, Ball):
        return _ball_boundary(shape, gap)
    if isinstance(shape, Box):
        return _box_boundary(shape, gap)
    if isinstance(shape, (Union, Intersection)):
        return np.concatenate(
            [_boundary_candidates(c, gap) for c in shape.children], axis=0
        )
    if isinstance(shape, Complement):
        return _boundary_candidates(shape.child, gap)
    if isinstance(shape, Difference):
        return np.concatenate(
            [_boundary_candidates(shape.a, gap), _boundary_candidates(shape.b, gap)],
            axis=0,
        )
    raise TypeError(f"unsupported shape: {type(shape).__name__}")


def sample_boundary(shape: Shape, target_gap: float) -> PointCloudSample:
    """Boundary samples from exact parameterizations of the primitives.

    CSG boundaries are subsets of the children's boundaries; candidate points
    are kept when the combined level-set value vanishes there.
    """
    if not target_gap > 0:
        raise ValueError("gap must be positive")
    cand = _boundary_candidates(shape, target_gap)
    scale = float(np.max(np.abs(cand))) if cand.size else 1.0
    tol = 1e-9 * max(1.0, scale)
    keep = np.abs(shape.evaluate_sd(cand)) <= tol
    if not np.any(keep):
        raise ValueError("empty set: no boundary candidate survived filtering")
    return PointCloudSample(cand[keep], "boundary", float(target_gap))
