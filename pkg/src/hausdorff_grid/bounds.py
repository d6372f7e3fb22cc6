"""Certified upper bounds for the node-sampled Hausdorff distance.

The gap ``delta = d_H - d_tilde`` obeys three bounds of increasing strength:

* always:          ``delta <= sqrt(n) * h``;
* suitable grids:  ``delta <= Delta_n * h`` where ``Delta_n`` is the value
  of a small wavefront optimization over the unit cell (a grid is suitable
  when no cell whose corners all lie outside the first set meets that set);
* external pairs:  ``delta <= sqrt(n h^2 + (r - sqrt(n) h)^2) - (r - sqrt(n) h)``
  once a witness configuration with clearance radius ``r`` is certified,
  which is quadratically small in ``h``.

``Delta_n`` has closed forms: 2/3, (2/3)sqrt(5 - sqrt 7) and
(2/3)sqrt(8 - sqrt 19) for n = 1, 2, 3.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.optimize import minimize

from .grid import Grid
from .hausdorff import HausdorffReport
from .redistance import ScalarField
from .shapes import Shape, lattice_points, sample_volume

_DELTA_CLOSED = {
    1: 2.0 / 3.0,
    2: 2.0 / 3.0 * np.sqrt(5.0 - np.sqrt(7.0)),
    3: 2.0 / 3.0 * np.sqrt(8.0 - np.sqrt(19.0)),
}


def delta_closed_form(n: int) -> float:
    """Closed-form ``Delta_n`` for n in 1..3."""
    if n not in _DELTA_CLOSED:
        raise ValueError("dimension must be between 1 and 3")
    return float(_DELTA_CLOSED[n])


@dataclass(frozen=True)
class DeltaConstant:
    dim: int
    value: float
    maximizer: tuple[float, ...]


def _wavefront_value(y: np.ndarray, corners: np.ndarray) -> float:
    # Arrival time of the slow/fast front race: unit speed from the origin,
    # half speed from every other corner of the unit cell.
    direct = float(np.linalg.norm(y))
    others = 2.0 * float(np.min(np.linalg.norm(corners - y, axis=1)))
    return min(direct, others)


def compute_delta(n: int, seeds: int = 64) -> DeltaConstant:
    """Maximize the unit-cell wavefront gap by multi-start local search.

    Solved in epigraph form (maximize t subject to t <= |y| and
    t <= 2|x - y| for every non-origin corner x) with SLSQP from ``seeds``
    deterministic starting points, then verified by direct evaluation.
    """
    if n not in _DELTA_CLOSED:
        raise ValueError("dimension must be between 1 and 3")
    corners = np.array(
        [c for c in product((0.0, 1.0), repeat=n) if any(c)], dtype=float
    )
    rng = np.random.default_rng(20260814 + n)

    def objective(z):
        return -z[-1]

    constraints = [
        {
            "type": "ineq",
            "fun": lambda z: float(np.linalg.norm(z[:-1])) - z[-1],
        }
    ]
    for row in corners:
        constraints.append(
            {
                "type": "ineq",
                "fun": lambda z, x=row: float(np.linalg.norm(x - z[:-1])) - z[-1] / 2.0,
            }
        )
    bounds = [(0.0, 1.0)] * n + [(0.0, 2.0)]

    best_y = None
    best_val = -np.inf
    for _ in range(seeds):
        y0 = rng.uniform(0.05, 0.95, size=n)
        t0 = _wavefront_value(y0, corners)
        res = minimize(
            objective,
            np.append(y0, t0),
            method="SLSQP",
            bounds=bounds,
            constraints=constraints,
            options={"maxiter": 400, "ftol": 1e-14},
        )
        y = np.clip(res.x[:-1], 0.0, 1.0)
        val = _wavefront_value(y, corners)
        if val > best_val:
            best_val, best_y = val, y
    return DeltaConstant(n, float(best_val), tuple(float(c) for c in best_y))


def lipschitz_t(x, y, x_in_a: bool) -> float:
    """Transport cost between a corner and a cell point.

    Moving the comparison point costs the plain distance when the corner
    belongs to the first set and twice the distance otherwise.
    """
    d = float(np.linalg.norm(np.asarray(y, dtype=float) - np.asarray(x, dtype=float)))
    return d if x_in_a else 2.0 * d


def cell_upper_bound_sampled(
    g: Grid,
    cell: tuple[int, ...],
    d_a: ScalarField,
    d_b: ScalarField,
    membership: tuple[bool, ...],
    m: int = 5,
) -> float:
    """Sampled evaluation of the per-cell error envelope.

    For lattice points y of the cell (m per axis) the envelope is
    ``min over corners (|d_A - d_B|(corner) + t(corner, y))`` and the
    maximum over the sampled y is returned.  This is a sampled estimate of
    the true sup over the cell, not a certified bound.
    """
    if m < 2:
        raise ValueError("need at least two sample points per axis")
    corners = g.cell_corners(cell)
    if len(membership) != len(corners):
        raise ValueError("membership must align with cell_corners order")
    corner_pos = np.array([g.node_position(c) for c in corners])
    corner_diff = np.array(
        [abs(float(d_a.values[c]) - float(d_b.values[c])) for c in corners]
    )
    axes = [
        np.linspace(corner_pos[0][k], corner_pos[-1][k], m) for k in range(g.dim)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    ys = np.stack([v.ravel() for v in mesh], axis=-1)
    factor = np.where(np.asarray(membership, dtype=bool), 1.0, 2.0)
    dists = np.linalg.norm(ys[:, None, :] - corner_pos[None, :, :], axis=-1)
    envelope = corner_diff[None, :] + factor[None, :] * dists
    return float(np.max(np.min(envelope, axis=1)))


def worst_case_bound(report: HausdorffReport, g: Grid) -> float:
    """``d_tilde + sqrt(n) * h``: valid for any pair of nonempty compact sets."""
    return report.d_tilde + np.sqrt(g.dim) * g.h


def suitable_bound(report: HausdorffReport, g: Grid, suitable: bool):
    """``d_tilde + Delta_n * h`` when the grid is suitable, else ``None``."""
    if not suitable:
        return None
    return report.d_tilde + delta_closed_form(g.dim) * g.h


def check_suitable(g: Grid, s: Shape, gap: float) -> bool:
    """Sampled test that no all-corners-outside cell meets the set.

    Cells whose corners all lie strictly outside are scanned with a lattice
    of pitch <= gap; any sample inside the set disproves suitability.  Cells
    whose corners are farther than half a diagonal from the set cannot meet
    it (the level-set magnitude never overestimates the distance), so only
    near-boundary cells are sampled.
    """
    if not gap > 0:
        raise ValueError("gap must be positive")
    if s.dim != g.dim:
        raise ValueError("shape dimension does not match grid dimension")
    sd = s.evaluate_sd(g.node_positions())
    dim = g.dim
    outside = sd > 0.0
    corner_all_outside = np.ones(tuple(c - 1 for c in g.counts), dtype=bool)
    corner_min_sd = np.full(tuple(c - 1 for c in g.counts), np.inf)
    for offs in product((slice(None, -1), slice(1, None)), repeat=dim):
        corner_all_outside &= outside[offs]
        corner_min_sd = np.minimum(corner_min_sd, sd[offs])
    reach = np.sqrt(dim) * g.h / 2.0 + 1e-12
    candidates = np.argwhere(corner_all_outside & (corner_min_sd <= reach))
    if candidates.size == 0:
        return True
    m = int(np.ceil(g.h / gap)) + 1
    offsets1d = np.linspace(0.0, g.h, m)
    mesh = np.meshgrid(*([offsets1d] * dim), indexing="ij")
    offsets = np.stack([v.ravel() for v in mesh], axis=-1)
    lows = np.asarray(g.origin) + g.h * candidates.astype(float)
    # candidates index the lower corner (cell index minus one on each axis)
    pts = lows[:, None, :] + offsets[None, :, :]
    inside = s.evaluate_sd(pts.reshape(-1, dim)) <= 0.0
    return not bool(np.any(inside))


@dataclass(frozen=True)
class MaximalErrorScene:
    """Distance-field pair whose node scan misses the full ``Delta_2 * h``.

    The fields are exact at every node: the first set excludes two small
    open balls around the nodes ``a_node`` and ``d_node``, the second
    additionally carves an open ball of radius ``r + rho`` around ``p``.
    With ``r = Delta_2 * h`` the node scan returns exactly ``rho`` while the
    true distance is ``r + rho``, so ``delta = Delta_2 * h`` is attained.
    """

    field_a: ScalarField
    field_b: ScalarField
    expected_d_tilde: float
    expected_dh: float
    p: tuple[float, float]
    r: float


def build_maximal_error_scene(h: float, rho: float) -> MaximalErrorScene:
    """Construct the sharpness configuration at spacing ``h``.

    ``rho`` must be positive and small next to ``r = Delta_2 * h``; the
    construction needs the carved hole to swallow only the four special
    nodes, which holds for ``rho <= r / 2``.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    r = delta_closed_form(2) * h
    if not 0.0 < rho <= r / 2.0:
        raise ValueError("rho too large: geometry self-intersects")
    p = np.array([(8.0 - np.sqrt(7.0)) / 6.0, 0.5]) * h
    node_a = np.array([1.0, 0.0]) * h
    node_b = np.array([0.0, 0.0]) * h
    node_c = np.array([0.0, 1.0]) * h
    node_d = np.array([1.0, 1.0]) * h
    tol = 1e-12 * max(1.0, h)
    for q, want in ((node_a, r / 2), (node_d, r / 2), (node_b, r), (node_c, r)):
        got = float(np.linalg.norm(q - p))
        if abs(got - want) > tol:
            raise AssertionError("scene geometry out of tolerance")

    g = Grid(origin=(-2.0 * h, -2.0 * h), h=h, counts=(6, 6))
    pts = g.node_positions()
    dist_a = np.linalg.norm(pts - node_a, axis=-1)
    dist_d = np.linalg.norm(pts - node_d, axis=-1)
    dist_p = np.linalg.norm(pts - p, axis=-1)
    vals_a = np.maximum(0.0, np.maximum(r / 2.0 - dist_a, r / 2.0 - dist_d))
    vals_b = np.maximum(0.0, (r + rho) - dist_p)
    return MaximalErrorScene(
        field_a=ScalarField(g, vals_a),
        field_b=ScalarField(g, vals_b),
        expected_d_tilde=float(rho),
        expected_dh=float(r + rho),
        p=(float(p[0]), float(p[1])),
        r=float(r),
    )


@dataclass(frozen=True)
class ExternalCert:
    """Witness configuration for the quadratic bound.

    ``x`` realizes the directed distance to the second set at ``y``; the
    ball of radius ``r`` around ``c = x + r d`` may touch the first set only
    at ``x`` and the ball of radius ``R = r + |x - y|`` around ``c`` may
    touch the second set only at ``y``.
    """

    x: tuple[float, ...]
    y: tuple[float, ...]
    direction: tuple[float, ...]
    r: float
    c: tuple[float, ...]
    big_r: float
    admissible: bool
    slack: float


def certify_external(
    a: Shape, b: Shape, witness: tuple, r: float, gap: float
) -> ExternalCert:
    """Sampled admissibility check of a witness at clearance radius ``r``.

    Both clearance balls are tested against volume samples with tolerance
    ``2 * gap`` (the witness itself sits on the ball surfaces, and lattice
    samples may fall short of the extreme set points by the coverage
    radius).  ``slack`` is the smallest margin over the two exact
    requirements; admissibility at some radius implies admissibility at
    every smaller one.
    """
    if not r > 0:
        raise ValueError("clearance radius must be positive")
    x = np.asarray(witness[0], dtype=float)
    y = np.asarray(witness[1], dtype=float)
    dist = float(np.linalg.norm(x - y))
    if dist <= 0.0:
        raise ValueError("degenerate witness: x and y coincide")
    d = (x - y) / dist
    c = x + r * d
    big_r = r + dist
    pa = sample_volume(a, gap).points
    pb = sample_volume(b, gap).points
    min_a = float(np.min(np.linalg.norm(pa - c, axis=-1)))
    min_b = float(np.min(np.linalg.norm(pb - c, axis=-1)))
    tol = 2.0 * gap
    slack = min(min_a - r, min_b - big_r)
    admissible = (min_a >= r - tol) and (min_b >= big_r - tol)
    return ExternalCert(
        x=tuple(map(float, x)),
        y=tuple(map(float, y)),
        direction=tuple(map(float, d)),
        r=float(r),
        c=tuple(map(float, c)),
        big_r=float(big_r),
        admissible=bool(admissible),
        slack=float(slack),
    )


def external_additive_term(n: int, r: float, h: float) -> float:
    """The quadratic error margin ``sqrt(n h^2 + (r - sqrt n h)^2) - (r - sqrt n h)``.

    Only valid while ``h < r / sqrt(n)``; behaves like ``(n/2) h^2 / r`` for
    small ``h``.
    """
    root_n_h = np.sqrt(n) * h
    if h >= r / np.sqrt(n):
        raise ValueError("h >= r / sqrt(n): external bound not applicable")
    rest = r - root_n_h
    return float(np.sqrt(n * h * h + rest * rest) - rest)


def external_bound(cert: ExternalCert, g: Grid, d_tilde: float = 0.0) -> float:
    """Upper bound ``d_tilde + external_additive_term`` for a certified witness.

    Requires the witness segment from ``x`` to ``c`` to lie inside the grid
    hull (the proof needs a node near its midpoint) and ``h < r / sqrt(n)``.
    With the default ``d_tilde = 0`` the function returns just the additive
    term.
    """
    if not cert.admissible:
        raise ValueError("certificate is not admissible")
    seg = np.array([cert.x, cert.c])
    if not np.all(g.contains_points(seg, pad=1e-12)):
        raise ValueError("grid too small: witness segment leaves the hull")
    return d_tilde + external_additive_term(g.dim, cert.r, g.h)
