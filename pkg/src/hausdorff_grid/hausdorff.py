"""Node-sampled Hausdorff distances and brute-force reference oracles.

The grid value ``d_tilde = max over nodes of |d_A - d_B|`` never exceeds the
true Hausdorff distance, because ``sup_x |d_A(x) - d_B(x)|`` over all of
space equals it and the nodes are a subset.  Everything else in this module
exists to sandwich that lower bound: sampling oracles for the true distance,
the complementary distance, the signed-distance sup norm, and the maximum
distance function.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .grid import Grid
from .redistance import ScalarField
from .shapes import Shape, lattice_points, sample_volume

BOUND_KINDS = ("none", "worst_case", "suitable", "external")


@dataclass(frozen=True)
class OracleResult:
    """Brute-force Hausdorff estimate over finite point clouds."""

    dh: float
    one_sided_ab: float
    one_sided_ba: float
    witness: tuple[tuple[float, ...], tuple[float, ...]]
    error_bound: float

    def to_json_dict(self) -> dict:
        return {
            "dh": self.dh,
            "ab": self.one_sided_ab,
            "ba": self.one_sided_ba,
            "witness": [list(self.witness[0]), list(self.witness[1])],
            "error_bound": self.error_bound,
        }


@dataclass(frozen=True)
class HausdorffReport:
    """Result of the node scan, optionally decorated with bounds and oracle."""

    d_tilde: float
    argmax_node: tuple[int, ...]
    tie_count: int
    one_sided_ab: Optional[float] = None
    one_sided_ba: Optional[float] = None
    upper_bound: Optional[float] = None
    bound_kind: str = "none"
    oracle: Optional[OracleResult] = None

    def __post_init__(self) -> None:
        if self.bound_kind not in BOUND_KINDS:
            raise ValueError(f"bound_kind must be one of {BOUND_KINDS}")

    def with_bound(self, kind: str, value: float) -> "HausdorffReport":
        return replace(self, bound_kind=kind, upper_bound=float(value))

    def with_oracle(self, oracle: OracleResult) -> "HausdorffReport":
        return replace(
            self,
            oracle=oracle,
            one_sided_ab=oracle.one_sided_ab,
            one_sided_ba=oracle.one_sided_ba,
        )

    def to_json_dict(self) -> dict:
        data = {
            "d_tilde": self.d_tilde,
            "argmax": list(self.argmax_node),
            "tie_count": self.tie_count,
            "bounds": {"kind": self.bound_kind, "value": self.upper_bound},
        }
        data["oracle"] = self.oracle.to_json_dict() if self.oracle else None
        return data


def dh_approx(d_a: ScalarField, d_b: ScalarField) -> HausdorffReport:
    """Max node difference of two unsigned distance fields.

    This is a lower bound for the Hausdorff distance of the sampled sets.
    Fields must be nonnegative (apply ``positive_part`` to signed input
    first; feeding signed values here inflates the difference and silently
    breaks the lower-bound property).  The argmax reports the first node in
    index order along with the number of nodes attaining the maximum.
    """
    if d_a.grid != d_b.grid:
        raise ValueError("grid mismatch between fields")
    if np.any(d_a.values < 0.0) or np.any(d_b.values < 0.0):
        raise ValueError("fields must be unsigned distances (>= 0)")
    diff = np.abs(d_a.values - d_b.values)
    flat = diff.ravel()
    best = int(np.argmax(flat))
    value = float(flat[best])
    ties = int(np.count_nonzero(flat == value))
    node = tuple(int(i) for i in np.unravel_index(best, diff.shape))
    return HausdorffReport(d_tilde=value, argmax_node=node, tie_count=ties)


def _directed(points_from: np.ndarray, tree_to: cKDTree, pts_to: np.ndarray):
    dists, idx = tree_to.query(points_from)
    k = int(np.argmax(dists))
    return float(dists[k]), points_from[k], pts_to[idx[k]]


def dh_oracle(a: Shape, b: Shape, gap: float) -> OracleResult:
    """Brute-force Hausdorff distance over volume sample clouds.

    The returned ``error_bound = 2 * sqrt(dim) * gap`` covers both the
    outer maximization (missing the true witness) and the inner minimization
    (nearest sample standing in for the nearest set point).
    """
    pa = sample_volume(a, gap).points
    pb = sample_volume(b, gap).points
    tree_a, tree_b = cKDTree(pa), cKDTree(pb)
    ab, xa, ya = _directed(pa, tree_b, pb)
    ba, xb, yb = _directed(pb, tree_a, pa)
    if ab >= ba:
        witness = (tuple(map(float, xa)), tuple(map(float, ya)))
    else:
        witness = (tuple(map(float, xb)), tuple(map(float, yb)))
    err = 2.0 * np.sqrt(a.dim) * gap
    return OracleResult(max(ab, ba), ab, ba, witness, float(err))


def dh_complementary_oracle(
    a: Shape, b: Shape, gap: float, bbox: tuple
) -> OracleResult:
    """Hausdorff distance of the two complements, sampled inside ``bbox``.

    The complements are unbounded, so the oracle is only meaningful when the
    witness of the complementary distance lies inside the box; a witness
    that lands within two pitches of the box wall raises ``bbox too small``.
    """
    lo = np.asarray(bbox[0], dtype=float)
    hi = np.asarray(bbox[1], dtype=float)
    for s in (a, b):
        s_lo, s_hi = s.bounding_box()
        if np.any(s_lo <= lo) or np.any(s_hi >= hi):
            raise ValueError("bbox too small: must strictly contain both shapes")
    pts = lattice_points(lo, hi, gap)
    ca = pts[a.evaluate_sd(pts) > 0.0]
    cb = pts[b.evaluate_sd(pts) > 0.0]
    if ca.size == 0 or cb.size == 0:
        raise ValueError("bbox too small: a complement has no sample inside")
    tree_a, tree_b = cKDTree(ca), cKDTree(cb)
    ab, xa, ya = _directed(ca, tree_b, cb)
    ba, xb, yb = _directed(cb, tree_a, ca)
    if ab >= ba:
        dh, witness = ab, (xa, ya)
    else:
        dh, witness = ba, (xb, yb)
    if dh > 0.0:
        margin = 2.0 * gap
        for p in witness:
            if np.any(p - lo < margin) or np.any(hi - p < margin):
                raise ValueError("bbox too small: witness touches the box wall")
    err = 2.0 * np.sqrt(a.dim) * gap
    witness_t = (tuple(map(float, witness[0])), tuple(map(float, witness[1])))
    return OracleResult(dh, ab, ba, witness_t, float(err))


def sd_supnorm(sd_a: ScalarField, sd_b: ScalarField) -> tuple[float, tuple[int, ...]]:
    """Sup norm of the signed-distance difference over nodes, with argmax.

    Unlike ``dh_approx`` this keeps the signs; the value dominates both the
    plain and the complementary node-sampled distances.
    """
    if sd_a.grid != sd_b.grid:
        raise ValueError("grid mismatch between fields")
    diff = np.abs(sd_a.values - sd_b.values)
    best = int(np.argmax(diff.ravel()))
    node = tuple(int(i) for i in np.unravel_index(best, diff.shape))
    return float(diff.ravel()[best]), node


def md_oracle(s: Shape, x, gap: float) -> float:
    """Maximum distance from ``x`` to the set, by volume sampling.

    Underestimates by at most ``sqrt(dim) * gap``.
    """
    pts = sample_volume(s, gap).points
    x = np.asarray(x, dtype=float)
    return float(np.max(np.linalg.norm(pts - x, axis=-1)))
