"""Reproduction harness: benchmark scenes, refinement sweeps and randomized
ensembles, with delimited output.

All randomness flows through per-run generators derived from
``(seed, run_id)``, so runs can execute in any order or in parallel and
still produce identical records; record lists are always ordered by run id.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .bounds import delta_closed_form, external_additive_term
from .grid import Grid
from .hausdorff import dh_approx
from .redistance import fast_march, positive_part, sample_exact_sd, sample_levelset
from .shapes import Shape, ring_with_inner_ball

CSV_HEADER = (
    "run_id,seed,dim,h,disp_x,disp_y,disp_z,d_exact,d_tilde,delta,bound,source"
)
SOURCES = ("exact_sd", "fmm")

DEFAULT_H_2D = tuple(float(h) for h in np.geomspace(0.2, 0.025, 7))
DEFAULT_H_3D = tuple(float(h) for h in np.geomspace(0.4, 0.1, 5))
# Ensembles fit one order per run, so they sweep a wider spacing range than
# the deterministic sweeps: the extra leverage keeps a single lucky grid
# placement (anomalously small delta at one spacing) from flattening a fit.
ENSEMBLE_H_2D = tuple(float(h) for h in np.geomspace(0.45, 0.02, 10))
ENSEMBLE_H_3D = tuple(float(h) for h in np.geomspace(0.9, 0.15, 10))
DEFAULT_RUNS = 200
DEFAULT_DISPLACEMENT_NORM = 5.0


@dataclass(frozen=True)
class RunRecord:
    run_id: int
    seed: int
    dim: int
    h: float
    displacement: tuple[float, ...]
    d_exact: float
    d_tilde: float
    delta: float
    bound_used: float
    source: str

    def csv_row(self) -> list[str]:
        disp = list(self.displacement) + [0.0] * (3 - len(self.displacement))
        return [
            str(self.run_id),
            str(self.seed),
            str(self.dim),
            repr(self.h),
            *(repr(float(c)) for c in disp),
            repr(self.d_exact),
            repr(self.d_tilde),
            repr(self.delta),
            repr(self.bound_used),
            self.source,
        ]


@dataclass(frozen=True)
class OrderFit:
    """Least-squares slope of log(delta) against log(h)."""

    slope: float
    intercept: float
    points: tuple[tuple[float, float], ...]
    dropped: int


def fit_order(points: Iterable[tuple[float, float]]) -> OrderFit:
    """Fit ``delta ~ C * h**slope`` on the positive-delta points.

    Zero or negative deltas carry no order information on a log scale and
    are dropped (their count is reported); fewer than three usable points is
    an error.
    """
    pts = [(float(h), float(d)) for h, d in points]
    usable = [(h, d) for h, d in pts if d > 0.0]
    dropped = len(pts) - len(usable)
    if len(usable) < 3:
        raise ValueError("need at least three positive points for an order fit")
    log_h = np.log([h for h, _ in usable])
    log_d = np.log([d for _, d in usable])
    coeffs, *_ = np.linalg.lstsq(
        np.vstack([log_h, np.ones_like(log_h)]).T, log_d, rcond=None
    )
    return OrderFit(
        slope=float(coeffs[0]),
        intercept=float(coeffs[1]),
        points=tuple(usable),
        dropped=dropped,
    )


@dataclass(frozen=True)
class CircleInRingScene:
    """Shell-plus-ball versus bare shell, with its closed-form distance.

    The farthest cavity point from the shell is the origin while the ball
    covers it, and the ball's surface point nearest the origin afterwards:
    ``d_H = cavity_radius - max(0, |s| - inner_radius)``.  A displaced ball
    admits external witnesses up to clearance ``max_external_radius =
    |s| - inner_radius`` (at that radius the large ball becomes tangent to
    the whole inner rim, so the supremum itself is not admissible).
    """

    dim: int
    displacement: tuple[float, ...]
    shape_a: Shape
    shape_b: Shape
    d_exact: float
    witness: tuple[tuple[float, ...], tuple[float, ...]]
    max_external_radius: Optional[float]
    outer_radius: float
    ring_width: float
    inner_radius: float


def scene_circle_in_ring(
    dim: int,
    displacement: Sequence[float],
    outer_radius: float = 9.0,
    ring_width: float = 1.0,
    inner_radius: float = 1.0,
) -> CircleInRingScene:
    disp = tuple(float(c) for c in displacement)
    if len(disp) != dim:
        raise ValueError("displacement length must equal dim")
    a, b = ring_with_inner_ball(
        dim,
        disp,
        outer_radius=outer_radius,
        ring_width=ring_width,
        inner_radius=inner_radius,
    )
    cavity = outer_radius - ring_width
    s_norm = float(np.linalg.norm(disp))
    d_exact = cavity - max(0.0, s_norm - inner_radius)
    if s_norm > inner_radius:
        unit = np.asarray(disp) / s_norm
        x = (s_norm - inner_radius) * unit
        max_r = s_norm - inner_radius
    else:
        unit = np.zeros(dim)
        unit[0] = 1.0
        x = np.zeros(dim)
        max_r = None
    y = cavity * unit
    return CircleInRingScene(
        dim=dim,
        displacement=disp,
        shape_a=a,
        shape_b=b,
        d_exact=float(d_exact),
        witness=(tuple(map(float, x)), tuple(map(float, y))),
        max_external_radius=max_r,
        outer_radius=float(outer_radius),
        ring_width=float(ring_width),
        inner_radius=float(inner_radius),
    )


def scene_grid(
    dim: int,
    h: float,
    outer_radius: float = 9.0,
    offset_frac: Sequence[float] | None = None,
) -> Grid:
    """Grid whose hull covers the scene with the origin at a cell centre.

    ``offset_frac`` shifts the lattice by that fraction of a cell per axis
    (used by the randomized ensembles).
    """
    half = outer_radius + 1.0
    k = int(np.ceil(half / h - 0.5))
    origin = np.full(dim, -(k + 0.5) * h)
    if offset_frac is not None:
        off = np.asarray(offset_frac, dtype=float)
        if off.shape != (dim,) or np.any(off < 0.0) or np.any(off >= 1.0):
            raise ValueError("offset_frac components must lie in [0, 1)")
        origin = origin + off * h
    return Grid(origin=tuple(origin), h=h, counts=(2 * k + 2,) * dim)


def _scene_fields(scene: CircleInRingScene, g: Grid, source: str):
    if source not in SOURCES:
        raise ValueError(f"source must be one of {SOURCES}")
    if source == "exact_sd":
        sd_a = sample_exact_sd(g, scene.shape_a)
        sd_b = sample_exact_sd(g, scene.shape_b)
    else:
        sd_a = fast_march(sample_levelset(g, scene.shape_a))
        sd_b = fast_march(sample_levelset(g, scene.shape_b))
    return positive_part(sd_a), positive_part(sd_b)


def reference_bound(scene: CircleInRingScene, dim: int, h: float) -> float:
    """Piecewise reference curve: suitable-grid constant or external term.

    Monotone in the displacement: the external term decreases with the
    clearance radius and takes over once ``max_external_radius`` exceeds its
    validity floor ``sqrt(n) * h``.
    """
    base = delta_closed_form(dim) * h
    r = scene.max_external_radius
    if r is not None and h < r / np.sqrt(dim):
        return min(base, external_additive_term(dim, r, h))
    return base


def run_scene(
    scene: CircleInRingScene,
    h: float,
    source: str = "exact_sd",
    offset_frac: Sequence[float] | None = None,
    run_id: int = 0,
    seed: int = 0,
) -> RunRecord:
    g = scene_grid(scene.dim, h, scene.outer_radius, offset_frac)
    d_a, d_b = _scene_fields(scene, g, source)
    report = dh_approx(d_a, d_b)
    delta = scene.d_exact - report.d_tilde
    return RunRecord(
        run_id=run_id,
        seed=seed,
        dim=scene.dim,
        h=float(h),
        displacement=scene.displacement,
        d_exact=scene.d_exact,
        d_tilde=report.d_tilde,
        delta=float(delta),
        bound_used=reference_bound(scene, scene.dim, h),
        source=source,
    )


def sweep_displacement(
    dim: int,
    h: float,
    magnitudes: Sequence[float],
    source: str = "exact_sd",
    direction: Sequence[float] | None = None,
) -> list[RunRecord]:
    """Error against displacement magnitude at fixed spacing.

    The ``bound_used`` column carries the monotone reference curve; the
    origin sits at a cell centre so the centred case is reproducible.
    """
    if direction is None:
        unit = np.zeros(dim)
        unit[0] = 1.0
    else:
        unit = np.asarray(direction, dtype=float)
        unit = unit / np.linalg.norm(unit)
    records = []
    for i, mag in enumerate(magnitudes):
        scene = scene_circle_in_ring(dim, tuple(float(mag) * unit))
        records.append(run_scene(scene, h, source, run_id=i))
    return records


def sweep_h(
    dim: int,
    displacement: Sequence[float],
    h_list: Sequence[float],
    source: str = "exact_sd",
) -> tuple[list[RunRecord], OrderFit]:
    """Error against spacing for one scene, with its fitted order."""
    scene = scene_circle_in_ring(dim, displacement)
    records = [
        run_scene(scene, h, source, run_id=i) for i, h in enumerate(h_list)
    ]
    fit = fit_order([(r.h, r.delta) for r in records])
    return records, fit


def _map_ordered(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def default_h_list(dim: int) -> tuple[float, ...]:
    return DEFAULT_H_2D if dim == 2 else DEFAULT_H_3D


def randomized_ensemble(
    dim: int,
    runs: int,
    seed: int,
    h_list: Sequence[float] | None = None,
    displacement_norm: float = DEFAULT_DISPLACEMENT_NORM,
    threads: int = 1,
) -> tuple[list[RunRecord], list[OrderFit], tuple[np.ndarray, np.ndarray]]:
    """Randomly displaced and shifted scenes swept over ``h_list``.

    Per run, a generator derived from ``(seed, run_id)`` draws a uniform
    displacement direction, then one fractional lattice shift per grid of
    the sweep.  Redrawing the shift for every spacing matters: reusing a
    single shift freezes the node pattern around the witness segment in
    lattice units, so a chance near-alignment of a lattice direction with
    the displacement persists under refinement and caps the observed order
    near one.  Returns the flat record list (run-major, ordered), one order
    fit per run, and the histogram of fitted slopes binned at width 0.25.
    """
    if dim not in (2, 3):
        raise ValueError("ensembles are defined for dimensions 2 and 3")
    if runs < 1:
        raise ValueError("need at least one run")
    if h_list is None:
        h_list = ENSEMBLE_H_2D if dim == 2 else ENSEMBLE_H_3D
    hs = tuple(float(h) for h in h_list)

    def one_run(run_id: int) -> tuple[list[RunRecord], OrderFit]:
        rng = np.random.default_rng([seed, run_id])
        vec = rng.normal(size=dim)
        vec = vec / np.linalg.norm(vec)
        offsets = rng.random((len(hs), dim))
        scene = scene_circle_in_ring(dim, tuple(displacement_norm * vec))
        recs = [
            run_scene(scene, h, "exact_sd", offset_frac=tuple(off), run_id=run_id, seed=seed)
            for h, off in zip(hs, offsets)
        ]
        return recs, fit_order([(r.h, r.delta) for r in recs])

    results = _map_ordered(one_run, list(range(runs)), threads)
    records: list[RunRecord] = []
    fits: list[OrderFit] = []
    for recs, fit in results:
        records.extend(recs)
        fits.append(fit)
    slopes = np.array([f.slope for f in fits])
    lo = np.floor(slopes.min() / 0.25) * 0.25
    hi = np.ceil(slopes.max() / 0.25) * 0.25
    if hi <= lo:
        hi = lo + 0.25
    edges = np.arange(lo, hi + 0.25 / 2, 0.25)
    counts, edges = np.histogram(slopes, bins=edges)
    return records, fits, (edges, counts)


def write_records_csv(records: Iterable[RunRecord], path, fmt: str = "csv") -> None:
    """Delimited run records under the fixed header.

    ``fmt="csv"`` is comma separated; ``fmt="gnuplot"`` writes the same
    columns whitespace separated with a ``#`` header line.
    """
    if fmt not in ("csv", "gnuplot"):
        raise ValueError("fmt must be 'csv' or 'gnuplot'")
    with open(path, "w", newline="") as fh:
        if fmt == "csv":
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER.split(","))
            for rec in records:
                writer.writerow(rec.csv_row())
        else:
            fh.write("# " + " ".join(CSV_HEADER.split(",")) + "\n")
            for rec in records:
                fh.write(" ".join(rec.csv_row()) + "\n")


def records_csv_text(records: Iterable[RunRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_HEADER.split(","))
    for rec in records:
        writer.writerow(rec.csv_row())
    return buf.getvalue()


def read_records_csv(path) -> list[RunRecord]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER.split(","):
            raise ValueError("unexpected records header")
        out = []
        for row in reader:
            dim = int(row[2])
            out.append(
                RunRecord(
                    run_id=int(row[0]),
                    seed=int(row[1]),
                    dim=dim,
                    h=float(row[3]),
                    displacement=tuple(float(c) for c in row[4 : 4 + dim]),
                    d_exact=float(row[7]),
                    d_tilde=float(row[8]),
                    delta=float(row[9]),
                    bound_used=float(row[10]),
                    source=row[11],
                )
            )
        return out
