"""Randomized-grid machinery: segment probes, fractional iterates, and the
order-statistics model for the nearest-node distance.

A segment of length ``lam`` inside the grid crosses at least
``floor(lam / (sqrt(n) h))`` cell faces, so placing the grid at random makes
the minimum node-to-segment distance behave like the minimum of many
independent draws; its expectation decays like ``N**(-1/(n-1))`` and drives
the observed superquadratic convergence orders.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma
from typing import Optional

import numpy as np

from .grid import Grid


@dataclass(frozen=True)
class SegmentProbe:
    """Minimum node distance to a segment plus its transversal face count."""

    start: tuple[float, ...]
    end: tuple[float, ...]
    beta: float
    edges_crossed: int


def probe_segment(g: Grid, start, end) -> SegmentProbe:
    """Scan all nodes against a segment inside the grid hull.

    ``beta`` is the smallest node-to-segment distance; ``edges_crossed``
    counts, per axis, the lattice hyperplanes met by the closed segment
    (touching counts, matching the at-least character of the face-counting
    bound).
    """
    s = np.asarray(start, dtype=float)
    e = np.asarray(end, dtype=float)
    if s.shape != (g.dim,) or e.shape != (g.dim,):
        raise ValueError("segment endpoints must match the grid dimension")
    if not (g.contains_points(s[None, :])[0] and g.contains_points(e[None, :])[0]):
        raise ValueError("segment outside hull")
    pts = g.node_positions().reshape(-1, g.dim)
    seg = e - s
    seg_len2 = float(seg @ seg)
    if seg_len2 == 0.0:
        dists = np.linalg.norm(pts - s, axis=-1)
    else:
        t = np.clip(((pts - s) @ seg) / seg_len2, 0.0, 1.0)
        proj = s[None, :] + t[:, None] * seg[None, :]
        dists = np.linalg.norm(pts - proj, axis=-1)
    beta = float(np.min(dists))

    crossed = 0
    origin = np.asarray(g.origin)
    u_s = (s - origin) / g.h
    u_e = (e - origin) / g.h
    for k in range(g.dim):
        lo, hi = sorted((u_s[k], u_e[k]))
        first = int(np.ceil(lo))
        last = int(np.floor(hi))
        if last >= first:
            crossed += last - first + 1
    return SegmentProbe(
        start=tuple(map(float, s)),
        end=tuple(map(float, e)),
        beta=beta,
        edges_crossed=int(crossed),
    )


RATIONAL_GAP = 1e-13


@dataclass(frozen=True)
class IterateAnalysis:
    """Pigeonhole data for the sequence ``frac(x0 + i k)``, i = 0..N.

    ``epsilon`` is the smallest positive gap between two iterates; some
    index ``m <= K_bound <= 2 / epsilon**2`` satisfies
    ``frac(x0 + m k) <= epsilon``.  When two iterates collide to within
    1e-13 the stride is treated as rational: no epsilon or m is reported.
    """

    x0: float
    k: float
    n: int
    rational: bool
    epsilon: Optional[float] = None
    pair: Optional[tuple[int, int]] = None
    m: Optional[int] = None
    k_bound: Optional[int] = None

    def to_json_dict(self) -> dict:
        return {
            "x0": self.x0,
            "k": self.k,
            "N": self.n,
            "rational": self.rational,
            "epsilon": self.epsilon,
            "pair": list(self.pair) if self.pair else None,
            "m": self.m,
            "K_bound": self.k_bound,
        }


def _frac(values: np.ndarray) -> np.ndarray:
    return np.mod(values, 1.0)


def analyze_iterates(x0: float, k: float, n: int) -> IterateAnalysis:
    """Locate the closest iterate pair and the first small iterate.

    Enumerates ``frac(x0 + i k)`` for ``i = 0..n``, takes the minimal
    positive gap ``epsilon`` (pigeonhole gives ``epsilon <= 1/n``), then
    scans forward for the first ``m`` with ``frac(x0 + m k) <= epsilon``.
    The scan is capped by ``K_bound = n * ceil(1/epsilon)``, which never
    exceeds ``2 / epsilon**2``.
    """
    if n < 1:
        raise ValueError("need at least one step")
    idx = np.arange(n + 1, dtype=float)
    xs = _frac(x0 + idx * k)
    order = np.argsort(xs, kind="stable")
    xs_sorted = xs[order]
    gaps = np.diff(xs_sorted)
    if gaps.size == 0:
        raise ValueError("need at least one step")
    j = int(np.argmin(gaps))
    epsilon = float(gaps[j])
    if epsilon <= RATIONAL_GAP:
        # A collision to working precision: the stride divides the unit
        # interval rationally and the small-iterate guarantee is void.
        return IterateAnalysis(x0=float(x0), k=float(k), n=int(n), rational=True)
    i0, j0 = int(order[j]), int(order[j + 1])
    k_bound = int(n * np.ceil(1.0 / epsilon))

    m = None
    chunk = 1 << 20
    base = 0
    while base <= k_bound:
        stop = min(base + chunk, k_bound + 1)
        vals = _frac(x0 + np.arange(base, stop, dtype=float) * k)
        hits = np.nonzero(vals <= epsilon)[0]
        if hits.size:
            m = base + int(hits[0])
            break
        base = stop
    if m is None:
        raise RuntimeError("iterate scan exhausted its bound without a hit")
    return IterateAnalysis(
        x0=float(x0),
        k=float(k),
        n=int(n),
        rational=False,
        epsilon=epsilon,
        pair=(min(i0, j0), max(i0, j0)),
        m=m,
        k_bound=k_bound,
    )


def expected_min_distance(n: int, big_n: int) -> float:
    """Mean minimum norm of ``big_n`` uniform draws on the orthant sector.

    The sector is ``{x in [0, inf)^(n-1) : |x| < sqrt(n-1)}`` whose radial
    density is ``(n-1)**((3-n)/2) r**(n-2)``; the closed form is
    ``N sqrt(n-1) B(n/(n-1), N)`` evaluated through log-gamma so large ``N``
    stays stable.
    """
    if n < 2:
        raise ValueError("the sector model needs dimension >= 2")
    if big_n < 1:
        raise ValueError("need at least one draw")
    a = n / (n - 1.0)
    log_beta = lgamma(a) + lgamma(big_n) - lgamma(big_n + a)
    return float(big_n * np.sqrt(n - 1.0) * np.exp(log_beta))


def simulate_min_distance(
    n: int, big_n: int, trials: int, seed: int
) -> tuple[float, float]:
    """Monte Carlo estimate of the sector minimum: ``(mean, stderr)``.

    Radii follow ``sqrt(n-1) * U**(1/(n-1))``; directions on the orthant
    patch drop out of the norm minimum, so only radii are drawn.  Each trial
    uses a generator derived from ``(seed, trial)``: results do not depend
    on execution order or worker count.
    """
    if n < 2:
        raise ValueError("the sector model needs dimension >= 2")
    if trials < 2:
        raise ValueError("need at least two trials for a standard error")
    mins = np.empty(trials)
    scale = np.sqrt(n - 1.0)
    power = 1.0 / (n - 1.0)
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        # The radius transform is monotone, so the minimum radius is the
        # transformed minimum uniform draw.
        mins[t] = scale * np.min(rng.random(big_n)) ** power
    mean = float(np.mean(mins))
    stderr = float(np.std(mins, ddof=1) / np.sqrt(trials))
    return mean, stderr


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    chi_square: float


def uniformity_histogram(x0: float, k: float, count: int, bins: int) -> Histogram:
    """Bin the fractional iterates and report the chi-square statistic.

    Descriptive only: equidistributed strides give a statistic near the bin
    count, strongly rational ones pile into few bins.
    """
    if count < 1 or bins < 1:
        raise ValueError("count and bins must be positive")
    xs = _frac(x0 + np.arange(count, dtype=float) * k)
    counts, edges = np.histogram(xs, bins=bins, range=(0.0, 1.0))
    expected = count / bins
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    return Histogram(edges=edges, counts=counts, chi_square=chi2)
