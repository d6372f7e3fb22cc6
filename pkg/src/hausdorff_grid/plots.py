"""Figure rendering for the CLI report paths.

Each function takes data already computed by :mod:`experiments` or
:mod:`stochastic` and writes one PNG next to the delimited output; nothing
here feeds back into the computations.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import OrderFit, RunRecord
from .stochastic import Histogram

_SAVE_OPTS = {"dpi": 130, "bbox_inches": "tight"}


def plot_sweep_h(records: Sequence[RunRecord], fit: OrderFit, path) -> None:
    hs = np.array([r.h for r in records])
    deltas = np.array([r.delta for r in records])
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.loglog(hs, deltas, "o-", color="tab:blue", label="observed gap")
    ax.loglog(
        hs,
        np.exp(fit.intercept) * hs**fit.slope,
        "--",
        color="tab:gray",
        label=f"fit: order {fit.slope:.2f}",
    )
    ax.loglog(hs, [r.bound_used for r in records], "k-", label="certified bound")
    ax.set_xlabel("grid spacing h")
    ax.set_ylabel("error of the node scan")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def plot_sweep_displacement(records: Sequence[RunRecord], path) -> None:
    mags = np.array([float(np.linalg.norm(r.displacement)) for r in records])
    deltas = np.array([r.delta for r in records])
    bound = np.array([r.bound_used for r in records])
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.semilogy(mags, np.maximum(deltas, 1e-17), "o-", color="tab:blue", label="observed gap")
    ax.semilogy(mags, bound, "k-", label="reference bound")
    ax.set_xlabel("displacement magnitude")
    ax.set_ylabel("error of the node scan")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def plot_order_histogram(edges: np.ndarray, counts: np.ndarray, path) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.bar(edges[:-1], counts, width=np.diff(edges), align="edge", color="tab:blue", edgecolor="white")
    ax.set_xlabel("fitted convergence order")
    ax.set_ylabel("runs")
    ax.grid(True, axis="y", alpha=0.3)
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def plot_ensemble_runs(records: Sequence[RunRecord], path) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    hs = sorted({r.h for r in records})
    ax.loglog(
        [r.h for r in records],
        [max(r.delta, 1e-17) for r in records],
        ".",
        color="tab:blue",
        alpha=0.25,
        label="runs",
    )
    geo = []
    for h in hs:
        vals = [r.delta for r in records if r.h == h and r.delta > 0]
        geo.append(np.exp(np.mean(np.log(vals))) if vals else np.nan)
    ax.loglog(hs, geo, "o-", color="tab:red", label="geometric mean")
    bound = {h: max(r.bound_used for r in records if r.h == h) for h in hs}
    ax.loglog(hs, [bound[h] for h in hs], "k-", label="certified bound")
    ax.set_xlabel("grid spacing h")
    ax.set_ylabel("error of the node scan")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def plot_uniformity(hist: Histogram, path) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    widths = np.diff(hist.edges)
    ax.bar(hist.edges[:-1], hist.counts, width=widths, align="edge", color="tab:blue", edgecolor="white")
    ax.axhline(float(np.sum(hist.counts)) / len(hist.counts), color="k", linestyle="--", label="uniform level")
    ax.set_xlabel("fractional iterate")
    ax.set_ylabel("count")
    ax.legend()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def plot_min_distance(table: Sequence[dict], path) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ns = np.array([row["draws"] for row in table])
    ax.loglog(ns, [row["expected"] for row in table], "k-", label="closed form")
    ax.errorbar(
        ns,
        [row["mc_mean"] for row in table],
        yerr=[3 * row["mc_stderr"] for row in table],
        fmt="o",
        color="tab:blue",
        label="Monte Carlo (3 se)",
    )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("draw count")
    ax.set_ylabel("expected minimum norm")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
