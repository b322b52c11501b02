"""Matplotlib figure rendering for the report paths.

Figures are written next to the delimited outputs with the non-interactive
Agg backend so batch runs need no display and produce identical bytes for
identical inputs.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["save_trace_figure", "save_heatmap_figure", "save_experiment_figure"]

_SAVE_KW = dict(dpi=120, metadata={"Software": None})


def save_trace_figure(path, traces: np.ndarray, burn_in: int | None = None):
    """Log-posterior trace per chain."""
    traces = np.atleast_2d(np.asarray(traces))
    fig, ax = plt.subplots(figsize=(7, 4))
    iters = np.arange(1, traces.shape[1] + 1)
    for c in range(traces.shape[0]):
        ax.plot(iters, traces[c], lw=0.8, label=f"chain {c + 1}")
    if burn_in:
        ax.axvline(burn_in, color="k", ls="--", lw=0.8)
    ax.set_xlabel("iteration")
    ax.set_ylabel("log posterior (unnormalized)")
    if traces.shape[0] <= 10:
        ax.legend(fontsize=7, ncol=2, frameon=False)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def save_heatmap_figure(path, matrix: np.ndarray, order: np.ndarray | None = None):
    """Co-clustering probability heatmap, optionally reordered."""
    m = np.asarray(matrix, dtype=np.float64)
    if order is not None:
        m = m[np.ix_(order, order)]
    fig, ax = plt.subplots(figsize=(5.5, 5))
    im = ax.imshow(m, cmap="gray", vmin=0.0, vmax=1.0, interpolation="nearest")
    ax.set_xlabel("object")
    ax.set_ylabel("object")
    fig.colorbar(im, ax=ax, label="co-clustering probability")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def save_experiment_figure(path, rows):
    """Mean ARI with one-sd error bars per method; rows = (name, mean, sd)."""
    rows = list(rows)
    names = [r[0] for r in rows]
    means = [r[1] for r in rows]
    sds = [r[2] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = np.arange(len(names))
    ax.bar(xs, means, yerr=sds, capsize=4, color="#7293cb", edgecolor="k", lw=0.5)
    ax.set_xticks(xs)
    ax.set_xticklabels(names)
    ax.set_ylabel("adjusted Rand index")
    ax.set_ylim(0.0, 1.05)
    ax.axhline(1.0, color="k", lw=0.5, ls=":")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
