"""Figure rendering for the CLI report paths (PNG files next to the CSV)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_weights_figure(y, v, w, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.semilogx(y, v, label="V", lw=1.2)
    ax.semilogx(y, w, label="W", lw=1.2, ls="--")
    ax.set_xlabel("y")
    ax.set_ylabel("weight value")
    ax.legend(frameon=False)
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_scan_figure(points, alpha: float, beta: float, path: str) -> None:
    logq = np.array([math.log(q) for q, _ in points])
    totals = np.array([t for _, t in points])
    fit = alpha * logq + beta
    fig, (ax, axr) = plt.subplots(
        2, 1, figsize=(6.4, 5.6), sharex=True, height_ratios=[3, 1]
    )
    ax.plot(logq, totals, "o", ms=4, label="engine total")
    ax.plot(logq, fit, "-", lw=1.0, label=f"{alpha:.3f} log q {beta:+.3f}")
    ax.set_ylabel("spectral average")
    ax.legend(frameon=False)
    axr.axhline(0.0, color="0.6", lw=0.8)
    axr.plot(logq, totals - fit, "o", ms=3)
    axr.set_xlabel("log q")
    axr.set_ylabel("residual")
    for a in (ax, axr):
        a.spines["right"].set_visible(False)
        a.spines["top"].set_visible(False)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def save_sieve_figure(cells, path: str) -> None:
    x = np.array([c.D * c.C1 for c in cells], dtype=float)
    ratios = np.array([c.ratio for c in cells])
    bench = np.array([math.log(2.0 + v) ** 2 for v in x])
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.loglog(x, ratios, "o", ms=4, label="sum / ((D+C1) C1)")
    ax.loglog(x, bench, "-", lw=1.0, color="0.4", label="log^2(2 + D C1)")
    ax.set_xlabel("D * C1")
    ax.set_ylabel("normalized double sum")
    ax.legend(frameon=False)
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
