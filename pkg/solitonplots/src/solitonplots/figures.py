"""The four figure kinds.

Builders take parsed tables and return a matplotlib Figure; writing and
determinism policy live in the cli module.  Style is pinned here so a
rerun of the same inputs reproduces the same drawing.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from solitonplots.readers import Table

RC = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
    "legend.fontsize": 8,
    "svg.hashsalt": "solitonplots",
}


def _short(label: str) -> str:
    for prefix in ("modulation_", "control_", "conserved_", "distance_"):
        if label.startswith(prefix):
            return label[len(prefix):]
    return label


def distance_figure(modulated: list[Table], raw: list[Table],
                    thresholds: list[float], logy: bool) -> plt.Figure:
    """Modulated distance to the soliton orbit over time, one curve per
    run, with the raw (unmodulated) distance faint behind it and the
    stability threshold dashed per amplitude."""
    fig, ax = plt.subplots()
    for t in raw:
        ax.plot(t.col("t"), t.col("dR_raw"), color="0.75", lw=0.8, zorder=1)
    for t in modulated:
        ax.plot(t.col("t"), t.col("dR_modulated"), label=_short(t.label),
                zorder=2)
    for eps in thresholds:
        ax.axhline(eps, ls="--", color="0.4", lw=0.8, zorder=0)
        ax.annotate(f"{eps:g}", xy=(0.99, eps), xycoords=("axes fraction",
                                                          "data"),
                    ha="right", va="bottom", fontsize=7, color="0.4")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("distance to the soliton orbit")
    ax.set_title("modulated distance (raw distance in grey)")
    if modulated:
        ax.legend(loc="best")
    fig.tight_layout()
    return fig


def modulation_figure(tables: list[Table]) -> plt.Figure:
    """Tracked center and phase with their predicted rates."""
    fig, axes = plt.subplots(2, 2, figsize=(7.2, 4.8), sharex=True)
    panels = (("xi", "center $\\xi(t)$"), ("theta", "phase $\\theta(t)$"),
              ("xidot", "rate $\\dot\\xi(t)$"),
              ("thetadot", "rate $\\dot\\theta(t)$"))
    for ax, (colname, title) in zip(axes.ravel(), panels):
        for t in tables:
            ax.plot(t.col("t"), t.col(colname), label=_short(t.label))
        ax.set_title(title)
    for ax in axes[1]:
        ax.set_xlabel("t")
    if len(tables) > 1:
        axes[0, 0].legend(loc="best")
    fig.tight_layout()
    return fig


def spectrum_figure(kplus: Table, kminus: Table) -> plt.Figure:
    """Lowest eigenvalues of the two quadratic-form operators, spurious
    boundary modes hollow, with the essential-spectrum edges marked."""
    fig, axes = plt.subplots(1, 2, figsize=(7.2, 3.6), sharey=False)
    for ax, table, name, edge in ((axes[0], kplus, "K+", 2.0),
                                  (axes[1], kminus, "K-", 0.0)):
        idx = table.col("index")
        lam = table.col("eigenvalue")
        spurious = table.col("spurious") > 0.5
        clean = ~spurious
        ax.stem(idx[clean], lam[clean], basefmt=" ")
        if np.any(spurious):
            ax.plot(idx[spurious], lam[spurious], "o", mfc="none", mec="0.5",
                    label="boundary artifact")
            ax.legend(loc="best")
        ax.axhline(edge, ls="--", color="0.4", lw=0.8)
        ax.annotate(f"band edge {edge:g}", xy=(0.02, edge),
                    xycoords=("axes fraction", "data"), va="bottom",
                    fontsize=7, color="0.4")
        ax.set_title(f"lowest {name} eigenvalues")
        ax.set_xlabel("index")
    axes[0].set_ylabel("eigenvalue")
    fig.tight_layout()
    return fig


def coercivity_figure(probes: Table, c_lower: float, C_upper: float,
                      logy: bool) -> plt.Figure:
    """Quadratic-form gap against squared distance; the two lines come
    from the run's own summary and should sandwich every point."""
    fig, ax = plt.subplots()
    d2 = probes.col("dR") ** 2
    gap = probes.col("gap")
    pos = gap > 0
    ax.plot(d2[pos], gap[pos], "o", ms=3.5, label="probes")
    if np.any(~pos):
        floor = np.min(gap[pos]) if np.any(pos) else 1.0
        ax.plot(d2[~pos], np.full(np.count_nonzero(~pos), floor), "x",
                color="0.5", label="gap $\\leq$ 0 (clipped)")
    span = np.array([d2.min(), d2.max()])
    ax.plot(span, c_lower * span, "--", color="0.3",
            label=f"c = {c_lower:.3g}")
    ax.plot(span, C_upper * span, "-.", color="0.3",
            label=f"C = {C_upper:.3g}")
    if logy:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel("squared distance $d_R^2$")
    ax.set_ylabel("functional gap")
    ax.set_title("coercivity sandwich")
    ax.legend(loc="best")
    fig.tight_layout()
    return fig
