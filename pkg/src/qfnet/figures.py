"""Matplotlib report figures: network views and the metric-comparison panel.

Rendered as PNG so the pipeline's byte-determinism contract holds (the Agg
PNG writer emits no timestamps).  Network figures show the 2D view (z
dropped) next to the 3D view; the comparison panel shows |r| and p matrices
from the all-pairs Mantel stage.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .netgraph import FunctionalNetwork

_EDGE_COLOR = "#1f77b4"
_NODE_COLOR = "#d62728"


def _title(net: FunctionalNetwork) -> str:
    if net.kind == "mst":
        label = "MST"
    else:
        label = f"top {net.percent:g}% edges"
    return f"{net.source_metric.name}: {label}"


def render_network_png(net: FunctionalNetwork, path) -> None:
    """2D and 3D views of one functional network, side by side."""
    xs = np.array([nd[1] for nd in net.nodes])
    ys = np.array([nd[2] for nd in net.nodes])
    zs = np.array([nd[3] for nd in net.nodes])

    fig = plt.figure(figsize=(9, 4.2), dpi=120)
    ax2 = fig.add_subplot(1, 2, 1)
    for e in net.edges:
        ax2.plot(
            [xs[e.i], xs[e.j]], [ys[e.i], ys[e.j]],
            color=_EDGE_COLOR, linewidth=0.7, alpha=0.6, zorder=1,
        )
    ax2.scatter(xs, ys, s=12, color=_NODE_COLOR, zorder=2)
    ax2.set_xlabel("x (um)")
    ax2.set_ylabel("y (um)")
    ax2.set_title("2D")

    ax3 = fig.add_subplot(1, 2, 2, projection="3d")
    for e in net.edges:
        ax3.plot(
            [xs[e.i], xs[e.j]], [ys[e.i], ys[e.j]], [zs[e.i], zs[e.j]],
            color=_EDGE_COLOR, linewidth=0.6, alpha=0.6,
        )
    ax3.scatter(xs, ys, zs, s=10, color=_NODE_COLOR)
    ax3.set_xlabel("x")
    ax3.set_ylabel("y")
    ax3.set_zlabel("z")
    ax3.set_title("3D")

    fig.suptitle(_title(net))
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render_mantel_png(metric_names, r_matrix, p_matrix, path) -> None:
    """|r| and p heatmap panels for the all-pairs matrix comparison."""
    names = list(metric_names)
    k = len(names)
    r_abs = np.abs(np.asarray(r_matrix, dtype=float))
    p = np.asarray(p_matrix, dtype=float)

    fig, axes = plt.subplots(1, 2, figsize=(10, 4.4), dpi=120)
    for ax, data, label, vmax in (
        (axes[0], r_abs, "|r|", 1.0),
        (axes[1], p, "p", max(1e-9, float(np.nanmax(p)))),
    ):
        im = ax.imshow(data, vmin=0.0, vmax=vmax, cmap="viridis")
        ax.set_xticks(range(k), names, rotation=45, ha="right", fontsize=8)
        ax.set_yticks(range(k), names, fontsize=8)
        ax.set_title(label)
        for i in range(k):
            for j in range(k):
                if np.isfinite(data[i, j]):
                    ax.text(
                        j, i, f"{data[i, j]:.3f}",
                        ha="center", va="center", fontsize=6, color="white",
                    )
        fig.colorbar(im, ax=ax, shrink=0.85)
    fig.suptitle("pairwise matrix comparison (Mantel)")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
