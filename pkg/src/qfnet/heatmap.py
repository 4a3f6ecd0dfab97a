"""Self-contained deterministic SVG heatmaps of distance matrices.

One rect per matrix cell, colored on a linear scale over the off-diagonal
range, with a gradient legend annotated with the min/max values.  Unset
diagonal entries (NaN) render gray.  The SVG is assembled from plain
strings, so output bytes depend only on the matrix.
"""

from __future__ import annotations

import numpy as np

from .metrics import DistanceMatrix

# viridis control points, interpolated linearly in RGB
_STOPS = (
    (0.0, (68, 1, 84)),
    (0.25, (59, 82, 139)),
    (0.5, (33, 145, 140)),
    (0.75, (94, 201, 98)),
    (1.0, (253, 231, 37)),
)
_NAN_COLOR = "#d9d9d9"
CELL = 10  # px per cell
MARGIN = 12
LEGEND_W = 18
LEGEND_GAP = 24


def color_at(t: float) -> str:
    """Hex color for t in [0, 1] on the built-in map."""
    t = min(max(t, 0.0), 1.0)
    for (t0, c0), (t1, c1) in zip(_STOPS, _STOPS[1:]):
        if t <= t1:
            f = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
            rgb = tuple(round(a + f * (b - a)) for a, b in zip(c0, c1))
            return "#{:02x}{:02x}{:02x}".format(*rgb)
    return "#{:02x}{:02x}{:02x}".format(*_STOPS[-1][1])  # pragma: no cover


def render_heatmap_svg(m: DistanceMatrix, path=None) -> str:
    """Render a matrix heatmap; writes to `path` if given, returns the SVG."""
    n = m.size
    off_diag = m.values[~np.eye(n, dtype=bool)]
    finite = off_diag[np.isfinite(off_diag)]
    if finite.size == 0:
        lo, hi = 0.0, 0.0
    else:
        lo, hi = float(finite.min()), float(finite.max())
    degenerate = hi == lo

    width = MARGIN * 2 + n * CELL + LEGEND_GAP + LEGEND_W + 60
    height = MARGIN * 2 + max(n * CELL, 60)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<!-- metric: {m.metric.name} ({m.metric.orientation}); "
        f"linear color scale over off-diagonal [{lo!r}, {hi!r}]"
        + ("; degenerate range: constant off-diagonal" if degenerate else "")
        + " -->",
    ]
    for i in range(n):
        for j in range(n):
            v = m.values[i, j]
            if not np.isfinite(v):
                fill = _NAN_COLOR
            elif degenerate:
                fill = color_at(0.5)
            else:
                fill = color_at((float(v) - lo) / (hi - lo))
            x = MARGIN + j * CELL
            y = MARGIN + i * CELL
            parts.append(
                f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}"/>'
            )

    # legend: vertical gradient bar, max at top
    lx = MARGIN + n * CELL + LEGEND_GAP
    lh = max(n * CELL, 60)
    parts.append("<defs><linearGradient id=\"scale\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">")
    for t, _ in _STOPS:
        parts.append(f'<stop offset="{t}" stop-color="{color_at(t)}"/>')
    parts.append("</linearGradient></defs>")
    parts.append(
        f'<rect x="{lx}" y="{MARGIN}" width="{LEGEND_W}" height="{lh}" '
        f'fill="url(#scale)" stroke="#333"/>'
    )
    label_style = 'font-family="monospace" font-size="10"'
    parts.append(
        f'<text x="{lx + LEGEND_W + 4}" y="{MARGIN + 10}" {label_style}>{hi:.6g}</text>'
    )
    parts.append(
        f'<text x="{lx + LEGEND_W + 4}" y="{MARGIN + lh}" {label_style}>{lo:.6g}</text>'
    )
    if degenerate:
        parts.append(
            f'<text x="{MARGIN}" y="{height - 2}" {label_style}>'
            "constant off-diagonal (degenerate scale)</text>"
        )
    parts.append("</svg>")
    svg = "\n".join(parts) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(svg)
    return svg
