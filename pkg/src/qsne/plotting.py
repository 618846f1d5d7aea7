"""Deterministic SVG scatter plots of 2-D embeddings."""

import numpy as np

from ._validation import check_matrix

# Ten-color qualitative palette; classes cycle through it by id.
PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")
DEFAULT_COLOR = "#1f77b4"


def scatter_svg(points, labels=None, size=600, margin=0.05, radius=2.5):
    """Render a 2-D point cloud as an SVG string.

    Axes are autoscaled to the data bounds plus a relative ``margin``.  The
    output is a pure function of the inputs, so identical inputs give
    byte-identical SVG.
    """
    Y = check_matrix(points, name="points")
    if Y.shape[1] != 2:
        raise ValueError(f"scatter plots need 2-D points, got {Y.shape[1]} dimensions")
    lo = Y.min(axis=0)
    hi = Y.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    lo = lo - margin * span
    span = span * (1.0 + 2.0 * margin)

    def px(v, axis, flip=False):
        frac = (v - lo[axis]) / span[axis]
        if flip:
            frac = 1.0 - frac
        return format(frac * size, ".2f")

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white" '
        'stroke="#333333" stroke-width="1"/>',
    ]
    for i in range(Y.shape[0]):
        color = DEFAULT_COLOR if labels is None else PALETTE[int(labels[i]) % len(PALETTE)]
        parts.append(
            f'<circle cx="{px(Y[i, 0], 0)}" cy="{px(Y[i, 1], 1, flip=True)}" '
            f'r="{radius}" fill="{color}" fill-opacity="0.8"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
