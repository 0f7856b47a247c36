"""Connected components and crack-boundary contour tracing.

Contours follow pixel edges (the corner lattice) instead of pixel centers:
the shoelace area of the traced polygon then equals the enclosed pixel count
exactly, which keeps area checks honest for small shapes. Foreground is
8-connected; the saddle rule at diagonal contacts keeps diagonal strokes in
one boundary.
"""

from __future__ import annotations

import cv2
import numpy as np

# direction codes: 0 = right, 1 = down, 2 = left, 3 = up
_STEP = ((1, 0), (0, 1), (-1, 0), (0, -1))
# pixel offsets (dx, dy) of the front-left / front-right pixel at a corner,
# indexed by travel direction
_FRONT_LEFT = ((0, -1), (0, 0), (-1, 0), (-1, -1))
_FRONT_RIGHT = ((0, 0), (-1, 0), (-1, -1), (0, -1))


def trace_boundary(comp: np.ndarray, start_x: int, start_y: int) -> list[tuple[int, int]]:
    """Trace the outer crack boundary of one component.

    ``comp`` is a bool array padded with one background ring; ``start_x/y``
    index the topmost-then-leftmost foreground pixel in unpadded coordinates.
    Returns polygon vertices (corner coordinates, collinear runs merged).
    """
    cx, cy = start_x, start_y
    d = 0  # topmost-leftmost pixel: boundary leaves its top-left corner rightward
    verts = [(cx, cy)]
    while True:
        cx += _STEP[d][0]
        cy += _STEP[d][1]
        if cx == start_x and cy == start_y:
            break
        flx, fly = _FRONT_LEFT[d]
        if comp[cy + fly + 1, cx + flx + 1]:
            nd = (d - 1) % 4
        else:
            frx, fry = _FRONT_RIGHT[d]
            nd = d if comp[cy + fry + 1, cx + frx + 1] else (d + 1) % 4
        if nd != d:
            verts.append((cx, cy))
            d = nd
    return verts


def labeled_components(mask_bits: np.ndarray):
    """8-connected labeling; returns (labels array, per-label stats rows).

    Stats rows follow cv2.connectedComponentsWithStats layout:
    (left, top, width, height, area), label 0 being background.
    """
    n, labels, stats, _ = cv2.connectedComponentsWithStats(
        mask_bits.astype(np.uint8), connectivity=8)
    return labels, stats[:n]


def component_boundary(labels: np.ndarray, stats_row, label: int) -> list[tuple[float, float]]:
    """Outer boundary polygon of one labeled component.

    Vertices are shifted by -0.5 so they live in pixel-center coordinates
    (integer coordinate = pixel center): the corner lattice of pixel (i, j)
    is at i +/- 0.5, j +/- 0.5.
    """
    left, top, width, height = (int(stats_row[0]), int(stats_row[1]),
                                int(stats_row[2]), int(stats_row[3]))
    local = np.zeros((height + 2, width + 2), dtype=bool)
    local[1:-1, 1:-1] = labels[top:top + height, left:left + width] == label
    inner = local[1:-1, 1:-1]
    top_row = int(np.argmax(inner.any(axis=1)))
    start_x = int(np.argmax(inner[top_row]))
    verts = trace_boundary(local, start_x, top_row)
    return [(x + left - 0.5, y + top - 0.5) for x, y in verts]
