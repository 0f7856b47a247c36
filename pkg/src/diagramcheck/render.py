"""Supersampled rasterizer for ground-truth diagram synthesis.

Shapes are drawn by evaluating an analytic membership predicate on a 4x
subpixel grid and box-averaging the coverage, so pixel-count oracles stay
stable. Nothing here shares code with the detection stack.
"""

from __future__ import annotations

import numpy as np

from .image import RasterImage

INK = (0, 0, 0)
DARK = (60, 60, 60)
PALE = (230, 230, 230)
RED = (220, 30, 30)
BLUE = (40, 60, 200)

SUPERSAMPLE = 4


class Canvas:
    """White RGB canvas; all draw calls composite by analytic coverage."""

    def __init__(self, width: int, height: int, background: int = 255):
        self.width = width
        self.height = height
        self.rgb = np.full((height, width, 3), float(background))

    # --- internals ---
    # Convention: integer coordinates are pixel centers (matching OpenCV), so
    # pixel (i, j) covers the square [i-0.5, i+0.5] x [j-0.5, j+0.5].

    def _subgrid(self, x0: int, y0: int, x1: int, y1: int):
        s = SUPERSAMPLE
        xs = x0 - 0.5 + (np.arange((x1 - x0) * s) + 0.5) / s
        ys = y0 - 0.5 + (np.arange((y1 - y0) * s) + 0.5) / s
        return np.meshgrid(xs, ys)

    def _composite(self, x0: int, y0: int, inside: np.ndarray, color) -> None:
        s = SUPERSAMPLE
        h, w = inside.shape[0] // s, inside.shape[1] // s
        alpha = inside.astype(np.float64).reshape(h, s, w, s).mean(axis=(1, 3))
        patch = self.rgb[y0:y0 + h, x0:x0 + w]
        col = np.asarray(color, dtype=np.float64)
        patch[:] = patch * (1.0 - alpha[..., None]) + col * alpha[..., None]

    def _draw(self, bbox, predicate, color) -> None:
        x0 = max(0, int(np.floor(bbox[0] - 0.5)))
        y0 = max(0, int(np.floor(bbox[1] - 0.5)))
        x1 = min(self.width, int(np.ceil(bbox[2] + 0.5)) + 1)
        y1 = min(self.height, int(np.ceil(bbox[3] + 0.5)) + 1)
        if x0 >= x1 or y0 >= y1:
            return
        px, py = self._subgrid(x0, y0, x1, y1)
        self._composite(x0, y0, predicate(px, py), color)

    # --- shapes ---

    def fill_disk(self, center, radius: float, color=INK) -> None:
        cx, cy = center
        self._draw((cx - radius, cy - radius, cx + radius, cy + radius),
                   lambda px, py: (px - cx) ** 2 + (py - cy) ** 2 <= radius ** 2,
                   color)

    def stroke_circle(self, center, radius: float, width: float, color=INK) -> None:
        cx, cy = center
        half = width / 2.0
        r_out = radius + half

        def ring(px, py):
            d = np.hypot(px - cx, py - cy)
            return np.abs(d - radius) <= half

        self._draw((cx - r_out, cy - r_out, cx + r_out, cy + r_out), ring, color)

    def stroke_segment(self, p0, p1, width: float, color=INK) -> None:
        x0, y0 = p0
        x1, y1 = p1
        half = width / 2.0
        dx, dy = x1 - x0, y1 - y0
        sq = dx * dx + dy * dy

        def capsule(px, py):
            if sq == 0:
                return (px - x0) ** 2 + (py - y0) ** 2 <= half ** 2
            t = np.clip(((px - x0) * dx + (py - y0) * dy) / sq, 0.0, 1.0)
            return (px - (x0 + t * dx)) ** 2 + (py - (y0 + t * dy)) ** 2 <= half ** 2

        bbox = (min(x0, x1) - half, min(y0, y1) - half,
                max(x0, x1) + half, max(y0, y1) + half)
        self._draw(bbox, capsule, color)

    def fill_rect(self, x0: float, y0: float, x1: float, y1: float, color=INK) -> None:
        self._draw((x0, y0, x1, y1),
                   lambda px, py: (px >= x0) & (px < x1) & (py >= y0) & (py < y1),
                   color)

    def fill_polygon(self, vertices, color=INK) -> None:
        verts = [(float(x), float(y)) for x, y in vertices]
        xs = [v[0] for v in verts]
        ys = [v[1] for v in verts]

        def inside(px, py):
            hit = np.zeros(px.shape, dtype=bool)
            n = len(verts)
            for i in range(n):
                ax, ay = verts[i]
                bx, by = verts[(i + 1) % n]
                crosses = (ay > py) != (by > py)
                if not crosses.any():
                    continue
                with np.errstate(divide="ignore", invalid="ignore"):
                    x_at = ax + (py - ay) * (bx - ax) / (by - ay)
                hit ^= crosses & (px < x_at)
            return hit

        self._draw((min(xs), min(ys), max(xs), max(ys)), inside, color)

    def stroke_polygon(self, vertices, width: float, color=INK) -> None:
        pts = list(vertices)
        for i in range(len(pts)):
            self.stroke_segment(pts[i], pts[(i + 1) % len(pts)], width, color)

    def fill_pixels(self, mask: np.ndarray, color=INK) -> None:
        """Crisp per-pixel fill (no anti-aliasing) for exact-count regions."""
        col = np.asarray(color, dtype=np.float64)
        self.rgb[mask] = col

    # --- output ---

    def to_image(self) -> RasterImage:
        data = np.rint(np.clip(self.rgb, 0.0, 255.0)).astype(np.uint8)
        return RasterImage.from_array(data)


def direction_vector(degrees: float) -> tuple[float, float]:
    """Unit vector for a direction in the shared angle convention.

    Degrees are counterclockwise from +x with image y pointing down, so the
    y component is negated.
    """
    rad = np.deg2rad(degrees)
    return float(np.cos(rad)), float(-np.sin(rad))
