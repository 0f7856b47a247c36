"""Geometric primitives recovered from pixels."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class LineSegment:
    """Detected straight segment with sub-pixel endpoints.

    ``angle`` is the segment direction folded into [0, 180) degrees, measured
    counterclockwise from +x with y pointing down the image.
    """

    p0: tuple[float, float]
    p1: tuple[float, float]

    @property
    def length(self) -> float:
        return math.hypot(self.p1[0] - self.p0[0], self.p1[1] - self.p0[1])

    @property
    def angle(self) -> float:
        dx = self.p1[0] - self.p0[0]
        dy = self.p1[1] - self.p0[1]
        # y grows downward in pixel coords; negate so angles read counterclockwise
        a = math.degrees(math.atan2(-dy, dx)) % 180.0
        return a


@dataclass(frozen=True, slots=True)
class CircleShape:
    """Detected circle in pixel coordinates."""

    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("circle radius must be positive")


@dataclass(frozen=True, slots=True)
class RadialPeak:
    """One ray direction found in a radial foreground profile.

    ``strength`` is the smoothed per-degree foreground count and
    ``run_length_ratio`` the fraction of the probe radius that count covers.
    """

    direction: float
    strength: float
    run_length_ratio: float


@dataclass(frozen=True, slots=True)
class ContourPoly:
    """Boundary polygon of one connected foreground component.

    Vertices live on the pixel-corner lattice, so the shoelace area equals the
    enclosed pixel count exactly.
    """

    vertices: tuple[tuple[float, float], ...]
    area: float
    is_closed: bool = True

    def __post_init__(self):
        if self.is_closed and len(self.vertices) < 3:
            raise ValueError("closed contour needs at least 3 vertices")

    @property
    def perimeter(self) -> float:
        verts = self.vertices
        n = len(verts)
        total = 0.0
        for i in range(n):
            x0, y0 = verts[i]
            x1, y1 = verts[(i + 1) % n]
            total += math.hypot(x1 - x0, y1 - y0)
        return total


def shoelace_area(vertices) -> float:
    """Signed-magnitude polygon area by the shoelace formula."""
    n = len(vertices)
    acc = 0.0
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return abs(acc) / 2.0


@dataclass(frozen=True, slots=True)
class DetectedDot:
    """Small filled circular marker; only dots above the fill gate survive."""

    center: tuple[float, float]
    radius: float
    fill_ratio: float


@dataclass(frozen=True, slots=True)
class HoughCircleParams:
    """Gradient Hough circle-detector knobs."""

    dp: float = 1.2
    min_dist: float = 100.0
    param1: float = 50.0
    param2: float = 30.0
    min_radius: int = 80

    def __post_init__(self):
        if min(self.dp, self.min_dist, self.param1, self.param2, self.min_radius) <= 0:
            raise ValueError("all Hough circle parameters must be positive")
