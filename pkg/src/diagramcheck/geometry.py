"""Pure geometric predicates and region analysis over primitives."""

from __future__ import annotations

import math
from dataclasses import dataclass

import cv2
import numpy as np

from .errors import (BadTopology, CollinearOverlap, DegeneratePolygon,
                     DegenerateSegment, EmptyWhole, TooFewRays)
from .image import BinaryMask
from .primitives import CircleShape, ContourPoly, LineSegment, RadialPeak


@dataclass(frozen=True, slots=True)
class AngleMeasure:
    """Sector angle in (0, 360) degrees."""

    degrees: float

    def __post_init__(self):
        if not (0.0 < self.degrees < 360.0) or math.isnan(self.degrees):
            raise ValueError(f"sector angle {self.degrees} outside (0, 360)")


def sector_angles(peaks: list[RadialPeak]) -> list[AngleMeasure]:
    """Consecutive circular gaps between sorted ray directions; sums to 360."""
    if len(peaks) < 2:
        raise TooFewRays("need at least two rays to form sectors")
    dirs = sorted(p.direction % 360.0 for p in peaks)
    out = []
    for i, d in enumerate(dirs):
        nxt = dirs[(i + 1) % len(dirs)]
        gap = (nxt - d) % 360.0
        if gap <= 0.0:
            raise ValueError("duplicate ray directions")
        # nearly-coincident rays: the complement gap may round up to 360.0
        out.append(AngleMeasure(min(gap, math.nextafter(360.0, 0.0))))
    return out


def is_opposite_pair(a: float, b: float, tol: float) -> bool:
    """True when two directions point within ``tol`` degrees of opposite."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    return abs(abs(a - b) % 360.0 - 180.0) <= tol


def segment_intersection(s1: LineSegment, s2: LineSegment) -> tuple[float, float] | None:
    """Crossing point of two segments, or None when they do not meet.

    Collinear overlapping segments raise CollinearOverlap (there is no single
    crossing point to report); touching at a single point counts as a
    crossing.
    """
    p = s1.p0
    r = (s1.p1[0] - s1.p0[0], s1.p1[1] - s1.p0[1])
    q = s2.p0
    s = (s2.p1[0] - s2.p0[0], s2.p1[1] - s2.p0[1])
    if r == (0.0, 0.0) or s == (0.0, 0.0):
        raise DegenerateSegment("zero-length segment")

    rxs = r[0] * s[1] - r[1] * s[0]
    qp = (q[0] - p[0], q[1] - p[1])
    qpxr = qp[0] * r[1] - qp[1] * r[0]

    scale = max(abs(r[0]), abs(r[1]), abs(s[0]), abs(s[1]))
    eps = 1e-12 * scale * scale
    if abs(rxs) <= eps:
        if abs(qpxr) > eps:
            return None  # parallel, offset lines
        # collinear: overlapping is an error, disjoint is None
        rr = r[0] * r[0] + r[1] * r[1]
        t0 = (qp[0] * r[0] + qp[1] * r[1]) / rr
        t1 = t0 + (s[0] * r[0] + s[1] * r[1]) / rr
        lo, hi = min(t0, t1), max(t0, t1)
        if hi < 0.0 or lo > 1.0:
            return None
        if math.isclose(hi, 0.0, abs_tol=1e-9) or math.isclose(lo, 1.0, abs_tol=1e-9):
            # endpoint contact only
            t = 0.0 if math.isclose(hi, 0.0, abs_tol=1e-9) else 1.0
            return (p[0] + t * r[0], p[1] + t * r[1])
        raise CollinearOverlap("segments overlap along a shared line")

    t = (qp[0] * s[1] - qp[1] * s[0]) / rxs
    u = qpxr / rxs
    if -1e-12 <= t <= 1.0 + 1e-12 and -1e-12 <= u <= 1.0 + 1e-12:
        return (p[0] + t * r[0], p[1] + t * r[1])
    return None


def line_intersection_near_segments(s1: LineSegment, s2: LineSegment,
                                    slack: float) -> tuple[float, float] | None:
    """Intersection of the carrier lines, accepted when it lies within
    ``slack`` pixels of both segments. Thick-stroke junctions rarely produce
    exact segment crossings, so this is the junction test."""
    p, r = s1.p0, (s1.p1[0] - s1.p0[0], s1.p1[1] - s1.p0[1])
    q, s = s2.p0, (s2.p1[0] - s2.p0[0], s2.p1[1] - s2.p0[1])
    rxs = r[0] * s[1] - r[1] * s[0]
    if abs(rxs) < 1e-9:
        return None
    qp = (q[0] - p[0], q[1] - p[1])
    t = (qp[0] * s[1] - qp[1] * s[0]) / rxs
    u = (qp[0] * r[1] - qp[1] * r[0]) / rxs
    len1, len2 = s1.length, s2.length
    if (-slack / len1 <= t <= 1.0 + slack / len1
            and -slack / len2 <= u <= 1.0 + slack / len2):
        return (p[0] + t * r[0], p[1] + t * r[1])
    return None


def merge_points(points: list[tuple[float, float]], radius: float) -> list[tuple[float, float]]:
    """Greedy clustering of nearby points into single representatives."""
    merged: list[list[float]] = []
    counts: list[int] = []
    for x, y in points:
        for i, (mx, my) in enumerate(merged):
            if math.hypot(x - mx, y - my) <= radius:
                n = counts[i]
                merged[i] = [(mx * n + x) / (n + 1), (my * n + y) / (n + 1)]
                counts[i] += 1
                break
        else:
            merged.append([x, y])
            counts.append(1)
    return [(x, y) for x, y in merged]


# --- overlap-region layouts ---

_TWO_CIRCLE_LABELS = ("A_only", "B_only", "A∩B", "outside")
_THREE_CIRCLE_LABELS = ("A_only", "B_only", "C_only", "A∩B", "A∩C", "B∩C",
                        "A∩B∩C", "outside")


@dataclass(frozen=True)
class VennLayout:
    """Rasterized set-diagram regions; masks are pairwise disjoint and tile
    the full canvas together with "outside"."""

    circles: tuple[CircleShape, ...]
    region_masks: dict[str, BinaryMask]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.region_masks.keys())


def canonical_region_label(raw: str) -> str:
    """Normalize ASCII spellings like ``A&B`` or ``AnB`` to canonical labels."""
    cleaned = raw.strip().replace("&", "∩").replace("^", "∩")
    if cleaned in _TWO_CIRCLE_LABELS or cleaned in _THREE_CIRCLE_LABELS:
        return cleaned
    compact = cleaned.replace(" ", "")
    for labels in (_THREE_CIRCLE_LABELS, _TWO_CIRCLE_LABELS):
        for label in labels:
            if compact == label or compact == label.replace("∩", "n"):
                return label
    raise ValueError(f"unknown region label {raw!r}")


def venn_layout(circles: list[CircleShape], img_dims: tuple[int, int]) -> VennLayout:
    """Per-pixel membership layout for 2 or 3 mutually overlapping circles.

    Circles are ordered A, B, C by ascending center x (ties by y). Disjoint
    or nested pairs mean the drawing is not an overlap diagram: BadTopology.
    """
    if len(circles) not in (2, 3):
        raise ValueError("layout needs exactly 2 or 3 circles")
    width, height = img_dims
    ordered = sorted(circles, key=lambda c: (c.center[0], c.center[1]))
    for i in range(len(ordered)):
        for j in range(i + 1, len(ordered)):
            ci, cj = ordered[i], ordered[j]
            d = math.hypot(ci.center[0] - cj.center[0], ci.center[1] - cj.center[1])
            if d >= ci.radius + cj.radius:
                raise BadTopology(f"circles {i} and {j} are disjoint")
            if d <= abs(ci.radius - cj.radius):
                raise BadTopology(f"circle {i} and {j} are nested")

    ys, xs = np.mgrid[0:height, 0:width]
    member = []
    for c in ordered:
        member.append((xs - c.center[0]) ** 2 + (ys - c.center[1]) ** 2
                      <= c.radius ** 2)

    masks: dict[str, np.ndarray] = {}
    if len(ordered) == 2:
        a, b = member
        masks["A_only"] = a & ~b
        masks["B_only"] = b & ~a
        masks["A∩B"] = a & b
        masks["outside"] = ~(a | b)
    else:
        a, b, c = member
        masks["A_only"] = a & ~b & ~c
        masks["B_only"] = b & ~a & ~c
        masks["C_only"] = c & ~a & ~b
        masks["A∩B"] = a & b & ~c
        masks["A∩C"] = a & c & ~b
        masks["B∩C"] = b & c & ~a
        masks["A∩B∩C"] = a & b & c
        masks["outside"] = ~(a | b | c)

    return VennLayout(tuple(ordered),
                      {k: BinaryMask.from_array(v) for k, v in masks.items()})


@dataclass(frozen=True, slots=True)
class OccupancyReading:
    """Fraction of one region covered by the target color mask."""

    region: str
    fraction: float
    empty_region: bool = False


def region_occupancy(layout: VennLayout, color_mask: BinaryMask) -> list[OccupancyReading]:
    """Per-region coverage fractions; degenerate zero-pixel regions read 0."""
    readings = []
    for label, region in layout.region_masks.items():
        if region.bits.shape != color_mask.bits.shape:
            raise ValueError("color mask dimensions do not match layout")
        total = region.count()
        if total == 0:
            readings.append(OccupancyReading(label, 0.0, empty_region=True))
            continue
        hit = int(np.count_nonzero(region.bits & color_mask.bits))
        readings.append(OccupancyReading(label, hit / total))
    return readings


def area_ratio(part: BinaryMask, whole: BinaryMask) -> float:
    """|part ∩ whole| / |whole|; the part need not be contained in the whole."""
    denom = whole.count()
    if denom == 0:
        raise EmptyWhole("whole mask contains no pixels")
    inter = int(np.count_nonzero(part.bits & whole.bits))
    return inter / denom


# --- shape descriptors ---

def simplify_polygon(vertices, epsilon: float) -> list[tuple[float, float]]:
    """Closed-polygon Douglas-Peucker via cv2."""
    pts = np.asarray(vertices, dtype=np.float32).reshape(-1, 1, 2)
    approx = cv2.approxPolyDP(pts, float(epsilon), True)
    return [(float(x), float(y)) for x, y in approx[:, 0, :]]


def shape_metrics(poly: ContourPoly) -> tuple[float, tuple[float, float, float, float], float]:
    """(aspect ratio, min-area bbox, circularity) of a closed polygon.

    Aspect is long/short side of the minimum-area rectangle. Circularity is
    4*pi*area/perimeter**2 with the perimeter taken on a lightly simplified
    outline, so pixel staircase does not deflate round shapes.
    """
    if not poly.is_closed or len(poly.vertices) < 3:
        raise DegeneratePolygon("need a closed polygon with >= 3 vertices")
    if poly.area <= 0:
        raise DegeneratePolygon("polygon has zero area")
    pts = np.asarray(poly.vertices, dtype=np.float32)
    (cx, cy), (w, h), _ = cv2.minAreaRect(pts.reshape(-1, 1, 2))
    short, long_ = sorted((w, h))
    if short <= 0:
        raise DegeneratePolygon("degenerate bounding rectangle")
    aspect = long_ / short

    smooth = simplify_polygon(poly.vertices, 1.5)
    perim = 0.0
    for i in range(len(smooth)):
        x0, y0 = smooth[i]
        x1, y1 = smooth[(i + 1) % len(smooth)]
        perim += math.hypot(x1 - x0, y1 - y0)
    circularity = min(1.0, 4.0 * math.pi * poly.area / (perim * perim)) if perim > 0 else 0.0

    xs = pts[:, 0]
    ys = pts[:, 1]
    bbox = (float(xs.min()), float(ys.min()), float(xs.max()), float(ys.max()))
    return aspect, bbox, circularity
