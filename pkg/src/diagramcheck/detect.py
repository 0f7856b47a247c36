"""Structural detection: contours, Hough primitives, radial peaks, dot markers."""

from __future__ import annotations

import math

import cv2
import numpy as np
from scipy import ndimage

from .config import DotDetectorParams
from .errors import VertexOutOfBounds
from .image import BinaryMask, RasterImage
from .primitives import (CircleShape, ContourPoly, DetectedDot,
                         HoughCircleParams, LineSegment, RadialPeak,
                         shoelace_area)
from .trace import component_boundary, labeled_components


def find_components(mask: BinaryMask, min_area: float):
    """Contour + pixel mask per 8-connected component, largest first.

    Returns a list of (ContourPoly, component mask) pairs. The contour area is
    the enclosed pixel count (holes included); filtering uses that area.
    """
    labels, stats = labeled_components(mask.bits)
    out = []
    for label in range(1, stats.shape[0]):
        verts = component_boundary(labels, stats[label], label)
        area = shoelace_area(verts)
        if area < min_area:
            continue
        poly = ContourPoly(tuple((float(x), float(y)) for x, y in verts), area)
        out.append((poly, label))
    out.sort(key=lambda item: (-item[0].area, item[0].vertices[0][1],
                               item[0].vertices[0][0]))
    return [(poly, labels == label) for poly, label in out]


def find_contours(mask: BinaryMask, min_area: float) -> list[ContourPoly]:
    """Outer boundary polygons of foreground components, descending by area."""
    return [poly for poly, _ in find_components(mask, min_area)]


def fill_holes(bits: np.ndarray) -> np.ndarray:
    return ndimage.binary_fill_holes(bits)


def hough_lines(mask: BinaryMask, vote_threshold: int, min_len: float,
                max_gap: float, seed: int = 42) -> list[LineSegment]:
    """Probabilistic Hough segments at 1 degree / 1 px resolution.

    The sampling RNG is reseeded on every call so identical masks always give
    identical segment lists, regardless of thread or call history.
    """
    if vote_threshold < 1:
        raise ValueError("vote_threshold must be >= 1")
    cv2.setRNGSeed(seed)
    raw = cv2.HoughLinesP(mask.as_u8(), 1, np.pi / 180.0, int(vote_threshold),
                          minLineLength=float(min_len), maxLineGap=float(max_gap))
    if raw is None:
        return []
    segments = []
    for x0, y0, x1, y1 in np.asarray(raw).reshape(-1, 4):
        seg = LineSegment((float(x0), float(y0)), (float(x1), float(y1)))
        if seg.length >= min_len - 1e-9:
            segments.append(seg)
    segments.sort(key=lambda s: (-s.length, s.p0[1], s.p0[0], s.p1[1], s.p1[0]))
    return segments


def hough_circles(mask: BinaryMask, params: HoughCircleParams) -> list[CircleShape]:
    """Gradient-vote circle detection, strongest vote first."""
    raw = cv2.HoughCircles(mask.as_u8(), cv2.HOUGH_GRADIENT, params.dp,
                           params.min_dist, param1=params.param1,
                           param2=params.param2, minRadius=int(params.min_radius),
                           maxRadius=0)
    if raw is None:
        return []
    out = []
    for cx, cy, r in raw[0]:
        if r >= params.min_radius:
            out.append(CircleShape((float(cx), float(cy)), float(r)))
    return out


def radial_profile(mask: BinaryMask, vertex: tuple[float, float],
                   probe_radius: int) -> np.ndarray:
    """Smoothed per-degree foreground counts along rays from ``vertex``.

    Rays are sampled at unit steps out to ``probe_radius``; the raw counts get
    a circular 5-tap moving average (narrower than the peak-separation rule,
    so it cannot merge distinct rays).
    """
    vx, vy = vertex
    if not (0 <= vx < mask.width and 0 <= vy < mask.height):
        raise VertexOutOfBounds(f"vertex {vertex} outside {mask.width}x{mask.height}")
    if probe_radius < 8:
        raise ValueError("probe_radius must be >= 8")

    degs = np.deg2rad(np.arange(360.0))
    radii = np.arange(1, probe_radius + 1, dtype=np.float64)
    xs = vx + np.outer(np.cos(degs), radii)
    ys = vy - np.outer(np.sin(degs), radii)
    xi = np.rint(xs).astype(np.int64)
    yi = np.rint(ys).astype(np.int64)
    valid = (xi >= 0) & (xi < mask.width) & (yi >= 0) & (yi < mask.height)
    hits = np.zeros(xi.shape, dtype=np.float64)
    hits[valid] = mask.bits[yi[valid], xi[valid]]
    counts = hits.sum(axis=1)

    smoothed = sum(np.roll(counts, k) for k in (-2, -1, 0, 1, 2)) / 5.0
    return smoothed


def _circular_distance(a: float, b: float) -> float:
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


def _refine_peak(response: np.ndarray, idx: int) -> float:
    """Quadratic sub-degree interpolation around a single-degree maximum."""
    prev = response[(idx - 1) % 360]
    mid = response[idx]
    nxt = response[(idx + 1) % 360]
    denom = prev - 2.0 * mid + nxt
    if denom >= -1e-12:
        return float(idx)
    delta = 0.5 * (prev - nxt) / denom
    return (idx + float(np.clip(delta, -0.5, 0.5))) % 360.0


def detect_radial_peaks(response: np.ndarray, probe_radius: int, *,
                        min_len_ratio: float = 0.10,
                        min_sep_deg: float = 10.0) -> list[RadialPeak]:
    """Accepted ray directions from a smoothed radial response.

    A direction qualifies when it is a circular local maximum, its strength
    clears max(8, 10% of the global maximum), and it covers at least
    ``min_len_ratio`` of the probe radius. Of any pair closer than
    ``min_sep_deg`` the weaker peak is dropped.
    """
    response = np.asarray(response, dtype=np.float64)
    if response.shape != (360,):
        raise ValueError("response must have 360 entries")
    tau = max(8.0, 0.10 * float(response.max(initial=0.0)))
    left = np.roll(response, 1)
    right = np.roll(response, -1)
    is_max = (response >= left) & (response >= right)
    ok = is_max & (response >= tau) & (response / probe_radius >= min_len_ratio)
    idx = np.nonzero(ok)[0]
    if idx.size == 0:
        return []

    # merge adjacent plateau degrees into single candidates
    clusters: list[list[int]] = [[int(idx[0])]]
    for i in idx[1:]:
        if i - clusters[-1][-1] <= 1:
            clusters[-1].append(int(i))
        else:
            clusters.append([int(i)])
    if len(clusters) > 1 and clusters[0][0] == 0 and clusters[-1][-1] == 359:
        head = clusters.pop(0)
        clusters[-1].extend(d + 360 for d in head)

    candidates = []
    for cluster in clusters:
        direction = (sum(cluster) / len(cluster)) % 360.0
        strength = float(max(response[d % 360] for d in cluster))
        if len(cluster) == 1:
            direction = _refine_peak(response, cluster[0] % 360)
        candidates.append(RadialPeak(direction, strength,
                                     min(1.0, strength / probe_radius)))

    candidates.sort(key=lambda p: (-p.strength, p.direction))
    kept: list[RadialPeak] = []
    for peak in candidates:
        if all(_circular_distance(peak.direction, k.direction) >= min_sep_deg
               for k in kept):
            kept.append(peak)
    kept.sort(key=lambda p: p.direction)
    return kept


def detect_filled_dots(gray: RasterImage, *,
                       params: DotDetectorParams | None = None,
                       fg_thresh: int = 200) -> list[DetectedDot]:
    """Small filled circular markers (points) on a light background.

    Hough candidates inside the size-relative radius band are kept only when
    their interior is at least 68% dark and they sit far enough from any
    stronger accepted marker.
    """
    if gray.channels != "gray":
        raise ValueError("detect_filled_dots needs a grayscale image")
    p = params or DotDetectorParams()
    h, w = gray.height, gray.width
    m = min(h, w)
    lo, hi = p.radius_frac[0] * m, p.radius_frac[1] * m
    spacing = p.spacing_frac * m

    raw = cv2.HoughCircles(gray.data, cv2.HOUGH_GRADIENT, p.dp, spacing,
                           param1=p.param1, param2=p.param2,
                           minRadius=max(1, int(math.floor(lo))),
                           maxRadius=int(math.ceil(hi)))
    if raw is None:
        return []
    dark = gray.data < fg_thresh

    accepted: list[DetectedDot] = []
    for cx, cy, r in raw[0]:
        if not (lo - 0.5 <= r <= hi + 0.5):
            continue
        ratio = _fill_ratio(dark, float(cx), float(cy), float(r))
        if ratio < p.fill_ratio:
            continue
        if any(math.hypot(cx - d.center[0], cy - d.center[1]) < spacing
               for d in accepted):
            continue
        accepted.append(DetectedDot((float(cx), float(cy)), float(r), ratio))
    return accepted


def _fill_ratio(dark: np.ndarray, cx: float, cy: float, r: float) -> float:
    """Fraction of dark pixels inside the marker interior (0.9 of the radius)."""
    rr = max(1.0, 0.9 * r)
    x0, x1 = int(math.floor(cx - rr)), int(math.ceil(cx + rr)) + 1
    y0, y1 = int(math.floor(cy - rr)), int(math.ceil(cy + rr)) + 1
    x0, y0 = max(0, x0), max(0, y0)
    x1, y1 = min(dark.shape[1], x1), min(dark.shape[0], y1)
    if x0 >= x1 or y0 >= y1:
        return 0.0
    ys, xs = np.mgrid[y0:y1, x0:x1]
    inside = (xs - cx) ** 2 + (ys - cy) ** 2 <= rr ** 2
    total = int(np.count_nonzero(inside))
    if total == 0:
        return 0.0
    return float(np.count_nonzero(dark[y0:y1, x0:x1] & inside)) / total
