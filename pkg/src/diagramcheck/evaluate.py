"""Per-domain constraint evaluators and the conjunction aggregator.

Every criterion is evaluated independently and failures never abort: structural
problems (no vertex, no circles, no axes) turn into false results with a
diagnostic so batch runs stay total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import cv2
import numpy as np

from .config import ThresholdConfig
from .constraints import (BackgroundWhite, ConstraintSpec, CriterionResult,
                          DetectionSet, Verdict)
from .detect import (detect_filled_dots, detect_radial_peaks, fill_holes,
                     find_components, hough_circles, hough_lines,
                     radial_profile)
from .errors import (AxesNotFound, BadTopology, EmptyCriteria,
                     MissingDetections, NoVertexFound, TooFewRays)
from .geometry import (is_opposite_pair, line_intersection_near_segments,
                       merge_points, region_occupancy, sector_angles,
                       shape_metrics, simplify_polygon, venn_layout)
from .image import (BinaryMask, RasterImage, check_white_background, morph,
                    threshold_foreground, to_grayscale, to_hsv)
from .primitives import LineSegment
from .relations import curve_inliers, parse_relation, ransac_fit

_NAMED_HUES = {"blue": ((200.0, 260.0),), "green": ((90.0, 160.0),),
               "yellow": ((40.0, 70.0),)}


def aggregate(results: list[CriterionResult], problem_id: str = "") -> Verdict:
    """Conjunction of criterion outcomes; all measured values are kept."""
    if not results:
        raise EmptyCriteria("no criterion results to aggregate")
    return Verdict(problem_id, all(r.passed for r in results), tuple(results))


def evaluate(img: RasterImage, spec: ConstraintSpec, cfg: ThresholdConfig,
             det: DetectionSet | None = None) -> Verdict:
    """Check every criterion of ``spec`` against ``img`` and conjoin."""
    needs_det = any(c.kind == "count_exact" for c in spec.criteria)
    if needs_det and det is None:
        raise MissingDetections(f"{spec.problem_id}: count criteria need a "
                                "detection set")
    evaluator = {
        "counting": lambda: eval_counting_domain(img, spec.criteria, cfg, det),
        "angle": lambda: eval_angle(img, spec.criteria, cfg),
        "fraction": lambda: eval_fraction(img, spec.criteria, cfg),
        "set": lambda: eval_set(img, spec.criteria, cfg),
        "plane": lambda: eval_plane(img, spec.criteria, cfg),
        "solid": lambda: eval_solid(img, spec.criteria, cfg),
        "function": lambda: eval_function(img, spec.criteria, cfg),
    }[spec.domain]
    return aggregate(evaluator(), spec.problem_id)


# --- shared helpers ---

def _background_result(img: RasterImage, criterion) -> CriterionResult:
    gray = to_grayscale(img)
    ok = check_white_background(gray)
    return CriterionResult(criterion, ok,
                           "border band white" if ok else "border band not white")


def _fg_mask(img: RasterImage, cfg: ThresholdConfig, thresh: int) -> BinaryMask:
    return threshold_foreground(to_grayscale(img), thresh, darker_is_fg=True)


def _color_mask(img: RasterImage, color: str, cfg: ThresholdConfig) -> BinaryMask:
    if img.channels != "rgb":
        # a grayscale image holds no saturated color at all
        return BinaryMask.from_array(np.zeros((img.height, img.width), bool))
    hue, sat, val = to_hsv(img)
    name = color.lower()
    if name == "red":
        bands = cfg.red_hue_deg
        sat_min, val_min = cfg.red_sat_min, cfg.red_val_min
    elif name in _NAMED_HUES:
        bands = _NAMED_HUES[name]
        sat_min, val_min = cfg.red_sat_min, cfg.red_val_min
    else:
        raise ValueError(f"no HSV bounds defined for color {color!r}")
    in_band = np.zeros(hue.shape, dtype=bool)
    for lo, hi in bands:
        in_band |= (hue >= lo) & (hue < hi)
    return BinaryMask.from_array(in_band & (sat >= sat_min) & (val >= val_min))


def _false_all(criteria, diagnostic: str, img: RasterImage):
    """Everything fails with one diagnostic, except background checks which
    remain independently decidable."""
    out = []
    for c in criteria:
        if isinstance(c, BackgroundWhite):
            out.append(_background_result(img, c))
        else:
            out.append(CriterionResult(c, False, diagnostic))
    return out


# --- counting ---

def eval_counting(det: DetectionSet, criterion, cfg: ThresholdConfig) -> CriterionResult:
    """Exact-match instance counting over confidence-filtered detections."""
    count = sum(1 for d in det.detections
                if d.category == criterion.category
                and d.confidence >= cfg.count_conf_thresh)
    ok = abs(count - criterion.n) <= cfg.count_tolerance
    return CriterionResult(criterion, ok,
                           f"counted {count} x {criterion.category!r}, "
                           f"target {criterion.n}", measured=float(count))


def eval_counting_domain(img, criteria, cfg, det):
    results = []
    for c in criteria:
        if isinstance(c, BackgroundWhite):
            results.append(_background_result(img, c))
        else:
            results.append(eval_counting(det, c, cfg))
    return results


# --- angle ---

def _find_vertex(mask: BinaryMask, cfg: ThresholdConfig) -> tuple[float, float]:
    """Shared ray vertex: line-intersection vote, then deepest concavity,
    then the foreground centroid."""
    h, w = mask.height, mask.width
    segments = hough_lines(mask, cfg.line_vote_threshold,
                           cfg.line_min_len(h, w), cfg.line_max_gap,
                           cfg.hough_seed)
    votes: list[tuple[float, float]] = []
    for i in range(len(segments)):
        for j in range(i + 1, len(segments)):
            if _angle_gap_180(segments[i].angle, segments[j].angle) < 5.0:
                continue
            pt = line_intersection_near_segments(segments[i], segments[j], 25.0)
            if pt and 0 <= pt[0] < w and 0 <= pt[1] < h:
                votes.append(pt)
    if votes:
        centers: list[list[float]] = []
        counts: list[int] = []
        for x, y in votes:
            for i, (mx, my) in enumerate(centers):
                if math.hypot(x - mx, y - my) <= 10.0:
                    n = counts[i]
                    centers[i] = [(mx * n + x) / (n + 1), (my * n + y) / (n + 1)]
                    counts[i] += 1
                    break
            else:
                centers.append([x, y])
                counts.append(1)
        best = int(np.argmax(counts))
        return (centers[best][0], centers[best][1])

    comps = find_components(mask, min_area=25.0)
    if comps:
        poly = comps[0][0]
        pts = np.asarray(poly.vertices, dtype=np.int32).reshape(-1, 1, 2)
        hull = cv2.convexHull(pts, returnPoints=False)
        if len(hull) >= 3 and len(pts) >= 4:
            defects = cv2.convexityDefects(pts, hull)
            if defects is not None and len(defects):
                rows = np.asarray(defects).reshape(-1, 4)
                deepest = rows[np.argmax(rows[:, 3])]
                if deepest[3] / 256.0 > 4.0:
                    x, y = pts[int(deepest[2]), 0]
                    return (float(x), float(y))

    if mask.count() == 0:
        raise NoVertexFound("empty foreground")
    ys, xs = np.nonzero(mask.bits)
    return (float(xs.mean()), float(ys.mean()))


def _angle_gap_180(a: float, b: float) -> float:
    d = abs(a - b) % 180.0
    return min(d, 180.0 - d)


def eval_angle(img: RasterImage, criteria, cfg: ThresholdConfig):
    mask = _fg_mask(img, cfg, cfg.fg_gray_thresh[0])
    try:
        vertex = _find_vertex(mask, cfg)
    except NoVertexFound as exc:
        return _false_all(criteria, f"no vertex found: {exc}", img)

    probe = cfg.probe_radius(img.height, img.width)
    response = radial_profile(mask, vertex, probe)
    peaks = detect_radial_peaks(response, probe,
                                min_len_ratio=cfg.min_peak_len_ratio,
                                min_sep_deg=cfg.min_peak_sep_deg)
    directions = [p.direction for p in peaks]
    try:
        sectors = [s.degrees for s in sector_angles(peaks)]
    except (TooFewRays, ValueError):
        sectors = []

    results = []
    for c in criteria:
        if isinstance(c, BackgroundWhite):
            results.append(_background_result(img, c))
        elif c.kind == "sector_equals":
            tol = cfg.angle_tol_relaxed_deg if c.relaxed else cfg.angle_tol_deg
            best = min(sectors, key=lambda s: abs(s - c.target_deg), default=None)
            ok = best is not None and abs(best - c.target_deg) <= tol
            # a straight angle may equivalently be shown by an opposite ray pair
            if not ok and abs(c.target_deg - 180.0) <= 1e-9:
                ok = _has_opposite(directions, cfg.opposite_tol_deg)
            results.append(CriterionResult(
                c, ok, f"sectors {_fmt(sectors)} vs target {c.target_deg}",
                measured=best))
        elif c.kind == "ray_count":
            ok = len(peaks) == c.n
            results.append(CriterionResult(
                c, ok, f"found {len(peaks)} rays at {_fmt(directions)}, "
                f"target {c.n}", measured=float(len(peaks))))
        elif c.kind == "opposite_rays":
            ok = _has_opposite(directions, cfg.opposite_tol_deg)
            results.append(CriterionResult(
                c, ok, f"ray directions {_fmt(directions)}"))
    return results


def _has_opposite(directions: list[float], tol: float) -> bool:
    return any(is_opposite_pair(a, b, tol)
               for i, a in enumerate(directions) for b in directions[i + 1:])


def _fmt(values) -> str:
    return "[" + ", ".join(f"{v:.1f}" for v in values) + "]"


# --- fraction ---

def eval_fraction(img: RasterImage, criteria, cfg: ThresholdConfig):
    gray = to_grayscale(img)
    structural = threshold_foreground(gray, cfg.fg_gray_thresh[1], True)
    closed = morph(structural, "close", cfg.morph_kernels[1])
    comps = find_components(closed, min_area=cfg.min_contour_area[0])
    if not comps:
        return _false_all(criteria, "no shape found", img)
    poly, comp_mask = comps[0]
    whole = BinaryMask.from_array(fill_holes(comp_mask))

    results = []
    for c in criteria:
        if isinstance(c, BackgroundWhite):
            results.append(_background_result(img, c))
        elif c.kind == "fraction_shaded":
            if c.color is not None:
                part = _color_mask(img, c.color, cfg)
            else:
                part = threshold_foreground(gray, cfg.fg_gray_thresh[0], True)
            inter = int(np.count_nonzero(part.bits & whole.bits))
            ratio = inter / whole.count()
            ok = abs(ratio - c.target) <= c.tol
            note = ""
            if ok and cfg.purity_check and c.color is not None and inter:
                # optional gate: the colored area must be one flat color
                _, sat, _ = to_hsv(img)
                spread = float(sat[part.bits & whole.bits].std())
                if spread > cfg.purity_sat_std_max:
                    ok = False
                    note = f"; impure fill (sat std {spread:.3f})"
            results.append(CriterionResult(
                c, ok, f"shaded ratio {ratio:.4f} vs target {c.target:.4f} "
                f"± {c.tol}{note}", measured=ratio))
        elif c.kind == "aspect_ratio":
            aspect, _, _ = shape_metrics(poly)
            ok = abs(aspect - c.target) <= c.tol
            results.append(CriterionResult(
                c, ok, f"aspect {aspect:.3f} vs target {c.target} ± {c.tol}",
                measured=aspect))
        elif c.kind == "radius_ratio":
            results.append(_radius_ratio_result(structural, c, cfg))
        elif c.kind in ("shape_is_circle", "shape_is_rectangle"):
            results.append(_shape_class_result(poly, c, cfg))
    return results


def _plausible_circles(mask: BinaryMask, circles, cfg: ThresholdConfig):
    """Keep candidates that fit the canvas and whose rim is mostly inked.

    Hough voting on arc arrangements produces phantom circles assembled from
    pieces of several real arcs; those fail the rim-coverage test.
    """
    width, height = mask.width, mask.height
    margin = cfg.circle_border_margin_frac * min(width, height) - 4.0
    reach = cv2.dilate(mask.as_u8(), np.ones((7, 7), np.uint8)) > 0
    degs = np.deg2rad(np.arange(0.0, 360.0, 2.0))
    out = []
    for c in circles:
        cx, cy = c.center
        if not (cx - c.radius >= margin and cy - c.radius >= margin
                and cx + c.radius <= width - 1 - margin
                and cy + c.radius <= height - 1 - margin):
            continue
        xs = np.clip(np.rint(cx + c.radius * np.cos(degs)), 0, width - 1).astype(int)
        ys = np.clip(np.rint(cy + c.radius * np.sin(degs)), 0, height - 1).astype(int)
        coverage = float(reach[ys, xs].mean())
        if coverage >= cfg.circle_coverage_min:
            out.append(c)
    return out


def _radius_ratio_result(mask: BinaryMask, criterion, cfg: ThresholdConfig):
    circles = _plausible_circles(mask, hough_circles(mask, cfg.venn_circle), cfg)
    if len(circles) < 2:
        return CriterionResult(criterion, False,
                               f"found {len(circles)} circles, need 2")
    radii = sorted(c.radius for c in circles[:2])
    ratio = radii[1] / radii[0]
    target = max(criterion.target, 1.0 / criterion.target)
    ok = abs(ratio - target) <= criterion.tol
    return CriterionResult(criterion, ok,
                           f"radius ratio {ratio:.3f} vs target {target}",
                           measured=ratio)


def _shape_class_result(poly, criterion, cfg: ThresholdConfig):
    aspect, _, circularity = shape_metrics(poly)
    pts = np.asarray(poly.vertices, dtype=np.float32).reshape(-1, 1, 2)
    (_, _), (w, h), _ = cv2.minAreaRect(pts)
    extent = poly.area / (w * h) if w > 0 and h > 0 else 0.0
    if criterion.kind == "shape_is_circle":
        ok = circularity >= cfg.circle_circularity_min
    else:
        ok = circularity < cfg.circle_circularity_min and extent >= cfg.rect_extent_min
    return CriterionResult(criterion, ok,
                           f"circularity {circularity:.3f}, extent {extent:.3f}",
                           measured=circularity)


# --- set ---

def eval_set(img: RasterImage, criteria, cfg: ThresholdConfig):
    fg = _fg_mask(img, cfg, cfg.fg_gray_thresh[0])
    # circle strokes are dark achromatic ink; region fills are the occupancy
    # color and must not distort the circle votes
    red = _color_mask(img, "red", cfg)
    mask = BinaryMask.from_array(fg.bits & ~red.bits)
    circles = _plausible_circles(mask, hough_circles(mask, cfg.venn_circle), cfg)
    results = []
    for c in criteria:
        if isinstance(c, BackgroundWhite):
            results.append(_background_result(img, c))
            continue
        if len(circles) != c.n_circles:
            results.append(CriterionResult(
                c, False, f"circle count {len(circles)} ≠ {c.n_circles}"))
            continue
        try:
            layout = venn_layout(list(circles), (img.width, img.height))
        except BadTopology as exc:
            results.append(CriterionResult(c, False, f"bad topology: {exc}"))
            continue
        red = _color_mask(img, "red", cfg)
        occ = {r.region: r.fraction for r in region_occupancy(layout, red)}
        missing = [r for r in (*c.expect_on, *c.expect_off) if r not in occ]
        if missing:
            results.append(CriterionResult(
                c, False, f"regions {missing} absent from a "
                f"{c.n_circles}-circle layout", measured=occ))
            continue
        on_ok = all(occ[r] > cfg.occupancy_on for r in c.expect_on)
        off_ok = all(occ[r] < cfg.occupancy_off for r in c.expect_off)
        detail = ", ".join(f"{k}={v:.3f}" for k, v in occ.items() if k != "outside")
        results.append(CriterionResult(c, on_ok and off_ok, detail, measured=occ))
    return results


# --- plane & solid ---

def _dedupe_segments(segments: list[LineSegment]) -> list[LineSegment]:
    """Drop near-collinear duplicates (double edges of thick strokes)."""
    kept: list[LineSegment] = []
    for seg in segments:
        mid = ((seg.p0[0] + seg.p1[0]) / 2, (seg.p0[1] + seg.p1[1]) / 2)
        dup = False
        for other in kept:
            if _angle_gap_180(seg.angle, other.angle) > 3.0:
                continue
            if _point_line_distance(mid, other) <= 8.0:
                dup = True
                break
        if not dup:
            kept.append(seg)
    return kept


def _point_line_distance(pt, seg: LineSegment) -> float:
    x0, y0 = seg.p0
    dx = seg.p1[0] - x0
    dy = seg.p1[1] - y0
    norm = math.hypot(dx, dy)
    if norm == 0:
        return math.hypot(pt[0] - x0, pt[1] - y0)
    return abs((pt[0] - x0) * dy - (pt[1] - y0) * dx) / norm


def _count_crossings(mask: BinaryMask, cfg: ThresholdConfig) -> tuple[int, list]:
    h, w = mask.height, mask.width
    segments = _dedupe_segments(hough_lines(
        mask, cfg.line_vote_threshold, cfg.line_min_len(h, w),
        cfg.line_max_gap, cfg.hough_seed))
    raw_points = []
    for i in range(len(segments)):
        for j in range(i + 1, len(segments)):
            if _angle_gap_180(segments[i].angle, segments[j].angle) < 5.0:
                continue
            pt = line_intersection_near_segments(segments[i], segments[j], 6.0)
            if pt and 0 <= pt[0] < w and 0 <= pt[1] < h:
                raw_points.append(pt)
    merged = merge_points(raw_points, cfg.intersection_merge_px)
    return len(merged), segments


def _polygon_sides_result(mask: BinaryMask, criterion, cfg: ThresholdConfig):
    closed = morph(mask, "close", cfg.morph_kernels[1])
    comps = find_components(closed, min_area=cfg.min_contour_area[0])
    if not comps:
        return CriterionResult(criterion, False, "no shape found")
    poly = comps[0][0]
    approx = simplify_polygon(poly.vertices, cfg.poly_epsilon_frac * poly.perimeter)
    ok = len(approx) == criterion.n
    return CriterionResult(criterion, ok,
                           f"simplified outline has {len(approx)} vertices, "
                           f"target {criterion.n}", measured=float(len(approx)))


def eval_plane(img: RasterImage, criteria, cfg: ThresholdConfig):
    gray = to_grayscale(img)
    mask = _fg_mask(img, cfg, cfg.fg_gray_thresh[0])
    results = []
    for c in criteria:
        if isinstance(c, BackgroundWhite):
            results.append(_background_result(img, c))
        elif c.kind == "dots_on_circle":
            results.append(_dots_on_circle_result(gray, mask, c, cfg))
        elif c.kind == "segments_intersect":
            count, segs = _count_crossings(mask, cfg)
            results.append(CriterionResult(
                c, count == c.n_intersections,
                f"{count} crossing points from {len(segs)} segments, "
                f"target {c.n_intersections}", measured=float(count)))
        elif c.kind == "polygon_sides":
            results.append(_polygon_sides_result(mask, c, cfg))
        elif c.kind in ("shape_is_circle", "shape_is_rectangle"):
            closed = morph(mask, "close", cfg.morph_kernels[1])
            comps = find_components(closed, min_area=cfg.min_contour_area[0])
            if not comps:
                results.append(CriterionResult(c, False, "no shape found"))
            else:
                filled = BinaryMask.from_array(fill_holes(comps[0][1]))
                shape_comps = find_components(filled, min_area=cfg.min_contour_area[0])
                results.append(_shape_class_result(shape_comps[0][0], c, cfg))
    return results


def _dots_on_circle_result(gray, mask, criterion, cfg: ThresholdConfig):
    dots = detect_filled_dots(gray, params=cfg.dot_params,
                              fg_thresh=cfg.fg_gray_thresh[0])
    circles = _plausible_circles(mask, hough_circles(mask, cfg.venn_circle), cfg)
    if not circles:
        return CriterionResult(criterion, False, "no main circle found")
    main = circles[0]
    tol = cfg.dot_ring_tol(gray.height, gray.width)
    on_rim = sum(
        1 for d in dots
        if abs(math.hypot(d.center[0] - main.center[0],
                          d.center[1] - main.center[1]) - main.radius) <= tol)
    return CriterionResult(criterion, on_rim == criterion.n,
                           f"{on_rim} of {len(dots)} markers on the rim, "
                           f"target {criterion.n}", measured=float(on_rim))


def eval_solid(img: RasterImage, criteria, cfg: ThresholdConfig):
    mask = _fg_mask(img, cfg, cfg.fg_gray_thresh[0])
    results = []
    for c in criteria:
        if isinstance(c, BackgroundWhite):
            results.append(_background_result(img, c))
        elif c.kind == "polygon_sides":
            results.append(_polygon_sides_result(mask, c, cfg))
        elif c.kind == "segments_intersect":
            count, segs = _count_crossings(mask, cfg)
            results.append(CriterionResult(
                c, count == c.n_intersections,
                f"{count} junctions from {len(segs)} segments, "
                f"target {c.n_intersections}", measured=float(count)))
    return results


# --- function ---

@dataclass(frozen=True)
class _Frame:
    origin: tuple[float, float]
    px_per_unit: float
    x_axis: LineSegment
    y_axis: LineSegment

    def to_math(self, px: np.ndarray, py: np.ndarray):
        x = (px - self.origin[0]) / self.px_per_unit
        y = (self.origin[1] - py) / self.px_per_unit
        return x, y


def _locate_axes(edge_mask: BinaryMask, cfg: ThresholdConfig) -> _Frame:
    h, w = edge_mask.height, edge_mask.width
    min_len = 0.35 * min(h, w)
    segments = hough_lines(edge_mask, cfg.fn_line_vote, min_len,
                           cfg.fn_line_max_gap, cfg.hough_seed)
    horiz = [s for s in segments if _angle_gap_180(s.angle, 0.0) <= 3.0]
    vert = [s for s in segments if _angle_gap_180(s.angle, 90.0) <= 3.0]
    if not horiz or not vert:
        raise AxesNotFound(f"axes not found ({len(horiz)} horizontal, "
                           f"{len(vert)} vertical candidates)")
    x_axis = max(horiz, key=lambda s: s.length)
    y_axis = max(vert, key=lambda s: s.length)
    origin = line_intersection_near_segments(x_axis, y_axis, slack=0.2 * min(h, w))
    if origin is None:
        raise AxesNotFound("axis carriers do not intersect near the canvas")
    return _Frame(origin, x_axis.length / cfg.fn_axis_units, x_axis, y_axis)


def _curve_pixels(edge_mask: BinaryMask, frame: _Frame, cfg: ThresholdConfig):
    ys, xs = np.nonzero(edge_mask.bits)
    pts = np.column_stack([xs, ys]).astype(np.float64)
    keep = np.ones(len(pts), dtype=bool)
    for axis in (frame.x_axis, frame.y_axis):
        x0, y0 = axis.p0
        dx = axis.p1[0] - x0
        dy = axis.p1[1] - y0
        norm = math.hypot(dx, dy)
        dist = np.abs((pts[:, 0] - x0) * dy - (pts[:, 1] - y0) * dx) / norm
        keep &= dist > cfg.fn_axis_width_px
    return pts[keep]


def eval_function(img: RasterImage, criteria, cfg: ThresholdConfig,
                  tick_reader=None):
    """Function-plot checks.

    ``tick_reader`` is the pluggable OCR hook: a callable
    ``(img, frame) -> (origin_px, px_per_unit, confidence)`` that reads axis
    tick labels. Its calibration replaces the default frame only when its
    confidence clears ``cfg.fn_ocr_min_conf``. No engine ships with the
    package.
    """
    gray = to_grayscale(img)
    edges = BinaryMask.from_array(
        cv2.Canny(gray.data, cfg.fn_edge_thresh[0], cfg.fn_edge_thresh[1]) > 0)
    try:
        frame = _locate_axes(edges, cfg)
    except AxesNotFound as exc:
        return _false_all(criteria, str(exc), img)

    if tick_reader is not None:
        origin, ppu, confidence = tick_reader(img, frame)
        if confidence >= cfg.fn_ocr_min_conf:
            frame = _Frame(tuple(origin), float(ppu), frame.x_axis,
                           frame.y_axis)

    results = []
    for c in criteria:
        if isinstance(c, BackgroundWhite):
            results.append(_background_result(img, c))
            continue
        use = frame
        if getattr(c, "origin_px", None) is not None:
            ppu = c.px_per_unit or frame.px_per_unit
            use = _Frame(tuple(c.origin_px), ppu, frame.x_axis, frame.y_axis)
        elif getattr(c, "px_per_unit", None) is not None:
            use = _Frame(frame.origin, c.px_per_unit, frame.x_axis, frame.y_axis)
        pts_px = _curve_pixels(edges, use, cfg)
        mx, my = use.to_math(pts_px[:, 0], pts_px[:, 1])
        if c.kind == "curve_matches":
            results.append(_curve_matches_result(mx, my, c, cfg))
        elif c.kind == "asymptote_at":
            results.append(_asymptote_result(pts_px, use, c, cfg, img))
    return results


def _curve_matches_result(mx, my, criterion, cfg: ThresholdConfig):
    relation = parse_relation(criterion.relation)
    lo, hi = criterion.domain
    tol_x, tol_y = cfg.fn_inlier_tol
    sel = (mx >= lo - tol_x) & (mx <= hi + tol_x)
    pts = np.column_stack([mx[sel], my[sel]])
    if len(pts) < 30:
        return CriterionResult(criterion, False,
                               f"only {len(pts)} curve pixels in domain")

    fit = None
    if relation.family in ("poly1", "poly2", "poly3", "reciprocal"):
        fit = ransac_fit(pts, relation.family, iterations=cfg.fn_ransac_iters,
                         tol_x=tol_x, tol_y=tol_y, seed=cfg.hough_seed)

    inl = curve_inliers(pts, relation, tol_x, tol_y)
    frac = float(inl.mean())
    if inl.any():
        ref = relation(pts[inl, 0])
        resid = np.abs(pts[inl, 1] - ref)
        resid = float(np.mean(resid[np.isfinite(resid)])) if np.isfinite(resid).any() else math.inf
    else:
        resid = math.inf
    ok = frac >= 0.5 and resid <= cfg.fn_final_tol
    measured = {"inlier_fraction": round(frac, 4),
                "mean_residual": round(resid, 4) if math.isfinite(resid) else None}
    if fit is not None:
        measured["fit_params"] = [round(p, 4) for p in fit.params]
        measured["fit_inlier_fraction"] = round(fit.inlier_fraction, 4)
    return CriterionResult(criterion, ok,
                           f"inliers {frac:.2f}, mean residual "
                           f"{resid if math.isfinite(resid) else float('nan'):.3f} "
                           f"vs {criterion.relation!r}", measured=measured)


def _longest_run(flags: np.ndarray, max_gap: int = 2) -> int:
    """Longest True run, tolerating short gaps."""
    best = run = gap = 0
    for f in flags:
        if f:
            run += gap + 1
            gap = 0
            best = max(best, run)
        else:
            gap += 1
            if gap > max_gap:
                run = 0
                gap = 0
    return best


def _asymptote_result(pts_px, frame: _Frame, criterion, cfg: ThresholdConfig,
                      img: RasterImage):
    h, w = img.height, img.width
    grid = np.zeros((h, w), dtype=bool)
    xi = np.clip(pts_px[:, 0].astype(int), 0, w - 1)
    yi = np.clip(pts_px[:, 1].astype(int), 0, h - 1)
    grid[yi, xi] = True
    if criterion.axis == "horizontal":
        grid = grid.T

    # per-position run of pixels pooled over a sliding window of columns:
    # a steep limb spreads across neighbouring columns, so single columns
    # understate how far it reaches
    half = cfg.fn_window_px // 2
    n = grid.shape[1]
    covered = np.zeros((grid.shape[0], n), dtype=np.int32)
    np.cumsum(grid, axis=1, out=covered)
    runs = np.zeros(n, dtype=np.float64)
    for c in range(n):
        lo, hi = max(0, c - half), min(n, c + half + 1)
        pooled = (covered[:, hi - 1] - (covered[:, lo - 1] if lo else 0)) > 0
        runs[c] = _longest_run(pooled)

    k = cfg.fn_smooth_kernel
    smooth = np.convolve(runs, np.ones(k) / k, mode="same")
    peak = float(smooth.max(initial=0.0))
    if peak <= 0 or float(runs.max(initial=0.0)) < cfg.fn_min_run_px:
        return CriterionResult(criterion, False,
                               f"longest {criterion.axis} run "
                               f"{runs.max(initial=0.0):.0f} px < "
                               f"{cfg.fn_min_run_px}")
    near = np.nonzero(smooth >= 0.95 * peak)[0]
    center = float(near.mean())

    if criterion.axis == "vertical":
        value = (center - frame.origin[0]) / frame.px_per_unit
    else:
        value = (frame.origin[1] - center) / frame.px_per_unit
    ok = abs(value - criterion.value) <= criterion.tol
    return CriterionResult(criterion, ok,
                           f"{criterion.axis} asymptote near {value:.3f}, "
                           f"target {criterion.value} ± {criterion.tol}",
                           measured=value)
