"""Machine-readable constraint specifications, detections, and verdicts.

Wire formats (all UTF-8 JSON):
  - constraint spec: {"problem_id", "domain", "criteria": [{"kind", ...}]}
  - detection set:   {"image", "detections": [{"category", "confidence",
                      "bbox": [x, y, w, h]}]}
Criterion kinds and parameters are lower_snake_case.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Union

from .geometry import canonical_region_label

DOMAINS = ("counting", "angle", "fraction", "function", "plane", "set", "solid")


def _parse_ratio(value) -> float:
    if isinstance(value, str):
        return float(Fraction(value))
    return float(value)


@dataclass(frozen=True)
class CountExact:
    kind = "count_exact"
    category: str
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("count target must be >= 0")


@dataclass(frozen=True)
class SectorEquals:
    kind = "sector_equals"
    target_deg: float
    relaxed: bool = False

    def __post_init__(self):
        if not 0 < self.target_deg < 360:
            raise ValueError("sector target must lie in (0, 360)")


@dataclass(frozen=True)
class RayCount:
    kind = "ray_count"
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("ray count must be >= 0")


@dataclass(frozen=True)
class OppositeRays:
    kind = "opposite_rays"


@dataclass(frozen=True)
class FractionShaded:
    kind = "fraction_shaded"
    target: float
    tol: float
    color: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "target", _parse_ratio(self.target))
        if not 0 < self.target <= 1:
            raise ValueError("shaded ratio target must lie in (0, 1]")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class AspectRatio:
    kind = "aspect_ratio"
    target: float
    tol: float

    def __post_init__(self):
        if self.target <= 0 or self.tol <= 0:
            raise ValueError("aspect target and tolerance must be positive")


@dataclass(frozen=True)
class RadiusRatio:
    kind = "radius_ratio"
    target: float
    tol: float

    def __post_init__(self):
        if self.target <= 0 or self.tol <= 0:
            raise ValueError("radius-ratio target and tolerance must be positive")


@dataclass(frozen=True)
class VennRegions:
    kind = "venn_regions"
    expect_on: tuple[str, ...]
    expect_off: tuple[str, ...]
    n_circles: int

    def __post_init__(self):
        if self.n_circles not in (2, 3):
            raise ValueError("overlap diagrams use 2 or 3 circles")
        object.__setattr__(self, "expect_on",
                           tuple(canonical_region_label(r) for r in self.expect_on))
        object.__setattr__(self, "expect_off",
                           tuple(canonical_region_label(r) for r in self.expect_off))


@dataclass(frozen=True)
class CurveMatches:
    kind = "curve_matches"
    relation: str
    domain: tuple[float, float]
    origin_px: tuple[float, float] | None = None
    px_per_unit: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(float(v) for v in self.domain))
        if self.origin_px is not None:
            object.__setattr__(self, "origin_px",
                               tuple(float(v) for v in self.origin_px))
        if self.domain[0] >= self.domain[1]:
            raise ValueError("relation domain must be an increasing interval")


@dataclass(frozen=True)
class AsymptoteAt:
    kind = "asymptote_at"
    axis: str  # "vertical" | "horizontal"
    value: float
    tol: float
    origin_px: tuple[float, float] | None = None
    px_per_unit: float | None = None

    def __post_init__(self):
        if self.axis not in ("vertical", "horizontal"):
            raise ValueError("axis must be vertical or horizontal")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if self.origin_px is not None:
            object.__setattr__(self, "origin_px",
                               tuple(float(v) for v in self.origin_px))


@dataclass(frozen=True)
class SegmentsIntersect:
    kind = "segments_intersect"
    n_intersections: int

    def __post_init__(self):
        if self.n_intersections < 0:
            raise ValueError("intersection count must be >= 0")


@dataclass(frozen=True)
class PolygonSides:
    kind = "polygon_sides"
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("polygons have at least 3 sides")


@dataclass(frozen=True)
class DotsOnCircle:
    kind = "dots_on_circle"
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("dot count must be >= 0")


@dataclass(frozen=True)
class ShapeIsCircle:
    kind = "shape_is_circle"


@dataclass(frozen=True)
class ShapeIsRectangle:
    kind = "shape_is_rectangle"


@dataclass(frozen=True)
class BackgroundWhite:
    kind = "background_white"


Criterion = Union[CountExact, SectorEquals, RayCount, OppositeRays,
                  FractionShaded, AspectRatio, RadiusRatio, VennRegions,
                  CurveMatches, AsymptoteAt, SegmentsIntersect, PolygonSides,
                  DotsOnCircle, ShapeIsCircle, ShapeIsRectangle, BackgroundWhite]

_CRITERION_TYPES = {cls.kind: cls for cls in (
    CountExact, SectorEquals, RayCount, OppositeRays, FractionShaded,
    AspectRatio, RadiusRatio, VennRegions, CurveMatches, AsymptoteAt,
    SegmentsIntersect, PolygonSides, DotsOnCircle, ShapeIsCircle,
    ShapeIsRectangle, BackgroundWhite)}

# which criterion kinds each domain's evaluator can check
DOMAIN_KINDS = {
    "counting": {"count_exact", "background_white"},
    "angle": {"sector_equals", "ray_count", "opposite_rays", "background_white"},
    "fraction": {"fraction_shaded", "aspect_ratio", "radius_ratio",
                 "shape_is_circle", "shape_is_rectangle", "background_white"},
    "function": {"curve_matches", "asymptote_at", "background_white"},
    "plane": {"dots_on_circle", "segments_intersect", "polygon_sides",
              "shape_is_circle", "shape_is_rectangle", "background_white"},
    "set": {"venn_regions", "background_white"},
    "solid": {"polygon_sides", "segments_intersect", "background_white"},
}


def criterion_from_dict(data: dict) -> Criterion:
    data = dict(data)
    kind = data.pop("kind", None)
    cls = _CRITERION_TYPES.get(kind)
    if cls is None:
        raise ValueError(f"unknown criterion kind {kind!r}")
    converted = {}
    for f in fields(cls):
        if f.name not in data:
            continue
        value = data.pop(f.name)
        if isinstance(value, list):
            value = tuple(value)
        converted[f.name] = value
    if data:
        raise ValueError(f"unexpected fields for {kind}: {sorted(data)}")
    return cls(**converted)


def criterion_to_dict(criterion: Criterion) -> dict:
    out: dict[str, Any] = {"kind": criterion.kind}
    for f in fields(criterion):
        value = getattr(criterion, f.name)
        if value is None:
            continue
        if isinstance(value, tuple):
            value = list(value)
        out[f.name] = value
    return out


@dataclass(frozen=True)
class ConstraintSpec:
    """One problem's requirements: a domain tag plus ordered criteria."""

    problem_id: str
    domain: str
    criteria: tuple[Criterion, ...]

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}")
        if not self.criteria:
            raise ValueError("a spec needs at least one criterion")
        legal = DOMAIN_KINDS[self.domain]
        for c in self.criteria:
            if c.kind not in legal:
                raise ValueError(f"criterion {c.kind} is not legal in domain "
                                 f"{self.domain}")


def spec_from_dict(data: dict) -> ConstraintSpec:
    return ConstraintSpec(
        problem_id=str(data["problem_id"]),
        domain=str(data["domain"]),
        criteria=tuple(criterion_from_dict(c) for c in data["criteria"]),
    )


def spec_to_dict(spec: ConstraintSpec) -> dict:
    return {"problem_id": spec.problem_id, "domain": spec.domain,
            "criteria": [criterion_to_dict(c) for c in spec.criteria]}


def load_spec(path: str | Path) -> ConstraintSpec:
    return spec_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# --- detections ---

@dataclass(frozen=True)
class Detection:
    category: str
    confidence: float
    bbox: tuple[float, float, float, float]  # x, y, w, h

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must lie in [0, 1]")
        if self.bbox[2] < 0 or self.bbox[3] < 0:
            raise ValueError("bbox width/height must be >= 0")


@dataclass(frozen=True)
class DetectionSet:
    """Sidecar detector output for one image."""

    image: str
    detections: tuple[Detection, ...]


def detections_from_dict(data: dict) -> DetectionSet:
    dets = tuple(
        Detection(category=str(d["category"]), confidence=float(d["confidence"]),
                  bbox=tuple(float(v) for v in d["bbox"]))
        for d in data["detections"])
    return DetectionSet(image=str(data["image"]), detections=dets)


def detections_to_dict(ds: DetectionSet) -> dict:
    return {"image": ds.image,
            "detections": [{"category": d.category, "confidence": d.confidence,
                            "bbox": list(d.bbox)} for d in ds.detections]}


def load_detections(path: str | Path) -> DetectionSet:
    return detections_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# --- verdicts ---

@dataclass(frozen=True)
class CriterionResult:
    criterion: Criterion
    passed: bool
    diagnostic: str
    measured: float | dict | None = None


@dataclass(frozen=True)
class Verdict:
    """Per-criterion outcomes joined by conjunction."""

    problem_id: str
    passed: bool
    criterion_results: tuple[CriterionResult, ...]

    def to_dict(self) -> dict:
        return {
            "problem_id": self.problem_id,
            "passed": self.passed,
            "criteria": [
                {"kind": r.criterion.kind, "passed": r.passed,
                 "diagnostic": r.diagnostic, "measured": r.measured}
                for r in self.criterion_results
            ],
        }
