"""Threshold configuration: every decision constant in one overridable ledger."""

from __future__ import annotations

import ast
import hashlib
from dataclasses import dataclass, field, fields
from pathlib import Path

from .primitives import HoughCircleParams


@dataclass(frozen=True, slots=True)
class DotDetectorParams:
    """Filled-dot detector knobs; radius and spacing scale with image size."""

    dp: float = 1.2
    param1: float = 100.0
    param2: float = 12.0
    radius_frac: tuple[float, float] = (0.0025, 0.014)
    spacing_frac: float = 0.03
    fill_ratio: float = 0.68


@dataclass(frozen=True)
class ThresholdConfig:
    """Complete decision-threshold ledger, immutable and shareable across threads.

    Size-relative quantities (minimum line length, probe radius, dot radius
    band) are stored as factors and resolved against image dimensions through
    the helper methods below.
    """

    eval_resolution: int = 1024

    # angle checks
    angle_tol_deg: float = 12.0
    angle_tol_relaxed_deg: float | None = None  # defaults to angle_tol_deg + 8
    opposite_tol_deg: float = 10.0
    min_peak_len_ratio: float = 0.10
    min_peak_sep_deg: float = 10.0
    probe_radius_frac: float = 0.35  # calibration knob; no documented value exists

    # line extraction
    line_vote_threshold: int = 60
    line_min_len_floor: float = 80.0
    line_min_len_frac: float = 0.12
    line_max_gap: float = 10.0

    # background / foreground
    white_bg_thresh: int = 240
    bg_border_frac: float = 0.08
    fg_gray_thresh: tuple[int, int] = (200, 240)
    morph_kernels: tuple[tuple[int, int], ...] = ((3, 3), (5, 5), (15, 15))
    min_contour_area: tuple[int, int] = (1000, 10000)

    # overlap-region (set) checks
    venn_circle: HoughCircleParams = field(default_factory=HoughCircleParams)
    circle_border_margin_frac: float = 0.0  # drawn circles must fit the canvas
    circle_coverage_min: float = 0.6  # inked fraction of a real circle's rim
    occupancy_on: float = 0.20
    occupancy_off: float = 0.05
    red_hue_deg: tuple[tuple[float, float], ...] = ((0.0, 10.0), (350.0, 360.0))
    red_sat_min: float = 0.4
    red_val_min: float = 0.3
    purity_check: bool = False  # saturation-variance gate, off by default
    purity_sat_std_max: float = 0.12

    # plane / solid checks
    dot_params: DotDetectorParams = field(default_factory=DotDetectorParams)
    dot_ring_tol_frac: float = 0.02
    intersection_merge_px: float = 5.0
    poly_epsilon_frac: float = 0.02
    circle_circularity_min: float = 0.85
    rect_extent_min: float = 0.90

    # function-plot checks
    fn_edge_thresh: tuple[int, int] = (50, 150)
    fn_line_vote: int = 120
    fn_line_max_gap: float = 25.0
    fn_axis_width_px: float = 10.0
    fn_window_px: int = 30
    fn_min_run_px: int = 25
    fn_smooth_kernel: int = 41
    fn_ocr_min_conf: float = 12.0  # pluggable OCR hook only; no engine ships
    fn_ransac_iters: int = 250
    fn_inlier_tol: tuple[float, float] = (0.35, 0.75)
    fn_final_tol: float = 0.6
    fn_axis_units: float = 20.0  # math units spanned by a full axis when uncalibrated

    # counting checks
    count_conf_thresh: float = 0.45
    count_tolerance: int = 0

    hough_seed: int = 42

    def __post_init__(self):
        if self.angle_tol_relaxed_deg is None:
            object.__setattr__(self, "angle_tol_relaxed_deg", self.angle_tol_deg + 8.0)
        if self.occupancy_off >= self.occupancy_on:
            raise ValueError("occupancy_off must stay below occupancy_on")
        for name in ("angle_tol_deg", "opposite_tol_deg", "min_peak_sep_deg",
                     "fn_final_tol", "occupancy_on", "occupancy_off"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    # --- size-relative resolutions ---

    def line_min_len(self, height: int, width: int) -> float:
        return max(self.line_min_len_floor, self.line_min_len_frac * min(height, width))

    def probe_radius(self, height: int, width: int) -> int:
        return max(8, int(round(self.probe_radius_frac * min(height, width))))

    def bg_border_width(self, height: int, width: int) -> int:
        return max(1, int(self.bg_border_frac * min(height, width)))

    def dot_radius_band(self, height: int, width: int) -> tuple[float, float]:
        m = min(height, width)
        return (self.dot_params.radius_frac[0] * m, self.dot_params.radius_frac[1] * m)

    def dot_spacing(self, height: int, width: int) -> float:
        return self.dot_params.spacing_frac * min(height, width)

    def dot_ring_tol(self, height: int, width: int) -> float:
        return self.dot_ring_tol_frac * min(height, width)

    # --- serialization ---

    def as_flat_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, HoughCircleParams):
                value = (value.dp, value.min_dist, value.param1, value.param2,
                         value.min_radius)
            elif isinstance(value, DotDetectorParams):
                value = (value.dp, value.param1, value.param2, value.radius_frac,
                         value.spacing_frac, value.fill_ratio)
            out[f.name] = value
        return out

    def fingerprint(self) -> str:
        """Stable hash identifying this exact threshold ledger."""
        body = ";".join(f"{k}={v!r}" for k, v in sorted(self.as_flat_dict().items()))
        return hashlib.sha256(body.encode("utf-8")).hexdigest()[:16]


def _coerce(name: str, raw: str):
    raw = raw.strip()
    try:
        value = ast.literal_eval(raw)
    except (ValueError, SyntaxError):
        return raw
    if name == "venn_circle" and isinstance(value, (tuple, list)):
        return HoughCircleParams(*value)
    if name == "dot_params" and isinstance(value, (tuple, list)):
        return DotDetectorParams(*(tuple(v) if isinstance(v, list) else v for v in value))
    if isinstance(value, list):
        return tuple(tuple(v) if isinstance(v, list) else v for v in value)
    return value


def load_config(path: str | Path | None = None) -> ThresholdConfig:
    """Build a config from a flat ``key = value`` override file.

    Unknown keys are rejected; unspecified keys keep their defaults.
    """
    if path is None:
        return ThresholdConfig()
    known = {f.name for f in fields(ThresholdConfig)}
    overrides = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {line_no}: expected key = value")
        key, raw = line.split("=", 1)
        key = key.strip()
        if key not in known:
            raise ValueError(f"config line {line_no}: unknown key {key!r}")
        overrides[key] = _coerce(key, raw)
    return ThresholdConfig(**overrides)
