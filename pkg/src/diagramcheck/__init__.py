"""Deterministic verification of mathematical diagram images."""

from .audit import generate_audit_suite, load_audit_manifest
from .config import DotDetectorParams, ThresholdConfig, load_config
from .constraints import (ConstraintSpec, CriterionResult, Detection,
                          DetectionSet, Verdict, criterion_from_dict,
                          load_detections, load_spec, spec_from_dict,
                          spec_to_dict)
from .evaluate import aggregate, evaluate
from .harness import (ProblemRecord, Report, emit_report, load_manifest,
                      run_eval)
from .image import (BinaryMask, RasterImage, check_white_background,
                    load_image, morph, threshold_foreground, to_grayscale,
                    to_hsv)
from .primitives import (CircleShape, ContourPoly, DetectedDot,
                         HoughCircleParams, LineSegment, RadialPeak)
from .scenes import Mutation, SceneRecipe, default_catalog, mutate, render

__version__ = "0.1.0"

__all__ = [
    "BinaryMask", "CircleShape", "ConstraintSpec", "ContourPoly",
    "CriterionResult", "DetectedDot", "Detection", "DetectionSet",
    "DotDetectorParams", "HoughCircleParams", "LineSegment", "Mutation",
    "ProblemRecord", "RadialPeak", "RasterImage", "Report", "SceneRecipe",
    "ThresholdConfig", "Verdict", "aggregate", "check_white_background",
    "criterion_from_dict", "default_catalog", "emit_report", "evaluate",
    "generate_audit_suite", "load_audit_manifest", "load_config",
    "load_detections", "load_image", "load_manifest", "load_spec", "morph",
    "mutate", "render", "run_eval", "spec_from_dict", "spec_to_dict",
    "threshold_foreground", "to_grayscale", "to_hsv", "__version__",
]
