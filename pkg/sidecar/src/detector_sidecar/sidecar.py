"""Detection-file emitter for the counting verifier.

Runs an object detector over an image directory and writes one detection
JSON per image:

    {"image": <filename>, "detections": [{"category", "confidence",
     "bbox": [x, y, w, h]}], "_meta": {...}}

Raw scores are emitted unfiltered: the verifier owns the confidence gate, so
the 0.45 threshold lives in exactly one place. The default backend is the
RT-DETR checkpoint from HuggingFace; an annotation backend replays
hand-labelled boxes for fixtures and offline runs.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from PIL import Image, UnidentifiedImageError

log = logging.getLogger("detector_sidecar")

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}


class ModelLoadError(RuntimeError):
    """Detector weights could not be loaded."""


@dataclass(frozen=True)
class RawDetection:
    label: str
    score: float
    bbox_xywh: tuple[float, float, float, float]


@dataclass(frozen=True)
class SidecarConfig:
    model_id: str = "PekingU/rtdetr_r50vd"
    confidence_floor: float = 0.45  # informational; filtering happens downstream
    category_map: dict = field(default_factory=dict)  # prompt noun -> label
    device: str = "cpu"

    def __post_init__(self):
        if not 0.0 < self.confidence_floor <= 1.0:
            raise ValueError("confidence_floor must lie in (0, 1]")


class RtDetrBackend:
    """Transformer detector backend; loads lazily, fails with ModelLoadError."""

    def __init__(self, cfg: SidecarConfig):
        self.cfg = cfg
        try:
            import torch
            from transformers import AutoImageProcessor, AutoModelForObjectDetection
        except ImportError as exc:
            raise ModelLoadError(f"transformers/torch not installed: {exc}") from exc
        try:
            self._processor = AutoImageProcessor.from_pretrained(cfg.model_id)
            self._model = AutoModelForObjectDetection.from_pretrained(cfg.model_id)
        except Exception as exc:
            raise ModelLoadError(f"cannot load {cfg.model_id!r}: {exc}") from exc
        self._torch = torch
        self._model.eval()
        if cfg.device != "cpu":
            self._model.to(cfg.device)

    def preprocessing_descriptor(self) -> str:
        size = getattr(self._processor, "size", None)
        return f"{type(self._processor).__name__} size={size}"

    def infer(self, image: Image.Image) -> list[RawDetection]:
        inputs = self._processor(images=image, return_tensors="pt")
        if self.cfg.device != "cpu":
            inputs = {k: v.to(self.cfg.device) for k, v in inputs.items()}
        with self._torch.no_grad():
            outputs = self._model(**inputs)
        target_size = self._torch.tensor([[image.height, image.width]])
        processed = self._processor.post_process_object_detection(
            outputs, threshold=0.0, target_sizes=target_size)[0]
        id2label = self._model.config.id2label
        out = []
        for score, label, box in zip(processed["scores"], processed["labels"],
                                     processed["boxes"]):
            x0, y0, x1, y1 = (float(v) for v in box)
            out.append(RawDetection(id2label[int(label)], float(score),
                                    (x0, y0, x1 - x0, y1 - y0)))
        return out


class AnnotationBackend:
    """Replays hand-labelled boxes from per-image JSON files.

    Annotation files sit in one directory, named ``<image stem>.json``:
    {"objects": [{"label", "score", "bbox": [x, y, w, h]}]}. Images without
    a file yield no detections.
    """

    def __init__(self, annotations_dir: str | Path):
        self.annotations_dir = Path(annotations_dir)
        self._current: Path | None = None

    def preprocessing_descriptor(self) -> str:
        return "hand annotations (no model)"

    def bind(self, image_path: Path) -> None:
        self._current = self.annotations_dir / f"{image_path.stem}.json"

    def infer(self, image: Image.Image) -> list[RawDetection]:
        if self._current is None or not self._current.is_file():
            return []
        data = json.loads(self._current.read_text(encoding="utf-8"))
        return [RawDetection(str(o["label"]), float(o["score"]),
                             tuple(float(v) for v in o["bbox"]))
                for o in data.get("objects", [])]


def _emit(image_name: str, detections: list[RawDetection],
          cfg: SidecarConfig, meta: str) -> dict:
    mapping = {v: k for k, v in cfg.category_map.items()}
    rows = []
    for det in detections:
        category = mapping.get(det.label, det.label)
        rows.append({
            "category": category,
            "confidence": round(min(max(det.score, 0.0), 1.0), 6),
            "bbox": [round(v, 2) for v in det.bbox_xywh],
        })
    return {"image": image_name, "detections": rows,
            "_meta": {"model": cfg.model_id, "preprocessing": meta,
                      "confidence_floor": cfg.confidence_floor}}


def detect_dir(images: str | Path, cfg: SidecarConfig, out: str | Path,
               backend=None) -> list[Path]:
    """Write one detection file per image; unreadable images produce empty
    detection sets and a warning, never an abort."""
    images = Path(images)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    if backend is None:
        backend = RtDetrBackend(cfg)

    written = []
    for path in sorted(p for p in images.iterdir()
                       if p.suffix.lower() in _IMAGE_SUFFIXES):
        if hasattr(backend, "bind"):
            backend.bind(path)
        try:
            with Image.open(path) as img:
                detections = backend.infer(img.convert("RGB"))
        except (UnidentifiedImageError, OSError) as exc:
            log.warning("skipping %s: %s", path.name, exc)
            detections = []
        payload = _emit(path.name, detections, cfg,
                        backend.preprocessing_descriptor())
        target = out / f"{path.stem}.json"
        target.write_text(json.dumps(payload, sort_keys=True) + "\n",
                          encoding="utf-8")
        written.append(target)
    return written
