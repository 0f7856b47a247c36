"""Self-audit suite: rendered positives, mutated negatives, expectations.

Manifest format (JSON lines, one row per image):
  {"image": relpath, "spec": {...}, "expected": "pass"|"fail",
   "mutation": "<kind[:detail]>"?, "detections": relpath?}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from PIL import Image

from .config import ThresholdConfig
from .constraints import (ConstraintSpec, detections_to_dict, spec_from_dict,
                          spec_to_dict)
from .scenes import Mutation, SceneRecipe, default_catalog, mutate, render


@dataclass(frozen=True)
class AuditRow:
    image: str
    spec: ConstraintSpec
    expected: str  # "pass" | "fail"
    mutation: str | None = None
    detections: str | None = None


def _save_png(img, path: Path) -> None:
    Image.fromarray(img.data).save(path, format="PNG")


def _write_detections(recipe: SceneRecipe, det_dir: Path, name: str) -> str | None:
    det = recipe.detections()
    if det is None:
        return None
    rel = f"detections/{name}.json"
    (det_dir / f"{name}.json").write_text(
        json.dumps(detections_to_dict(det), sort_keys=True), encoding="utf-8")
    return rel


def generate_audit_suite(catalog: list[SceneRecipe], cfg: ThresholdConfig,
                         out_dir: str | Path) -> list[AuditRow]:
    """Render every recipe and its mutations; write images and the manifest.

    Every negative pairs a mutated render with the ORIGINAL recipe's spec, so
    its expected verdict is "fail" by construction.
    """
    out_dir = Path(out_dir)
    img_dir = out_dir / "images"
    det_dir = out_dir / "detections"
    img_dir.mkdir(parents=True, exist_ok=True)
    det_dir.mkdir(parents=True, exist_ok=True)

    rows: list[AuditRow] = []
    for recipe in catalog:
        img, spec = render(recipe)
        name = recipe.scene_id
        _save_png(img, img_dir / f"{name}.png")
        rows.append(AuditRow(f"images/{name}.png", spec, "pass",
                             detections=_write_detections(recipe, det_dir, name)))

        mutations = list(recipe.mutations())
        if recipe.check_background:
            mutations.append(Mutation("reshade_fraction", payload="background"))
        for i, m in enumerate(mutations):
            mutated = mutate(recipe, m)
            neg_name = f"{name}_neg{i}_{m.kind}"
            _save_png(mutated.render_image(), img_dir / f"{neg_name}.png")
            rows.append(AuditRow(
                f"images/{neg_name}.png", spec, "fail", mutation=m.describe(),
                detections=_write_detections(mutated, det_dir, neg_name)))

    lines = []
    for row in rows:
        payload = {"image": row.image, "spec": spec_to_dict(row.spec),
                   "expected": row.expected}
        if row.mutation is not None:
            payload["mutation"] = row.mutation
        if row.detections is not None:
            payload["detections"] = row.detections
        lines.append(json.dumps(payload, sort_keys=True, ensure_ascii=False))
    (out_dir / "manifest.jsonl").write_text("\n".join(lines) + "\n",
                                            encoding="utf-8")
    return rows


def load_audit_manifest(path: str | Path) -> list[AuditRow]:
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        data = json.loads(line)
        rows.append(AuditRow(data["image"], spec_from_dict(data["spec"]),
                             data["expected"], data.get("mutation"),
                             data.get("detections")))
    return rows


def default_audit_catalog() -> list[SceneRecipe]:
    return default_catalog()
