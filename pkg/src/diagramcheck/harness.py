"""Batch evaluation: manifest ingestion, parallel runs, accuracy reports.

The batch is total: unreadable images, missing detection files, and evaluator
errors become failed verdicts with diagnostics, never exceptions.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .config import ThresholdConfig
from .constraints import (DOMAINS, ConstraintSpec, CriterionResult,
                          DetectionSet, Verdict, load_detections,
                          spec_from_dict)
from .errors import (DiagramCheckError, DuplicateId, ManifestParseError,
                     UnknownDomain)
from .evaluate import evaluate
from .image import load_image

_TABLE_ORDER = ("counting", "angle", "fraction", "function", "plane", "set",
                "solid")


@dataclass(frozen=True)
class ProblemRecord:
    problem_id: str
    domain: str
    spec: ConstraintSpec
    image_path: str
    detections_path: str | None = None
    prompt_text: str = ""


def load_manifest(path: str | Path) -> list[ProblemRecord]:
    """Parse a JSON-lines problem manifest; ids must be unique."""
    records: list[ProblemRecord] = []
    seen: set[str] = set()
    for line_no, line in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestParseError(line_no, f"bad JSON: {exc}") from exc
        try:
            domain = str(data["domain"])
            if domain not in DOMAINS:
                raise UnknownDomain(f"line {line_no}: domain {domain!r}")
            spec = spec_from_dict(data["spec"])
            record = ProblemRecord(
                problem_id=str(data["problem_id"]),
                domain=domain,
                spec=spec,
                image_path=str(data["image_path"]),
                detections_path=(str(data["detections_path"])
                                 if data.get("detections_path") else None),
                prompt_text=str(data.get("prompt_text", "")),
            )
        except UnknownDomain:
            raise
        except (KeyError, ValueError, TypeError) as exc:
            raise ManifestParseError(line_no, str(exc)) from exc
        if record.domain != record.spec.domain:
            raise ManifestParseError(
                line_no, f"record domain {record.domain!r} does not match "
                f"spec domain {record.spec.domain!r}")
        if record.problem_id in seen:
            raise DuplicateId(f"line {line_no}: {record.problem_id!r}")
        seen.add(record.problem_id)
        records.append(record)
    return records


def _failed_verdict(spec: ConstraintSpec, diagnostic: str) -> Verdict:
    results = tuple(CriterionResult(c, False, diagnostic) for c in spec.criteria)
    return Verdict(spec.problem_id, False, results)


def _eval_record(record: ProblemRecord, cfg: ThresholdConfig,
                 image_base: Path | None, det_base: Path | None) -> Verdict:
    img_path = Path(record.image_path)
    if image_base is not None and not img_path.is_absolute():
        img_path = image_base / img_path
    try:
        img = load_image(img_path)
    except DiagramCheckError as exc:
        return _failed_verdict(record.spec, f"unreadable image: {exc}")

    det: DetectionSet | None = None
    if record.detections_path:
        det_path = Path(record.detections_path)
        if det_base is not None and not det_path.is_absolute():
            det_path = det_base / det_path
        try:
            det = load_detections(det_path)
        except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
            return _failed_verdict(record.spec, f"unreadable detections: {exc}")

    try:
        verdict = evaluate(img, record.spec, cfg, det)
    except DiagramCheckError as exc:
        return _failed_verdict(record.spec,
                               f"{type(exc).__name__}: {exc}")
    return Verdict(record.problem_id, verdict.passed, verdict.criterion_results)


@dataclass(frozen=True)
class Report:
    """Per-domain and overall accuracy plus every per-problem verdict."""

    domain_stats: dict  # domain -> {"n": int, "passed": int}
    verdicts: tuple[Verdict, ...]
    config_fingerprint: str

    @staticmethod
    def _accuracy(n: int, passed: int):
        return round(100.0 * passed / n, 4) if n else None

    def overall(self) -> dict:
        n = len(self.verdicts)
        passed = sum(1 for v in self.verdicts if v.passed)
        return {"n_problems": n, "n_passed": passed,
                "accuracy_pct": self._accuracy(n, passed)}

    def to_dict(self) -> dict:
        domains = {
            d: {"n_problems": s["n"], "n_passed": s["passed"],
                "accuracy_pct": self._accuracy(s["n"], s["passed"])}
            for d, s in self.domain_stats.items()
        }
        return {"config_fingerprint": self.config_fingerprint,
                "domains": domains,
                "overall": self.overall(),
                "problems": [v.to_dict() for v in self.verdicts]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2,
                          ensure_ascii=False) + "\n"

    def to_table(self) -> str:
        present = [d for d in _TABLE_ORDER if d in self.domain_stats]
        headers = [d.capitalize() for d in present] + ["Overall"]
        cells = []
        for d in present:
            s = self.domain_stats[d]
            acc = self._accuracy(s["n"], s["passed"])
            cells.append("n/a" if acc is None else f"{acc:.1f}")
        acc = self.overall()["accuracy_pct"]
        cells.append("n/a" if acc is None else f"{acc:.1f}")
        width = max([len(h) for h in headers] + [8])
        head = " | ".join(h.rjust(width) for h in headers)
        rule = "-+-".join("-" * width for _ in headers)
        body = " | ".join(c.rjust(width) for c in cells)
        return f"{head}\n{rule}\n{body}\n"


def run_eval(records: list[ProblemRecord], cfg: ThresholdConfig,
             parallelism: int = 1, image_base: str | Path | None = None,
             detections_base: str | Path | None = None) -> Report:
    """Evaluate every record; report aggregation is manifest-order stable."""
    image_base = Path(image_base) if image_base is not None else None
    det_base = Path(detections_base) if detections_base is not None else image_base

    if parallelism <= 1:
        verdicts = [_eval_record(r, cfg, image_base, det_base) for r in records]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            verdicts = list(pool.map(
                lambda r: _eval_record(r, cfg, image_base, det_base), records))

    stats: dict[str, dict] = {}
    for record, verdict in zip(records, verdicts):
        s = stats.setdefault(record.domain, {"n": 0, "passed": 0})
        s["n"] += 1
        s["passed"] += int(verdict.passed)
    return Report(stats, tuple(verdicts), cfg.fingerprint())


def emit_report(report: Report, format: str = "json") -> str:
    if format == "json":
        return report.to_json()
    if format == "table":
        return report.to_table()
    raise ValueError(f"unknown report format {format!r}")
