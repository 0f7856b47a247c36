"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 audit disagreement,
3 manifest parse failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .audit import default_audit_catalog, generate_audit_suite
from .config import load_config
from .constraints import load_detections, load_spec
from .errors import (DiagramCheckError, DuplicateId, ManifestParseError,
                     UnknownDomain)
from .evaluate import evaluate
from .harness import ProblemRecord, emit_report, load_manifest, run_eval
from .image import load_image


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="diagramcheck",
                     description="Deterministic verification of mathematical "
                                 "diagram images")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evaluate a problem manifest")
    run.add_argument("--manifest", required=True)
    run.add_argument("--images", required=True,
                     help="base directory for relative image paths")
    run.add_argument("--detections", default=None,
                     help="base directory for relative detection paths")
    run.add_argument("--config", default=None)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--out", default=None)
    run.add_argument("--format", choices=("json", "table"), default="table")

    audit = sub.add_parser("audit", help="generate and self-evaluate the "
                                         "synthetic audit suite")
    audit.add_argument("--out", required=True)
    audit.add_argument("--config", default=None)
    audit.add_argument("--workers", type=int, default=1)

    one = sub.add_parser("verify-one", help="evaluate a single image")
    one.add_argument("--image", required=True)
    one.add_argument("--spec", required=True)
    one.add_argument("--detections", default=None)

    return parser


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    try:
        records = load_manifest(args.manifest)
    except (ManifestParseError, DuplicateId, UnknownDomain) as exc:
        print(f"manifest error: {exc}", file=sys.stderr)
        return 3
    report = run_eval(records, cfg, parallelism=args.workers,
                      image_base=args.images,
                      detections_base=args.detections)
    rendered = emit_report(report, args.format)
    if args.out:
        Path(args.out).write_text(emit_report(report, "json"), encoding="utf-8")
    print(rendered, end="" if rendered.endswith("\n") else "\n")
    return 0


def _cmd_audit(args) -> int:
    cfg = load_config(args.config)
    out_dir = Path(args.out)
    t0 = time.time()
    rows = generate_audit_suite(default_audit_catalog(), cfg, out_dir)

    records = [
        ProblemRecord(problem_id=f"{i:04d}:{row.image}", domain=row.spec.domain,
                      spec=row.spec, image_path=row.image,
                      detections_path=row.detections)
        for i, row in enumerate(rows)
    ]
    report = run_eval(records, cfg, parallelism=args.workers,
                      image_base=out_dir)
    disagreements = []
    for row, verdict in zip(rows, report.verdicts):
        actual = "pass" if verdict.passed else "fail"
        if actual != row.expected:
            disagreements.append((row, verdict))

    n = len(rows)
    agree = n - len(disagreements)
    print(f"audit suite: {n} images ({sum(r.expected == 'pass' for r in rows)} "
          f"positive / {sum(r.expected == 'fail' for r in rows)} negative), "
          f"{time.time() - t0:.1f}s")
    print(f"expected/actual agreement: {agree}/{n}")
    for row, verdict in disagreements:
        why = "; ".join(f"{r.criterion.kind}: {r.diagnostic}"
                        for r in verdict.criterion_results)
        print(f"  DISAGREE {row.image} expected={row.expected} "
              f"mutation={row.mutation or '-'} :: {why}")
    (out_dir / "report.json").write_text(report.to_json(), encoding="utf-8")
    return 0 if not disagreements else 2


def _cmd_verify_one(args) -> int:
    cfg = load_config(None)
    spec = load_spec(args.spec)
    det = load_detections(args.detections) if args.detections else None
    try:
        img = load_image(args.image)
        verdict = evaluate(img, spec, cfg, det)
    except DiagramCheckError as exc:
        print(f"verdict: error ({type(exc).__name__}: {exc})", file=sys.stderr)
        return 1
    print(f"problem: {verdict.problem_id}")
    print(f"passed: {verdict.passed}")
    for r in verdict.criterion_results:
        mark = "PASS" if r.passed else "FAIL"
        print(f"  [{mark}] {r.criterion.kind}: {r.diagnostic}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "audit": _cmd_audit,
               "verify-one": _cmd_verify_one}[args.command]
    return handler(args)


if __name__ == "__main__":
    raise SystemExit(main())
