"""Generate a small self-audit suite and check every expectation."""

import tempfile

from diagramcheck import (ProblemRecord, ThresholdConfig,
                          generate_audit_suite, run_eval)
from diagramcheck.scenes import AngleFan, DotsRing, FractionGrid, VennScene

catalog = [
    AngleFan(scene_id="audit-angle", directions=(0.0, 70.0),
             target_sector=70.0),
    FractionGrid(scene_id="audit-grid", cells=8, shaded=5),
    VennScene(scene_id="audit-venn", fills=(("A∩B", 1.0),),
              expect_on=("A∩B",), expect_off=("A_only", "B_only")),
    DotsRing(scene_id="audit-dots", n_dots=4),
]

cfg = ThresholdConfig()
with tempfile.TemporaryDirectory() as out:
    rows = generate_audit_suite(catalog, cfg, out)
    records = [ProblemRecord(f"{i}:{r.image}", r.spec.domain, r.spec, r.image,
                             r.detections) for i, r in enumerate(rows)]
    report = run_eval(records, cfg, parallelism=2, image_base=out)

    print(f"{len(rows)} images "
          f"({sum(r.expected == 'pass' for r in rows)} positive, "
          f"{sum(r.expected == 'fail' for r in rows)} mutated negative)")
    agree = sum((v.passed and r.expected == "pass")
                or (not v.passed and r.expected == "fail")
                for r, v in zip(rows, report.verdicts))
    print(f"expected/actual agreement: {agree}/{len(rows)}")
    for row, verdict in zip(rows, report.verdicts):
        mark = "pass" if verdict.passed else "fail"
        tag = f" [{row.mutation}]" if row.mutation else ""
        print(f"  {row.image:45s} expected={row.expected:4s} got={mark}{tag}")
