"""Verify sector-angle constraints against a rendered angle."""

from diagramcheck import ThresholdConfig, evaluate
from diagramcheck.constraints import ConstraintSpec, RayCount, SectorEquals
from diagramcheck.scenes import AngleFan, render

# drawn: two rays 70 degrees apart
fan = AngleFan(scene_id="demo-angle", directions=(10.0, 80.0),
               target_sector=70.0, check_ray_count=True)
img, spec = render(fan)

verdict = evaluate(img, spec, ThresholdConfig())
print(f"verdict for the drawn 70-degree angle: passed={verdict.passed}")
for r in verdict.criterion_results:
    print(f"  {r.criterion.kind}: {r.passed} ({r.diagnostic})")

# the same image against a wrong claim
wrong = ConstraintSpec("demo-angle-wrong", "angle",
                       (SectorEquals(110.0), RayCount(3)))
verdict = evaluate(img, wrong, ThresholdConfig())
print(f"\nverdict for the wrong claim (110 degrees, 3 rays): "
      f"passed={verdict.passed}")
for r in verdict.criterion_results:
    print(f"  {r.criterion.kind}: {r.passed} ({r.diagnostic})")
