"""Region topology and red-occupancy checks on an overlap diagram."""

from diagramcheck import ThresholdConfig, evaluate
from diagramcheck.scenes import VennScene, render

scene = VennScene(scene_id="demo-venn",
                  fills=(("A∩B", 1.0),),
                  expect_on=("A∩B",),
                  expect_off=("A_only", "B_only"))
img, spec = render(scene)

verdict = evaluate(img, spec, ThresholdConfig())
result = verdict.criterion_results[0]
print(f"intersection filled red -> passed={verdict.passed}")
print("per-region occupancy:")
for region, fraction in sorted(result.measured.items()):
    print(f"  {region:8s} {fraction:.3f}")
