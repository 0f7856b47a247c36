"""Robust curve checking on a cluttered plot of y = 2x + 1."""

from diagramcheck import ThresholdConfig, evaluate
from diagramcheck.constraints import ConstraintSpec, CurveMatches
from diagramcheck.scenes import FunctionPlot, render

scene = FunctionPlot(scene_id="demo-fn", relation="2*x+1",
                     x_domain=(-4.0, 4.0), clutter_frac=0.20)
img, spec = render(scene)
cfg = ThresholdConfig()

verdict = evaluate(img, spec, cfg)
measured = verdict.criterion_results[0].measured
print(f"true relation 2*x+1 -> passed={verdict.passed}")
print(f"  inlier fraction {measured['inlier_fraction']}, "
      f"mean residual {measured['mean_residual']}")
print(f"  robust line fit: slope={measured['fit_params'][0]}, "
      f"intercept={measured['fit_params'][1]}")

wrong = ConstraintSpec("demo-fn-wrong", "function",
                       (CurveMatches("x^2", (-3.0, 3.0)),))
verdict = evaluate(img, wrong, cfg)
print(f"\nwrong relation x^2 -> passed={verdict.passed} "
      f"({verdict.criterion_results[0].diagnostic})")
