"""Off-catalog parameterizations: the evaluators must not be tuned to the
default audit scenes."""

import pytest

from diagramcheck.config import ThresholdConfig
from diagramcheck.evaluate import evaluate
from diagramcheck.scenes import (AngleFan, CrossSegments, DotsRing,
                                 FractionGrid, FunctionPlot, RegularPolygon,
                                 VennScene, WireframeSolid, render)

CFG = ThresholdConfig()

PROBES = [
    AngleFan(scene_id="a_sw5", directions=(12.0, 82.0), target_sector=70.0,
             stroke_width=5.0),
    AngleFan(scene_id="a_sw7", directions=(12.0, 82.0), target_sector=70.0,
             stroke_width=7.0),
    AngleFan(scene_id="a_short", directions=(40.0, 150.0),
             target_sector=110.0, ray_len_frac=0.22),
    AngleFan(scene_id="a_wide_canvas", directions=(5.0, 185.0),
             check_opposite=True, canvas=(900, 700)),
    FractionGrid(scene_id="f_odd", cells=5, shaded=2, cell_px=80,
                 canvas=(800, 600)),
    FractionGrid(scene_id="f_dark", cells=3, shaded=2, color=None,
                 cell_px=100, canvas=(800, 640)),
    VennScene(scene_id="v_thick", fills=(("B_only", 1.0),),
              expect_on=("B_only",), expect_off=("A∩B",), canvas=(800, 800),
              stroke_width=5.0),
    VennScene(scene_id="v3_big", n_circles=3, fills=(("A∩C", 1.0),),
              expect_on=("A∩C",), expect_off=("B_only",), canvas=(900, 900)),
    DotsRing(scene_id="d_5", n_dots=5, ring_frac=0.26, dot_r=7.0,
             canvas=(768, 768)),
    RegularPolygon(scene_id="p_rot", n_sides=6, rotation_deg=17.0),
    RegularPolygon(scene_id="p_oct", n_sides=8, circ_frac=0.36),
    CrossSegments(scene_id="x_thick",
                  segments=(((150, 150), (520, 510)), ((150, 510), (520, 150))),
                  stroke_width=6.0),
    WireframeSolid(scene_id="s_thick", solid="cube", stroke_width=5.0,
                   size_frac=0.26),
    WireframeSolid(scene_id="s_tetra", solid="tetra", size_frac=0.28),
    FunctionPlot(scene_id="fn_neg", relation="-x+2", x_domain=(-5.0, 5.0),
                 px_per_unit=38.0),
    FunctionPlot(scene_id="fn_shifted_parabola", relation="x^2-4",
                 x_domain=(-3.0, 3.0)),
    FunctionPlot(scene_id="fn_abs_clutter", relation="abs(x)-3",
                 clutter_frac=0.15, rng_seed=99),
]


@pytest.mark.parametrize("recipe", PROBES, ids=lambda r: r.scene_id)
def test_probe_passes_its_own_spec(recipe):
    img, spec = render(recipe)
    verdict = evaluate(img, spec, CFG, recipe.detections())
    failed = [f"{r.criterion.kind}: {r.diagnostic}"
              for r in verdict.criterion_results if not r.passed]
    assert verdict.passed, failed
