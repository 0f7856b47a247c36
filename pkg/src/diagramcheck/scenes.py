"""Ground-truth scene recipes: positive renders and analytically violated
mutations.

Every recipe validates at construction that its parameters satisfy the
criteria it claims; every mutation checks that the mutated parameters violate
the original criteria by at least 1.5x the relevant default tolerance (exact
counts use a margin of one). Negatives therefore fail by construction, not by
luck.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .constraints import (AspectRatio, AsymptoteAt, BackgroundWhite,
                          ConstraintSpec, CountExact, Criterion, CurveMatches,
                          Detection, DetectionSet, DotsOnCircle,
                          FractionShaded, OppositeRays, PolygonSides,
                          RadiusRatio, RayCount, SectorEquals,
                          SegmentsIntersect, ShapeIsCircle, ShapeIsRectangle,
                          VennRegions)
from .errors import InapplicableMutation, InvalidRecipe
from .image import RasterImage
from .relations import parse_relation
from .render import DARK, INK, PALE, RED, Canvas, direction_vector

# default-ledger tolerances the mutation margins are sized against
_ANGLE_TOL = 12.0
_OPPOSITE_TOL = 10.0
_OCC_ON = 0.20
_OCC_OFF = 0.05
_MARGIN = 1.5


@dataclass(frozen=True)
class Mutation:
    """One analytic violation applied to a recipe."""

    kind: str  # perturb_angle | change_count | reshade_fraction |
    #            swap_region | reshape_curve | drop_primitive
    amount: float | None = None
    payload: str | None = None

    def describe(self) -> str:
        bits = [self.kind]
        if self.amount is not None:
            bits.append(f"{self.amount:g}")
        if self.payload is not None:
            bits.append(self.payload)
        return ":".join(bits)


@dataclass(frozen=True, kw_only=True)
class SceneRecipe:
    """Base recipe: canvas geometry plus the criteria the render satisfies."""

    scene_id: str
    canvas: tuple[int, int] = (640, 640)
    rng_seed: int = 7
    stroke_width: float = 3.0
    check_background: bool = False
    bg_level: int = 255

    domain = "plane"  # overridden

    def __post_init__(self):
        if self.stroke_width < 3.0:
            raise InvalidRecipe("stroke width below 3 px will not survive "
                                "anti-aliased thresholding")
        self.validate()

    # --- per-scene hooks ---

    def validate(self) -> None:
        pass

    def base_criteria(self) -> tuple[Criterion, ...]:
        raise NotImplementedError

    def draw(self, canvas: Canvas, rng: np.random.Generator) -> None:
        raise NotImplementedError

    def mutations(self) -> tuple[Mutation, ...]:
        raise NotImplementedError

    def apply_mutation(self, m: Mutation) -> "SceneRecipe":
        raise InapplicableMutation(f"{m.kind} does not apply to {type(self).__name__}")

    # --- shared machinery ---

    def criteria(self) -> tuple[Criterion, ...]:
        crits = self.base_criteria()
        if self.check_background:
            crits = crits + (BackgroundWhite(),)
        return crits

    def spec(self) -> ConstraintSpec:
        return ConstraintSpec(self.scene_id, self.domain, self.criteria())

    def render_image(self) -> RasterImage:
        canvas = Canvas(self.canvas[0], self.canvas[1], background=self.bg_level)
        self.draw(canvas, np.random.default_rng(self.rng_seed))
        return canvas.to_image()

    def center(self) -> tuple[float, float]:
        return (self.canvas[0] / 2.0, self.canvas[1] / 2.0)

    def detections(self) -> DetectionSet | None:
        return None


def render(recipe: SceneRecipe) -> tuple[RasterImage, ConstraintSpec]:
    """Deterministic positive render plus the spec it satisfies."""
    return recipe.render_image(), recipe.spec()


def mutate(recipe: SceneRecipe, m: Mutation) -> SceneRecipe:
    """Recipe whose render analytically violates ``recipe``'s criteria."""
    if m.kind == "reshade_fraction" and m.payload == "background":
        # dirty the border band; the white-background check fails by 10 levels
        if not recipe.check_background:
            raise InapplicableMutation("recipe does not check the background")
        return dataclasses.replace(recipe, bg_level=230,
                                   scene_id=recipe.scene_id + "~bg")
    mutated = recipe.apply_mutation(m)
    if mutated is recipe:
        raise InvalidRecipe("mutation produced an identical recipe")
    return mutated


def _replace(recipe, **changes):
    changes.setdefault("scene_id", recipe.scene_id + "~mut")
    return dataclasses.replace(recipe, **changes)


# --------------------------------------------------------------------------
# angle scenes
# --------------------------------------------------------------------------

@dataclass(frozen=True, kw_only=True)
class AngleFan(SceneRecipe):
    """Rays sharing one vertex; checks sectors, ray counts, opposition."""

    directions: tuple[float, ...]
    target_sector: float | None = None
    relaxed: bool = False
    check_ray_count: bool = False
    check_opposite: bool = False
    ray_len_frac: float = 0.30

    domain = "angle"

    def validate(self):
        if len(self.directions) < 2:
            raise InvalidRecipe("a fan needs at least two rays")
        dirs = sorted(d % 360.0 for d in self.directions)
        gaps = [(dirs[(i + 1) % len(dirs)] - dirs[i]) % 360.0
                for i in range(len(dirs))]
        if min(gaps) < 25.0:
            raise InvalidRecipe("rays closer than 25° are not reliably "
                                "separable at the 10° separation rule")
        if self.target_sector is not None:
            if not any(math.isclose(g, self.target_sector, abs_tol=0.01)
                       for g in gaps):
                raise InvalidRecipe(f"no sector of {dirs} equals "
                                    f"{self.target_sector}")
        if self.check_opposite:
            ok = any(abs(abs(a - b) % 360.0 - 180.0) <= 0.01
                     for i, a in enumerate(dirs) for b in dirs[i + 1:])
            if not ok:
                raise InvalidRecipe("no opposite ray pair present")

    def base_criteria(self):
        crits: list[Criterion] = []
        if self.target_sector is not None:
            crits.append(SectorEquals(self.target_sector, self.relaxed))
        if self.check_ray_count:
            crits.append(RayCount(len(self.directions)))
        if self.check_opposite:
            crits.append(OppositeRays())
        if not crits:
            raise InvalidRecipe("fan checks nothing")
        return tuple(crits)

    def draw(self, canvas, rng):
        vx, vy = self.center()
        length = self.ray_len_frac * min(self.canvas)
        for d in self.directions:
            ux, uy = direction_vector(d)
            canvas.stroke_segment((vx, vy), (vx + length * ux, vy + length * uy),
                                  self.stroke_width, INK)

    def _sector_tol(self) -> float:
        return _ANGLE_TOL + 8.0 if self.relaxed else _ANGLE_TOL

    def mutations(self):
        out = []
        if self.target_sector is not None or self.check_opposite:
            delta = math.ceil(_MARGIN * max(self._sector_tol(), _OPPOSITE_TOL)) + 2.0
            out.append(Mutation("perturb_angle", delta))
        if self.check_ray_count:
            if len(self.directions) >= 3:
                out.append(Mutation("change_count", -1))
            if len(self.directions) <= 5:
                out.append(Mutation("change_count", +1))
        return tuple(out)

    def apply_mutation(self, m):
        dirs = sorted(d % 360.0 for d in self.directions)
        if m.kind == "perturb_angle":
            delta = float(m.amount or 20.0)
            if abs(delta) < _MARGIN * max(self._sector_tol(), _OPPOSITE_TOL):
                raise InvalidRecipe(f"perturbation {delta} is inside the "
                                    "angle tolerance")
            # rotate the ray that closes the target sector; the mutated recipe
            # drops all claims (negatives pair its image with the ORIGINAL spec)
            moved = (dirs[-1] + delta) % 360.0
            new_dirs = tuple(dirs[:-1]) + (moved,)
            return _replace(self, directions=new_dirs, target_sector=None,
                            check_opposite=False, check_ray_count=False)
        if m.kind == "change_count":
            if not self.check_ray_count:
                raise InapplicableMutation("fan does not check ray count")
            delta = int(m.amount or -1)
            if delta < 0:
                new_dirs = tuple(dirs[: len(dirs) + delta])
                if len(new_dirs) < 2:
                    raise InvalidRecipe("cannot drop below two rays")
            else:
                # split the widest gap to squeeze in extra rays
                new_list = list(dirs)
                for _ in range(delta):
                    gaps = [((new_list[(i + 1) % len(new_list)] - new_list[i]) % 360.0, i)
                            for i in range(len(new_list))]
                    width, i = max(gaps)
                    if width / 2.0 < 25.0:
                        raise InvalidRecipe("no room to insert a separable ray")
                    new_list.append((new_list[i] + width / 2.0) % 360.0)
                    new_list.sort()
                new_dirs = tuple(new_list)
            return _replace(self, directions=new_dirs, target_sector=None,
                            check_opposite=False, check_ray_count=False)
        if m.kind == "drop_primitive":
            return self.apply_mutation(Mutation("change_count", -1))
        return super().apply_mutation(m)


# --------------------------------------------------------------------------
# counting scenes (image + mock detection file)
# --------------------------------------------------------------------------

@dataclass(frozen=True, kw_only=True)
class CountScene(SceneRecipe):
    """n target objects plus optional decoys below threshold / off-category."""

    category: str
    n: int
    decoy_low_conf: int = 1
    decoy_other: int = 1

    domain = "counting"

    def validate(self):
        if self.n < 0:
            raise InvalidRecipe("negative object count")

    def base_criteria(self):
        return (CountExact(self.category, self.n),)

    def _positions(self):
        w, h = self.canvas
        cols = max(1, int(math.ceil(math.sqrt(max(self.n, 1)))))
        out = []
        for i in range(self.n):
            r, c = divmod(i, cols)
            out.append((w * (0.25 + 0.5 * (c + 0.5) / cols),
                        h * (0.25 + 0.5 * (r + 0.5) / cols)))
        return out

    def draw(self, canvas, rng):
        for x, y in self._positions():
            canvas.fill_disk((x, y), 14, DARK)

    def detections(self) -> DetectionSet:
        dets = [Detection(self.category, 0.9, (x - 14, y - 14, 28, 28))
                for x, y in self._positions()]
        for i in range(self.decoy_low_conf):
            dets.append(Detection(self.category, 0.30, (10 + 30 * i, 10, 20, 20)))
        for i in range(self.decoy_other):
            dets.append(Detection("decoy_" + self.category, 0.9,
                                  (10 + 30 * i, 40, 20, 20)))
        return DetectionSet(self.scene_id + ".png", tuple(dets))

    def mutations(self):
        out = [Mutation("change_count", +1)]
        if self.n >= 1:
            out.append(Mutation("change_count", -1))
        return tuple(out)

    def apply_mutation(self, m):
        if m.kind in ("change_count", "drop_primitive"):
            delta = int(m.amount or -1) if m.kind == "change_count" else -1
            if delta == 0:
                raise InvalidRecipe("count delta of zero does not violate "
                                    "the exact-count rule")
            new_n = self.n + delta
            if new_n < 0:
                raise InvalidRecipe("cannot remove objects below zero")
            return _replace(self, n=new_n)
        return super().apply_mutation(m)


# --------------------------------------------------------------------------
# fraction scenes
# --------------------------------------------------------------------------

@dataclass(frozen=True, kw_only=True)
class FractionGrid(SceneRecipe):
    """Grid of equal cells with a subset shaded; pixel-exact ratio.

    Shaded cells use the target color (or a dark gray); unshaded cells use a
    pale tint that still reads as structure at the 240 threshold but not as
    shading at the 200 threshold.
    """

    cells: int
    shaded: int
    tol: float = 0.015
    color: str | None = "red"
    cell_px: int = 64

    domain = "fraction"

    def validate(self):
        if not 0 < self.shaded <= self.cells:
            raise InvalidRecipe("shaded cell count out of range")
        grid_w = self.cells * self.cell_px
        if grid_w > self.canvas[0] - 2 * int(0.08 * min(self.canvas)) - 20:
            raise InvalidRecipe("grid does not fit inside the border band")

    def base_criteria(self):
        return (FractionShaded(self.shaded / self.cells, self.tol, self.color),)

    def draw(self, canvas, rng):
        w, h = self.canvas
        grid_w = self.cells * self.cell_px
        grid_h = min(3 * self.cell_px, h - 2 * int(0.08 * min(w, h)) - 20)
        x0 = (w - grid_w) // 2
        y0 = (h - grid_h) // 2
        fill = RED if self.color == "red" else DARK
        mask = np.zeros((h, w), dtype=bool)
        for i in range(self.cells):
            mask[:] = False
            mask[y0:y0 + grid_h, x0 + i * self.cell_px:x0 + (i + 1) * self.cell_px] = True
            canvas.fill_pixels(mask, fill if i < self.shaded else PALE)

    def mutations(self):
        candidates = []
        for new in (self.shaded - 1, self.shaded + 1, self.shaded - 2, self.shaded + 2):
            if 1 <= new <= self.cells and \
                    abs(new - self.shaded) / self.cells > _MARGIN * self.tol:
                candidates.append(Mutation("reshade_fraction", new))
                if len(candidates) == 2:
                    break
        return tuple(candidates)

    def apply_mutation(self, m):
        if m.kind == "reshade_fraction":
            new = int(m.amount)
            if abs(new - self.shaded) / self.cells <= _MARGIN * self.tol:
                raise InvalidRecipe("reshade does not clear the ratio tolerance")
            return _replace(self, shaded=new)
        return super().apply_mutation(m)


@dataclass(frozen=True, kw_only=True)
class RectShape(SceneRecipe):
    """Solid rectangle; checks aspect ratio and/or rectangle-ness."""

    rect_w: int = 300
    rect_h: int = 150
    tol: float = 0.08
    check_aspect: bool = True
    check_class: bool = False

    domain = "fraction"

    def validate(self):
        if min(self.rect_w, self.rect_h) < 40:
            raise InvalidRecipe("rectangle too small to survive morphology")

    def _aspect(self) -> float:
        return max(self.rect_w, self.rect_h) / min(self.rect_w, self.rect_h)

    def base_criteria(self):
        crits: list[Criterion] = []
        if self.check_aspect:
            crits.append(AspectRatio(self._aspect(), self.tol))
        if self.check_class:
            crits.append(ShapeIsRectangle())
        return tuple(crits)

    def draw(self, canvas, rng):
        cx, cy = self.center()
        canvas.fill_rect(cx - self.rect_w / 2, cy - self.rect_h / 2,
                         cx + self.rect_w / 2, cy + self.rect_h / 2, DARK)

    def mutations(self):
        out = []
        if self.check_aspect:
            out.append(Mutation("reshade_fraction", round(self._aspect() + 0.6, 3)))
        if self.check_class:
            out.append(Mutation("reshape_curve", payload="circle"))
        return tuple(out)

    def apply_mutation(self, m):
        if m.kind == "reshade_fraction" and self.check_aspect:
            new_aspect = float(m.amount)
            if abs(new_aspect - self._aspect()) <= _MARGIN * self.tol:
                raise InvalidRecipe("aspect change inside tolerance")
            new_w = int(round(self.rect_h * new_aspect))
            return _replace(self, rect_w=new_w)
        if m.kind == "reshape_curve" and self.check_class:
            r = min(self.rect_w, self.rect_h) // 2 + 40
            return CircleShapeScene(scene_id=self.scene_id + "~circle",
                                    canvas=self.canvas, radius=r)
        return super().apply_mutation(m)


@dataclass(frozen=True, kw_only=True)
class CircleShapeScene(SceneRecipe):
    """Solid disk for shape-class checks."""

    radius: int = 160

    domain = "fraction"

    def base_criteria(self):
        return (ShapeIsCircle(),)

    def draw(self, canvas, rng):
        canvas.fill_disk(self.center(), self.radius, DARK)

    def mutations(self):
        return (Mutation("reshape_curve", payload="rectangle"),)

    def apply_mutation(self, m):
        if m.kind == "reshape_curve":
            return RectShape(scene_id=self.scene_id + "~rect", canvas=self.canvas,
                             rect_w=2 * self.radius, rect_h=self.radius,
                             check_aspect=False, check_class=False)
        return super().apply_mutation(m)


@dataclass(frozen=True, kw_only=True)
class TwoCircles(SceneRecipe):
    """Two separated circles with a fixed radius ratio."""

    r_small: int = 90
    r_big: int = 180
    tol: float = 0.10

    domain = "fraction"

    def validate(self):
        w, h = self.canvas
        if self.r_small + self.r_big + 120 > w - 2 * int(0.08 * min(w, h)):
            raise InvalidRecipe("circles do not fit side by side")

    def base_criteria(self):
        return (RadiusRatio(self.r_big / self.r_small, self.tol),)

    def draw(self, canvas, rng):
        w, h = self.canvas
        cy = h / 2
        canvas.stroke_circle((self.r_big + int(0.08 * min(w, h)) + 20, cy),
                             self.r_big, self.stroke_width + 1, INK)
        canvas.stroke_circle((w - self.r_small - int(0.08 * min(w, h)) - 40, cy),
                             self.r_small, self.stroke_width + 1, INK)

    def mutations(self):
        return (Mutation("reshade_fraction",
                         round(self.r_big / self.r_small + 0.7, 3)),)

    def apply_mutation(self, m):
        if m.kind == "reshade_fraction":
            new_ratio = float(m.amount)
            if abs(new_ratio - self.r_big / self.r_small) <= _MARGIN * self.tol:
                raise InvalidRecipe("ratio change inside tolerance")
            return _replace(self, r_big=int(round(self.r_small * new_ratio)))
        return super().apply_mutation(m)


# --------------------------------------------------------------------------
# set scenes
# --------------------------------------------------------------------------

def _venn_circles(n: int, canvas: tuple[int, int]):
    w, h = canvas
    cx, cy = w / 2.0, h / 2.0
    m = min(w, h)
    if n == 2:
        r = 0.22 * m
        d = 0.60 * r
        return [(cx - d, cy, r), (cx + d, cy, r)]
    r = 0.20 * m
    return [(cx - 0.60 * r, cy - 0.35 * r, r),
            (cx, cy + 0.69 * r, r),
            (cx + 0.60 * r, cy - 0.35 * r, r)]


def _venn_region_masks(circles, canvas: tuple[int, int]):
    """Analytic per-pixel region membership (pixel centers on the integer
    grid), labels ordered by circle center x like the detection side."""
    w, h = canvas
    ordered = sorted(circles, key=lambda c: (c[0], c[1]))
    ys, xs = np.mgrid[0:h, 0:w]
    inside = [(xs - cx) ** 2 + (ys - cy) ** 2 <= r * r for cx, cy, r in ordered]
    if len(ordered) == 2:
        a, b = inside
        return {"A_only": a & ~b, "B_only": b & ~a, "A∩B": a & b}
    a, b, c = inside
    return {"A_only": a & ~b & ~c, "B_only": b & ~a & ~c, "C_only": c & ~a & ~b,
            "A∩B": a & b & ~c, "A∩C": a & c & ~b, "B∩C": b & c & ~a,
            "A∩B∩C": a & b & c}


@dataclass(frozen=True, kw_only=True)
class VennScene(SceneRecipe):
    """Overlap diagram with exact-fraction region fills."""

    n_circles: int = 2
    fills: tuple[tuple[str, float], ...] = ()  # (region label, fill fraction)
    expect_on: tuple[str, ...] = ()
    expect_off: tuple[str, ...] = ()

    domain = "set"

    def validate(self):
        if self.n_circles not in (2, 3):
            raise InvalidRecipe("2 or 3 circles only")
        labels = set(_venn_region_masks(_venn_circles(self.n_circles, self.canvas),
                                        self.canvas))
        filled = dict(self.fills)
        for region in (*self.expect_on, *self.expect_off,
                       *(r for r, _ in self.fills)):
            if region not in labels:
                raise InvalidRecipe(f"region {region!r} not in a "
                                    f"{self.n_circles}-circle diagram")
        for region in self.expect_on:
            if filled.get(region, 0.0) < 1.25 * _OCC_ON:
                raise InvalidRecipe(f"{region} must be filled well above the "
                                    "on-threshold")
        for region in self.expect_off:
            if filled.get(region, 0.0) > 0.75 * _OCC_OFF:
                raise InvalidRecipe(f"{region} fill too close to the "
                                    "off-threshold")

    def base_criteria(self):
        return (VennRegions(self.expect_on, self.expect_off, self.n_circles),)

    def draw(self, canvas, rng):
        circles = _venn_circles(self.n_circles, self.canvas)
        masks = _venn_region_masks(circles, self.canvas)
        for region, frac in self.fills:
            mask = masks[region]
            total = int(mask.sum())
            want = int(round(frac * total))
            if want >= total:
                canvas.fill_pixels(mask, RED)
                continue
            ys, xs = np.nonzero(mask)
            cx, cy = xs.mean(), ys.mean()
            order = np.argsort((xs - cx) ** 2 + (ys - cy) ** 2, kind="stable")
            blob = np.zeros_like(mask)
            blob[ys[order[:want]], xs[order[:want]]] = True
            canvas.fill_pixels(blob, RED)
        for cx, cy, r in circles:
            canvas.stroke_circle((cx, cy), r, self.stroke_width + 1, INK)

    def mutations(self):
        out = []
        filled = {r for r, f in self.fills if f > 0.5}
        unfilled_off = [r for r in self.expect_off if r not in filled]
        if filled and unfilled_off:
            out.append(Mutation("swap_region", payload=unfilled_off[0]))
        if self.expect_on:
            out.append(Mutation("reshade_fraction", 0.10))
        out.append(Mutation("drop_primitive"))
        return tuple(out)

    def apply_mutation(self, m):
        if m.kind == "swap_region":
            # move the fill into a region that must stay empty
            target = m.payload or (self.expect_off[0] if self.expect_off else None)
            if target is None:
                raise InapplicableMutation("no off-region to swap into")
            filled = [r for r, f in self.fills if f > 0.5]
            if not filled:
                raise InapplicableMutation("no full region fill to swap")
            new_fills = tuple((target if r == filled[0] else r, f)
                              for r, f in self.fills)
            return _replace(self, fills=new_fills, expect_on=(), expect_off=())
        if m.kind == "reshade_fraction":
            frac = float(m.amount if m.amount is not None else 0.10)
            if not (_OCC_OFF * _MARGIN <= frac <= _OCC_ON / _MARGIN):
                raise InvalidRecipe("reshade fraction must land between the "
                                    "occupancy gates with margin")
            if not self.expect_on:
                raise InapplicableMutation("no on-region to underfill")
            target = self.expect_on[0]
            new_fills = tuple((r, frac if r == target else f)
                              for r, f in self.fills)
            return _replace(self, fills=new_fills, expect_on=(), expect_off=())
        if m.kind == "drop_primitive":
            if self.n_circles != 2:
                # drop to two circles; keep only 2-circle-legal fills
                fills = tuple((r, f) for r, f in self.fills
                              if r in ("A_only", "B_only", "A∩B"))
                return _replace(self, n_circles=2, fills=fills,
                                expect_on=(), expect_off=())
            # draw a single circle instead: circle count will not match
            return _SingleCircle(scene_id=self.scene_id + "~one",
                                 canvas=self.canvas)
        return super().apply_mutation(m)


@dataclass(frozen=True, kw_only=True)
class _SingleCircle(SceneRecipe):
    """Degenerate negative: one circle where a diagram expects two."""

    domain = "set"

    def base_criteria(self):
        return ()

    def draw(self, canvas, rng):
        canvas.stroke_circle(self.center(), 0.22 * min(self.canvas),
                             self.stroke_width + 1, INK)

    def mutations(self):
        return ()


# --------------------------------------------------------------------------
# function scenes
# --------------------------------------------------------------------------

@dataclass(frozen=True, kw_only=True)
class FunctionPlot(SceneRecipe):
    """Axes plus one plotted relation, with optional salt-and-pepper clutter.

    The axes span 20 math units, matching the evaluator's uncalibrated
    convention, so the recovered frame agrees with the drawing frame.
    """

    relation: str
    canvas: tuple[int, int] = (1024, 1024)  # limbs of steep curves need room
    x_domain: tuple[float, float] = (-5.0, 5.0)
    px_per_unit: float = 42.0
    clutter_frac: float = 0.0
    y_clip: float = 9.5
    check_curve: bool = True
    tol_curve: float = 0.6
    asymptote: tuple[str, float, float] | None = None

    domain = "function"

    def validate(self):
        try:
            parse_relation(self.relation)
        except Exception as exc:
            raise InvalidRecipe(f"bad relation: {exc}") from exc
        half = 10.0 * self.px_per_unit
        w, h = self.canvas
        margin = int(0.08 * min(w, h)) + 6
        if half > min(w, h) / 2.0 - margin:
            raise InvalidRecipe("axes would cross into the border band")
        if not (-10.0 <= self.x_domain[0] < self.x_domain[1] <= 10.0):
            raise InvalidRecipe("relation domain must fit on the axes")

    def base_criteria(self):
        crits: list[Criterion] = []
        if self.check_curve:
            crits.append(CurveMatches(self.relation, self.x_domain))
        if self.asymptote is not None:
            axis, value, tol = self.asymptote
            crits.append(AsymptoteAt(axis, value, tol))
        return tuple(crits)

    def _frame(self):
        w, h = self.canvas
        return (w / 2.0, h / 2.0)

    def draw(self, canvas, rng):
        ox, oy = self._frame()
        ppu = self.px_per_unit
        half = 10.0 * ppu
        canvas.stroke_segment((ox - half, oy), (ox + half, oy),
                              self.stroke_width, INK)
        canvas.stroke_segment((ox, oy - half), (ox, oy + half),
                              self.stroke_width, INK)

        rel = parse_relation(self.relation)
        step = 0.8 / ppu
        xs = np.arange(self.x_domain[0], self.x_domain[1] + step / 2, step)
        ys = rel(xs)
        px = ox + xs * ppu
        py = oy - ys * ppu
        good = np.isfinite(ys) & (np.abs(ys) <= self.y_clip)
        arc_len = 0.0
        for i in range(len(xs) - 1):
            if not (good[i] and good[i + 1]):
                continue
            if abs(py[i + 1] - py[i]) > 6.0 * self.stroke_width:
                continue  # pole jump: separate branches
            canvas.stroke_segment((px[i], py[i]), (px[i + 1], py[i + 1]),
                                  self.stroke_width, INK)
            arc_len += math.hypot(px[i + 1] - px[i], py[i + 1] - py[i])

        if self.clutter_frac > 0:
            dot_r = 2.2
            n = int(self.clutter_frac * arc_len * self.stroke_width
                    / (math.pi * dot_r * dot_r))
            lo_x, hi_x = ox - half + 10, ox + half - 10
            lo_y, hi_y = oy - half + 10, oy + half - 10
            for _ in range(n):
                canvas.fill_disk((rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)),
                                 dot_r, INK)

    def mutations(self):
        out = []
        if self.check_curve:
            out.append(Mutation("reshape_curve", payload=_off_relation(self.relation)))
        if self.asymptote is not None:
            axis, value, tol = self.asymptote
            payload, new_value = _off_asymptote(self.relation)
            out.append(Mutation("reshape_curve", amount=new_value, payload=payload))
        return tuple(out)

    def apply_mutation(self, m):
        if m.kind == "reshape_curve":
            new_relation = m.payload
            if new_relation is None:
                raise InapplicableMutation("reshape needs a replacement relation")
            if self.check_curve:
                _assert_relations_differ(self.relation, new_relation,
                                         self.x_domain, self.tol_curve)
            if self.asymptote is not None and m.amount is not None:
                axis, value, tol = self.asymptote
                if abs(float(m.amount) - value) <= _MARGIN * tol:
                    raise InvalidRecipe("asymptote shift inside tolerance")
            return _replace(self, relation=new_relation, check_curve=False,
                            asymptote=None)
        return super().apply_mutation(m)


def _off_relation(relation: str) -> str:
    """A drawn replacement that misses the target curve by far more than the
    final tolerance everywhere reasonable."""
    if relation.strip() == "x^2":
        return "2*x+1"
    return "x^2" if "x^2" not in relation else "-x+2"


def _off_asymptote(relation: str) -> tuple[str, float]:
    if relation.strip() == "1/x":
        return "1/(x-2)", 2.0
    if relation.strip() == "1/(x-2)":
        return "1/x", 0.0
    if relation.strip() == "1/x+3":
        return "1/x-3", -3.0
    return "1/(x-3)", 3.0


def _assert_relations_differ(old: str, new: str, domain, tol: float):
    f = parse_relation(old)
    g = parse_relation(new)
    xs = np.linspace(domain[0], domain[1], 400)
    diff = np.abs(f(xs) - g(xs))
    diff = diff[np.isfinite(diff)]
    if diff.size == 0 or float(np.mean(np.minimum(diff, 50.0))) <= _MARGIN * tol:
        raise InvalidRecipe(f"{new!r} is not analytically distinct from {old!r}")


# --------------------------------------------------------------------------
# plane scenes
# --------------------------------------------------------------------------

@dataclass(frozen=True, kw_only=True)
class DotsRing(SceneRecipe):
    """Markers evenly spaced on a circle's rim."""

    n_dots: int = 4
    ring_frac: float = 0.30
    dot_r: float = 6.0
    phase_deg: float = 20.0

    domain = "plane"

    def validate(self):
        m = min(self.canvas)
        ring_r = self.ring_frac * m
        if self.n_dots >= 2:
            chord = 2.0 * ring_r * math.sin(math.pi / self.n_dots)
            if chord < 0.03 * m + 2 * self.dot_r + 4:
                raise InvalidRecipe("markers too close for the spacing rule")
        if not (0.0025 * m + 0.5 <= self.dot_r <= 0.014 * m - 0.5):
            raise InvalidRecipe("marker radius outside the detectable band")

    def base_criteria(self):
        return (DotsOnCircle(self.n_dots),)

    def draw(self, canvas, rng):
        cx, cy = self.center()
        ring_r = self.ring_frac * min(self.canvas)
        canvas.stroke_circle((cx, cy), ring_r, self.stroke_width, INK)
        for k in range(self.n_dots):
            ux, uy = direction_vector(self.phase_deg + 360.0 * k / self.n_dots)
            canvas.fill_disk((cx + ring_r * ux, cy + ring_r * uy), self.dot_r, INK)

    def mutations(self):
        out = [Mutation("change_count", +1)]
        if self.n_dots > 2:
            out.append(Mutation("change_count", -1))
        return tuple(out)

    def apply_mutation(self, m):
        if m.kind in ("change_count", "drop_primitive"):
            delta = int(m.amount or -1) if m.kind == "change_count" else -1
            return _replace(self, n_dots=self.n_dots + delta)
        return super().apply_mutation(m)


def _seg_cross_count(segments, merge_px: float = 5.0) -> int:
    """Analytic crossing count used to validate recipes (independent of the
    detection-side intersection code)."""
    pts = []
    for i in range(len(segments)):
        for j in range(i + 1, len(segments)):
            (ax, ay), (bx, by) = segments[i]
            (cx, cy), (dx, dy) = segments[j]
            r = (bx - ax, by - ay)
            s = (dx - cx, dy - cy)
            den = r[0] * s[1] - r[1] * s[0]
            if abs(den) < 1e-9:
                continue
            t = ((cx - ax) * s[1] - (cy - ay) * s[0]) / den
            u = ((cx - ax) * r[1] - (cy - ay) * r[0]) / den
            if 0 <= t <= 1 and 0 <= u <= 1:
                pts.append((ax + t * r[0], ay + t * r[1]))
    merged: list[tuple[float, float]] = []
    for x, y in pts:
        if all(math.hypot(x - mx, y - my) > merge_px for mx, my in merged):
            merged.append((x, y))
    return len(merged)


@dataclass(frozen=True, kw_only=True)
class CrossSegments(SceneRecipe):
    """A handful of long segments with a known number of crossing points."""

    segments: tuple[tuple[tuple[float, float], tuple[float, float]], ...]

    domain = "plane"

    def validate(self):
        if len(self.segments) < 2:
            raise InvalidRecipe("need at least two segments")
        m = min(self.canvas)
        for (x0, y0), (x1, y1) in self.segments:
            if math.hypot(x1 - x0, y1 - y0) < max(80.0, 0.12 * m) + 20:
                raise InvalidRecipe("segment too short for the line detector")

    def n_crossings(self) -> int:
        return _seg_cross_count(self.segments)

    def base_criteria(self):
        return (SegmentsIntersect(self.n_crossings()),)

    def draw(self, canvas, rng):
        for p0, p1 in self.segments:
            canvas.stroke_segment(p0, p1, self.stroke_width, INK)

    def mutations(self):
        if len(self.segments) >= 3:
            return (Mutation("drop_primitive", 0),)
        return (Mutation("perturb_angle"),)

    def apply_mutation(self, m):
        if m.kind == "drop_primitive":
            idx = int(m.amount or 0)
            rest = tuple(s for i, s in enumerate(self.segments) if i != idx)
            if len(rest) < 2:
                raise InvalidRecipe("cannot drop below two segments")
            if _seg_cross_count(rest) == self.n_crossings():
                raise InvalidRecipe("dropping that segment keeps the crossing "
                                    "count")
            return _replace(self, segments=rest)
        if m.kind == "perturb_angle":
            # make segment 0 parallel to segment 1: crossings disappear
            (ax, ay), (bx, by) = self.segments[0]
            (cx, cy), (dx, dy) = self.segments[1]
            mx, my = (ax + bx) / 2, (ay + by) / 2
            length = math.hypot(bx - ax, by - ay)
            ux, uy = dx - cx, dy - cy
            norm = math.hypot(ux, uy)
            ux, uy = ux / norm, uy / norm
            # offset sideways so the parallel pair stays apart
            nx, ny = -uy, ux
            off = 60.0
            moved = ((mx + off * nx - ux * length / 2, my + off * ny - uy * length / 2),
                     (mx + off * nx + ux * length / 2, my + off * ny + uy * length / 2))
            new_segments = (moved,) + self.segments[1:]
            if _seg_cross_count(new_segments) == self.n_crossings():
                raise InvalidRecipe("parallelizing kept the crossing count")
            return _replace(self, segments=new_segments)
        return super().apply_mutation(m)


@dataclass(frozen=True, kw_only=True)
class RegularPolygon(SceneRecipe):
    """Filled regular n-gon."""

    n_sides: int = 5
    circ_frac: float = 0.32
    rotation_deg: float = 90.0

    domain = "plane"

    def validate(self):
        if not 3 <= self.n_sides <= 10:
            raise InvalidRecipe("side count out of the reliable range")

    def base_criteria(self):
        return (PolygonSides(self.n_sides),)

    def _vertices(self):
        cx, cy = self.center()
        r = self.circ_frac * min(self.canvas)
        return [(cx + r * math.cos(math.radians(self.rotation_deg + 360.0 * k / self.n_sides)),
                 cy - r * math.sin(math.radians(self.rotation_deg + 360.0 * k / self.n_sides)))
                for k in range(self.n_sides)]

    def draw(self, canvas, rng):
        canvas.fill_polygon(self._vertices(), DARK)

    def mutations(self):
        out = [Mutation("change_count", +1)]
        if self.n_sides > 3:
            out.append(Mutation("change_count", -1))
        return tuple(out)

    def apply_mutation(self, m):
        if m.kind == "change_count":
            return _replace(self, n_sides=self.n_sides + int(m.amount or 1))
        return super().apply_mutation(m)


# --------------------------------------------------------------------------
# solid scenes
# --------------------------------------------------------------------------

_SOLID_SIDES = {"cube": 6, "cuboid": 6, "tetra": 3}


@dataclass(frozen=True, kw_only=True)
class WireframeSolid(SceneRecipe):
    """Line drawing of a solid; the silhouette outline is the check target."""

    solid: str = "cube"
    size_frac: float = 0.30
    x_stretch: float = 1.0

    domain = "solid"

    def validate(self):
        if self.solid not in _SOLID_SIDES:
            raise InvalidRecipe(f"unknown solid {self.solid!r}")

    def base_criteria(self):
        return (PolygonSides(_SOLID_SIDES[self.solid]),)

    def _outline_and_spokes(self):
        cx, cy = self.center()
        r = self.size_frac * min(self.canvas)
        if self.solid == "tetra":
            angles = [90.0 + 120.0 * k for k in range(3)]
            spoke_angles = angles
        else:
            angles = [90.0 + 60.0 * k for k in range(6)]
            spoke_angles = [90.0 + 120.0 * k for k in range(3)]
        stretch = self.x_stretch if self.solid == "cuboid" else 1.0

        def pt(a):
            ux, uy = direction_vector(a)
            return (cx + r * ux * stretch, cy + r * uy)

        outline = [pt(a) for a in angles]
        spokes = [((cx, cy), pt(a)) for a in spoke_angles]
        return outline, spokes

    def draw(self, canvas, rng):
        outline, spokes = self._outline_and_spokes()
        canvas.stroke_polygon(outline, self.stroke_width, INK)
        for p0, p1 in spokes:
            canvas.stroke_segment(p0, p1, self.stroke_width, INK)

    def mutations(self):
        other = "tetra" if self.solid != "tetra" else "cube"
        return (Mutation("reshape_curve", payload=other),)

    def apply_mutation(self, m):
        if m.kind == "reshape_curve":
            other = m.payload or ("tetra" if self.solid != "tetra" else "cube")
            if _SOLID_SIDES[other] == _SOLID_SIDES[self.solid]:
                raise InvalidRecipe("replacement solid has the same silhouette")
            return _replace(self, solid=other)
        return super().apply_mutation(m)


# --------------------------------------------------------------------------
# default catalog
# --------------------------------------------------------------------------

def default_catalog() -> list[SceneRecipe]:
    """Scene list covering every criterion kind at least three times."""
    scenes: list[SceneRecipe] = []

    # angle: canonical sector targets, ray counts, opposition
    for target, base in ((40.0, 10.0), (70.0, 0.0), (110.0, 25.0), (180.0, 15.0)):
        scenes.append(AngleFan(scene_id=f"angle_sector_{int(target)}",
                               directions=(base, base + target),
                               target_sector=target,
                               check_background=(target == 70.0)))
    scenes.append(AngleFan(scene_id="angle_sector_relaxed_95",
                           directions=(0.0, 95.0), target_sector=95.0,
                           relaxed=True))
    for n, dirs in ((2, (30.0, 150.0)), (3, (10.0, 120.0, 230.0)),
                    (4, (15.0, 105.0, 195.0, 285.0))):
        scenes.append(AngleFan(scene_id=f"angle_rays_{n}", directions=dirs,
                               check_ray_count=True))
    for i, base in enumerate((0.0, 35.0, 125.0)):
        scenes.append(AngleFan(scene_id=f"angle_opposite_{i}",
                               directions=(base, base + 180.0),
                               check_opposite=True))

    # counting: mock detection fixtures
    for n in (2, 3, 5):
        scenes.append(CountScene(scene_id=f"count_apples_{n}", category="apple",
                                 n=n))
    scenes.append(CountScene(scene_id="count_pens_4", category="pen", n=4,
                             decoy_low_conf=2))

    # fraction: representative ratio targets
    for cells, shaded, color in ((7, 1, "red"), (9, 2, None), (2, 1, "red"),
                                 (8, 5, None), (6, 5, "red"), (4, 3, "red"),
                                 (12, 7, None)):
        cell_px = 64 if cells <= 8 else (48 if cells <= 9 else 40)
        scenes.append(FractionGrid(
            scene_id=f"fraction_{shaded}of{cells}", cells=cells, shaded=shaded,
            color=color, cell_px=cell_px, check_background=(cells == 8)))
    for i, (rw, rh) in enumerate(((300, 150), (360, 120), (280, 180))):
        scenes.append(RectShape(scene_id=f"fraction_aspect_{i}", rect_w=rw,
                                rect_h=rh))
    for i, (rs, rb) in enumerate(((90, 180), (95, 142), (85, 212))):
        scenes.append(TwoCircles(scene_id=f"fraction_radius_ratio_{i}",
                                 r_small=rs, r_big=rb))

    # set: overlap-region fills
    scenes.append(VennScene(scene_id="set_2c_inter", fills=(("A∩B", 1.0),),
                            expect_on=("A∩B",), expect_off=("A_only", "B_only")))
    scenes.append(VennScene(scene_id="set_2c_aonly", fills=(("A_only", 1.0),),
                            expect_on=("A_only",), expect_off=("A∩B", "B_only")))
    scenes.append(VennScene(scene_id="set_2c_union",
                            fills=(("A_only", 1.0), ("B_only", 1.0), ("A∩B", 1.0)),
                            expect_on=("A_only", "B_only", "A∩B"), expect_off=()))
    scenes.append(VennScene(scene_id="set_3c_center", n_circles=3,
                            fills=(("A∩B∩C", 1.0),), expect_on=("A∩B∩C",),
                            expect_off=("A_only", "B_only", "C_only")))
    scenes.append(VennScene(scene_id="set_3c_bonly", n_circles=3,
                            fills=(("B_only", 1.0),), expect_on=("B_only",),
                            expect_off=("A∩B", "B∩C", "A∩B∩C")))
    scenes.append(VennScene(scene_id="set_2c_partial",
                            fills=(("A∩B", 0.30), ("A_only", 0.03)),
                            expect_on=("A∩B",), expect_off=("A_only",)))
    scenes.append(VennScene(scene_id="set_3c_lens", n_circles=3,
                            fills=(("A∩B", 1.0),), expect_on=("A∩B",),
                            expect_off=("C_only", "A∩B∩C")))

    # function: curves and asymptotes
    scenes.append(FunctionPlot(scene_id="fn_line", relation="2*x+1",
                               x_domain=(-4.0, 4.0)))
    scenes.append(FunctionPlot(scene_id="fn_line_clutter", relation="2*x+1",
                               x_domain=(-4.0, 4.0), clutter_frac=0.20))
    scenes.append(FunctionPlot(scene_id="fn_parabola", relation="x^2",
                               x_domain=(-3.0, 3.0)))
    scenes.append(FunctionPlot(scene_id="fn_abs", relation="abs(x)-2",
                               x_domain=(-5.0, 5.0)))
    scenes.append(FunctionPlot(scene_id="fn_piecewise",
                               relation="piecewise((x+4, x<-1), (3, x<1), (-x+4, x>=1))",
                               x_domain=(-5.0, 5.0)))
    scenes.append(FunctionPlot(scene_id="fn_cubic", relation="x^3/8",
                               x_domain=(-4.0, 4.0)))
    scenes.append(FunctionPlot(scene_id="fn_recip", relation="1/x",
                               x_domain=(-5.0, 5.0),
                               asymptote=("vertical", 0.0, 0.3)))
    scenes.append(FunctionPlot(scene_id="fn_recip_shift", relation="1/(x-2)",
                               x_domain=(-4.0, 8.0), check_curve=False,
                               asymptote=("vertical", 2.0, 0.3)))
    scenes.append(FunctionPlot(scene_id="fn_recip_horiz", relation="1/x+3",
                               x_domain=(-5.0, 5.0), check_curve=False,
                               asymptote=("horizontal", 3.0, 0.3)))

    # plane: markers, crossings, polygons, shape classes
    for n in (3, 4, 5, 6):
        scenes.append(DotsRing(scene_id=f"plane_dots_{n}", n_dots=n,
                               check_background=(n == 4)))
    scenes.append(CrossSegments(scene_id="plane_x_1",
                                segments=(((140, 140), (500, 500)),
                                          ((140, 500), (500, 140)))))
    scenes.append(CrossSegments(scene_id="plane_triangle_3",
                                segments=(((120, 480), (520, 480)),
                                          ((140, 520), (380, 120)),
                                          ((260, 120), (510, 520)))))
    scenes.append(CrossSegments(scene_id="plane_parallel_2",
                                segments=(((130, 200), (510, 200)),
                                          ((130, 420), (510, 420)),
                                          ((300, 120), (340, 500)))))
    for n in (5, 6, 7):
        scenes.append(RegularPolygon(scene_id=f"plane_poly_{n}", n_sides=n))
    for i, r in enumerate((140, 160, 180)):
        scenes.append(CircleShapeScene(scene_id=f"plane_is_circle_{i}",
                                       radius=r))
    for i, (rw, rh) in enumerate(((260, 170), (300, 300), (340, 130))):
        scenes.append(RectShape(scene_id=f"plane_is_rect_{i}", rect_w=rw,
                                rect_h=rh, check_aspect=False, check_class=True))

    # solid: silhouette side counts
    scenes.append(WireframeSolid(scene_id="solid_cube", solid="cube"))
    scenes.append(WireframeSolid(scene_id="solid_tetra", solid="tetra",
                                 size_frac=0.34))
    scenes.append(WireframeSolid(scene_id="solid_cuboid", solid="cuboid",
                                 x_stretch=1.25, check_background=True))

    return scenes
