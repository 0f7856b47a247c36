import numpy as np
import pytest

from diagramcheck.config import ThresholdConfig
from diagramcheck.detect import (detect_filled_dots, detect_radial_peaks,
                                 find_contours, hough_circles, hough_lines,
                                 radial_profile)
from diagramcheck.errors import VertexOutOfBounds
from diagramcheck.image import BinaryMask, to_grayscale
from diagramcheck.primitives import HoughCircleParams
from diagramcheck.render import INK, Canvas, direction_vector

from conftest import empty_mask, fg_mask

CFG = ThresholdConfig()
LINE_DEFAULTS = dict(vote_threshold=60, min_len=max(80.0, 0.12 * 1024),
                     max_gap=10.0, seed=42)


class TestContours:
    def test_empty_mask(self):
        assert find_contours(empty_mask(), 0) == []

    def test_filled_square_area(self):
        c = Canvas(400, 300)
        c.fill_rect(49.5, 59.5, 149.5, 159.5, INK)  # covers 100x100 pixels
        polys = find_contours(fg_mask(c), 1000)
        assert len(polys) == 1
        assert abs(polys[0].area - 10000) / 10000 <= 0.02

    def test_min_area_gate(self):
        c = Canvas(200, 200)
        c.fill_rect(49.5, 49.5, 69.5, 69.5, INK)  # 400 px^2
        assert find_contours(fg_mask(c), 1000) == []
        assert len(find_contours(fg_mask(c), 100)) == 1

    def test_order_is_descending_area(self):
        c = Canvas(300, 300)
        c.fill_rect(19.5, 19.5, 59.5, 59.5, INK)     # 1600
        c.fill_rect(99.5, 99.5, 219.5, 219.5, INK)   # 14400
        polys = find_contours(fg_mask(c), 10)
        assert [p.area for p in polys] == sorted((p.area for p in polys),
                                                 reverse=True)

    def test_rectangle_area_within_5pct_down_to_20px(self):
        for a, b in ((20, 20), (25, 40), (33, 21)):
            c = Canvas(200, 200)
            c.fill_rect(49.5, 49.5, 49.5 + a, 49.5 + b, INK)
            poly = find_contours(fg_mask(c), 10)[0]
            assert abs(poly.area - a * b) / (a * b) <= 0.05


class TestHoughLines:
    def test_empty_mask(self):
        assert hough_lines(empty_mask(1024, 1024), **LINE_DEFAULTS) == []

    def test_horizontal_line_recovered(self):
        c = Canvas(1024, 1024)
        c.stroke_segment((300, 512), (700, 512), 3, INK)
        segs = hough_lines(fg_mask(c), **LINE_DEFAULTS)
        assert segs
        assert min(segs[0].angle, 180 - segs[0].angle) <= 1.0
        assert segs[0].length >= 380

    def test_short_line_gated(self):
        c = Canvas(1024, 1024)
        c.stroke_segment((500, 512), (560, 512), 3, INK)  # length 60 < 122
        assert hough_lines(fg_mask(c), **LINE_DEFAULTS) == []

    @pytest.mark.parametrize("theta", range(0, 180, 15))
    def test_angle_recovery_within_2deg(self, theta):
        c = Canvas(1024, 1024)
        ux, uy = direction_vector(theta)
        c.stroke_segment((512 - 200 * ux, 512 - 200 * uy),
                         (512 + 200 * ux, 512 + 200 * uy), 3, INK)
        segs = hough_lines(fg_mask(c), **LINE_DEFAULTS)
        assert segs
        diff = abs(segs[0].angle - theta) % 180
        assert min(diff, 180 - diff) <= 2.0

    def test_seeded_determinism(self):
        c = Canvas(1024, 1024)
        c.stroke_segment((200, 300), (800, 700), 3, INK)
        mask = fg_mask(c)
        a = hough_lines(mask, **LINE_DEFAULTS)
        b = hough_lines(mask, **LINE_DEFAULTS)
        assert a == b


class TestHoughCircles:
    def test_empty_mask(self):
        assert hough_circles(empty_mask(1024, 1024), CFG.venn_circle) == []

    @pytest.mark.parametrize("radius", [90, 150, 300])
    def test_circle_recovery_within_3px(self, radius):
        c = Canvas(1024, 1024)
        c.stroke_circle((512, 512), radius, 3, INK)
        found = hough_circles(fg_mask(c), CFG.venn_circle)
        assert found
        best = found[0]
        assert abs(best.center[0] - 512) <= 3 and abs(best.center[1] - 512) <= 3
        assert abs(best.radius - radius) <= 3

    def test_min_radius_gate(self):
        c = Canvas(1024, 1024)
        c.stroke_circle((512, 512), 60, 3, INK)
        assert hough_circles(fg_mask(c), CFG.venn_circle) == []  # 60 < 80


class TestRadialProfile:
    def test_empty_mask_all_zero(self):
        resp = radial_profile(empty_mask(256, 256), (128, 128), 60)
        assert resp.shape == (360,) and not resp.any()

    def test_single_ray_at_90(self):
        c = Canvas(1024, 1024)
        ux, uy = direction_vector(90)
        c.stroke_segment((512, 512), (512 + 300 * ux, 512 + 300 * uy), 3, INK)
        resp = radial_profile(fg_mask(c), (512, 512), 200)
        peak = int(np.argmax(resp))
        assert min(abs(peak - 90), 360 - abs(peak - 90)) <= 1

    def test_full_disk_nearly_uniform(self):
        c = Canvas(512, 512)
        c.fill_disk((256, 256), 220, INK)
        resp = radial_profile(fg_mask(c), (256, 256), 150)
        assert resp.max() / resp.min() <= 1.2

    def test_vertex_out_of_bounds(self):
        with pytest.raises(VertexOutOfBounds):
            radial_profile(empty_mask(), (200, 10), 20)


class TestRadialPeaks:
    def test_all_zero_response(self):
        assert detect_radial_peaks(np.zeros(360), 100) == []

    def _peaks_for(self, directions, probe=358):
        c = Canvas(1024, 1024)
        for d in directions:
            ux, uy = direction_vector(d)
            c.stroke_segment((512, 512), (512 + 300 * ux, 512 + 300 * uy), 3, INK)
        resp = radial_profile(fg_mask(c), (512, 512), probe)
        return detect_radial_peaks(resp, probe)

    def test_two_rays_at_0_and_70(self):
        peaks = self._peaks_for((0, 70))
        assert len(peaks) == 2
        assert abs(peaks[0].direction - 0) <= 1 or peaks[0].direction >= 359
        assert abs(peaks[1].direction - 70) <= 1

    def test_nearby_rays_merge_into_one(self):
        assert len(self._peaks_for((0, 5))) == 1  # separation below 10°

    @pytest.mark.parametrize("delta", [13.0, 90.0, 241.0])
    def test_rotation_equivariance(self, delta):
        base = (15.0, 105.0, 230.0)
        ref = [p.direction for p in self._peaks_for(base)]
        rot = [p.direction for p in self._peaks_for(tuple((b + delta) % 360
                                                          for b in base))]
        assert len(ref) == len(rot) == len(base)
        want = sorted((r + delta) % 360 for r in ref)
        got = sorted(rot)
        for a, b in zip(want, got):
            d = abs(a - b) % 360
            assert min(d, 360 - d) <= 1.0


class TestFilledDots:
    def test_blank_image(self):
        c = Canvas(1024, 1024)
        assert detect_filled_dots(to_grayscale(c.to_image())) == []

    def test_three_filled_dots(self):
        c = Canvas(1024, 1024)
        centers = [(200, 300), (400, 300), (600, 300)]
        for p in centers:
            c.fill_disk(p, 8, INK)
        dots = detect_filled_dots(to_grayscale(c.to_image()))
        assert len(dots) == 3
        got = sorted(d.center for d in dots)
        for (gx, gy), (wx, wy) in zip(got, centers):
            assert abs(gx - wx) <= 2 and abs(gy - wy) <= 2
        assert all(d.fill_ratio >= 0.68 for d in dots)

    def test_outline_circle_rejected(self):
        c = Canvas(1024, 1024)
        c.stroke_circle((400, 400), 8, 2, INK)
        assert detect_filled_dots(to_grayscale(c.to_image())) == []
