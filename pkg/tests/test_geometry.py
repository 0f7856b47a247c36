import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diagramcheck.errors import (BadTopology, CollinearOverlap,
                                 DegeneratePolygon, DegenerateSegment,
                                 EmptyWhole, TooFewRays)
from diagramcheck.geometry import (area_ratio, canonical_region_label,
                                   is_opposite_pair, region_occupancy,
                                   sector_angles, segment_intersection,
                                   shape_metrics, venn_layout)
from diagramcheck.image import BinaryMask
from diagramcheck.detect import find_contours
from diagramcheck.primitives import CircleShape, LineSegment, RadialPeak
from diagramcheck.render import INK, Canvas

from conftest import fg_mask


def peak(direction):
    return RadialPeak(direction, 100.0, 0.5)


class TestSectorAngles:
    def test_two_rays(self):
        sectors = [s.degrees for s in sector_angles([peak(0), peak(70)])]
        assert sorted(sectors) == [70.0, 290.0]

    def test_four_right_angles(self):
        sectors = [s.degrees for s in sector_angles(
            [peak(d) for d in (0, 90, 180, 270)])]
        assert sectors == [90.0, 90.0, 90.0, 90.0]

    def test_three_rays_hand_computed(self):
        sectors = [s.degrees for s in sector_angles(
            [peak(10), peak(50), peak(170)])]
        assert sorted(sectors) == [40.0, 120.0, 200.0]

    def test_single_ray_rejected(self):
        with pytest.raises(TooFewRays):
            sector_angles([peak(10)])

    @given(st.lists(st.floats(0, 359.999), min_size=2, max_size=8, unique=True))
    @settings(max_examples=100, deadline=None)
    def test_sector_sum_is_360(self, dirs):
        sectors = sector_angles([peak(d) for d in dirs])
        assert sum(s.degrees for s in sectors) == pytest.approx(360.0, abs=1e-6)


class TestOppositePair:
    @pytest.mark.parametrize("a,b,tol,want", [
        (0, 180, 10, True),
        (0, 171, 10, True),   # deviation 9
        (0, 168, 10, False),  # deviation 12
    ])
    def test_examples(self, a, b, tol, want):
        assert is_opposite_pair(a, b, tol) is want

    @given(a=st.floats(-720, 720), b=st.floats(-720, 720),
           k=st.integers(-3, 3), tol=st.floats(0.1, 30))
    @settings(max_examples=100, deadline=None)
    def test_symmetry_and_periodicity(self, a, b, k, tol):
        assert is_opposite_pair(a, b, tol) == is_opposite_pair(b, a, tol)
        assert is_opposite_pair(a, b, tol) == is_opposite_pair(a + 360 * k, b, tol)


def seg(x0, y0, x1, y1):
    return LineSegment((float(x0), float(y0)), (float(x1), float(y1)))


class TestSegmentIntersection:
    def test_symmetric_cross(self):
        pt = segment_intersection(seg(0, 0, 10, 10), seg(0, 10, 10, 0))
        assert pt == pytest.approx((5.0, 5.0))

    def test_parallel_horizontals(self):
        assert segment_intersection(seg(0, 0, 10, 0), seg(0, 5, 10, 5)) is None

    def test_disjoint_collinear(self):
        assert segment_intersection(seg(0, 0, 4, 0), seg(6, 0, 9, 0)) is None

    def test_collinear_overlap_is_error(self):
        with pytest.raises(CollinearOverlap):
            segment_intersection(seg(0, 0, 5, 0), seg(3, 0, 8, 0))

    def test_zero_length_segment_rejected(self):
        with pytest.raises(DegenerateSegment):
            segment_intersection(seg(1, 1, 1, 1), seg(0, 0, 5, 5))

    @staticmethod
    def _sampled_min_distance(a, b) -> float:
        """Min distance between two sampled segments at 1e4-point density.

        d(t, u) is convex, so a coarse grid plus one local refinement at the
        full sampling density finds the global minimum.
        """
        def points(ends, t):
            return np.outer(1 - t, ends[:2]) + np.outer(t, ends[2:])

        coarse = np.linspace(0.0, 1.0, 101)
        p = points(a, coarse)
        q = points(b, coarse)
        d2 = ((p[:, None, :] - q[None, :, :]) ** 2).sum(-1)
        i, j = np.unravel_index(np.argmin(d2), d2.shape)
        window = 2.0 / 100.0
        fine_t = np.linspace(max(0.0, coarse[i] - window),
                             min(1.0, coarse[i] + window), 400)
        fine_u = np.linspace(max(0.0, coarse[j] - window),
                             min(1.0, coarse[j] + window), 400)
        p = points(a, fine_t)
        q = points(b, fine_u)
        d2 = ((p[:, None, :] - q[None, :, :]) ** 2).sum(-1)
        return float(np.sqrt(d2.min()))

    def test_agreement_with_dense_sampling_oracle(self):
        # the oracle is unambiguous when the minimum pairwise distance is
        # clearly zero or clearly positive; the in-between band is sampling
        # noise, not solver behaviour
        rng = np.random.default_rng(2024)
        checked = 0
        for _ in range(1000):
            a = rng.uniform(0, 100, 4)
            b = rng.uniform(0, 100, 4)
            try:
                got = segment_intersection(seg(*a), seg(*b))
            except (DegenerateSegment, CollinearOverlap):
                continue
            dmin = self._sampled_min_distance(a, b)
            if dmin < 0.02:
                assert got is not None
                checked += 1
            elif dmin > 0.5:
                assert got is None
                checked += 1
        assert checked > 800  # the ambiguous band is rare


class TestVennLayout:
    def test_two_circle_layout(self):
        circles = [CircleShape((422, 512), 150), CircleShape((602, 512), 150)]
        layout = venn_layout(circles, (1024, 1024))
        assert set(layout.region_masks) == {"A_only", "B_only", "A∩B", "outside"}
        assert layout.region_masks["A∩B"].count() > 0
        total = sum(m.count() for m in layout.region_masks.values())
        assert total == 1024 * 1024

    def test_brute_force_membership_oracle(self):
        circles = [CircleShape((40, 50), 30), CircleShape((70, 50), 28)]
        layout = venn_layout(circles, (120, 100))
        for y in range(0, 100, 7):
            for x in range(0, 120, 7):
                in_a = (x - 40) ** 2 + (y - 50) ** 2 <= 30 ** 2
                in_b = (x - 70) ** 2 + (y - 50) ** 2 <= 28 ** 2
                label = {(True, False): "A_only", (False, True): "B_only",
                         (True, True): "A∩B", (False, False): "outside"}[(in_a, in_b)]
                assert layout.region_masks[label].bits[y, x]

    def test_concentric_is_bad_topology(self):
        with pytest.raises(BadTopology):
            venn_layout([CircleShape((100, 100), 80),
                         CircleShape((100, 100), 40)], (256, 256))

    def test_disjoint_is_bad_topology(self):
        with pytest.raises(BadTopology):
            venn_layout([CircleShape((100, 300), 150),
                         CircleShape((500, 300), 150)], (1024, 1024))

    def test_three_circles_give_eight_regions(self):
        circles = [CircleShape((243, 275), 128), CircleShape((320, 408), 128),
                   CircleShape((397, 275), 128)]
        layout = venn_layout(circles, (640, 640))
        assert len(layout.region_masks) == 8
        assert sum(m.count() for m in layout.region_masks.values()) == 640 * 640


class TestRegionLabels:
    @pytest.mark.parametrize("raw,want", [
        ("A_only", "A_only"), ("A&B", "A∩B"), ("AnB", "A∩B"),
        ("A∩B∩C", "A∩B∩C"), ("outside", "outside"),
    ])
    def test_normalization(self, raw, want):
        assert canonical_region_label(raw) == want

    def test_unknown_label(self):
        with pytest.raises(ValueError):
            canonical_region_label("D_only")


def _layout_2c():
    return venn_layout([CircleShape((200, 250), 120),
                        CircleShape((330, 250), 120)], (520, 500))


class TestOccupancy:
    def test_empty_color_mask(self):
        layout = _layout_2c()
        empty = BinaryMask.from_array(np.zeros((500, 520), dtype=bool))
        assert all(r.fraction == 0.0 for r in region_occupancy(layout, empty))

    def test_exact_region_identity(self):
        layout = _layout_2c()
        color = BinaryMask.from_array(layout.region_masks["A∩B"].bits.copy())
        by_label = {r.region: r.fraction for r in region_occupancy(layout, color)}
        assert by_label["A∩B"] == 1.0
        assert by_label["A_only"] == 0.0 and by_label["B_only"] == 0.0

    def test_seeded_subsample_fraction(self):
        layout = _layout_2c()
        region = layout.region_masks["A_only"].bits
        ys, xs = np.nonzero(region)
        take = np.random.default_rng(5).random(len(xs)) < 0.30
        color = np.zeros_like(region)
        color[ys[take], xs[take]] = True
        by_label = {r.region: r.fraction
                    for r in region_occupancy(layout, BinaryMask.from_array(color))}
        assert by_label["A_only"] == pytest.approx(0.30, abs=0.02)

    def test_monotone_in_color_mask(self):
        layout = _layout_2c()
        rng = np.random.default_rng(9)
        small = rng.random((500, 520)) < 0.2
        big = small | (rng.random((500, 520)) < 0.2)
        fr_small = {r.region: r.fraction for r in region_occupancy(
            layout, BinaryMask.from_array(small))}
        fr_big = {r.region: r.fraction for r in region_occupancy(
            layout, BinaryMask.from_array(big))}
        assert all(fr_big[k] >= fr_small[k] for k in fr_small)


class TestAreaRatio:
    def test_identity(self):
        bits = np.random.default_rng(1).random((30, 30)) < 0.5
        mask = BinaryMask.from_array(bits)
        assert area_ratio(mask, mask) == 1.0

    def test_empty_part(self):
        whole = BinaryMask.from_array(np.ones((10, 10), dtype=bool))
        empty = BinaryMask.from_array(np.zeros((10, 10), dtype=bool))
        assert area_ratio(empty, whole) == 0.0

    def test_empty_whole_rejected(self):
        empty = BinaryMask.from_array(np.zeros((10, 10), dtype=bool))
        with pytest.raises(EmptyWhole):
            area_ratio(empty, empty)

    def test_five_of_eight_grid_cells(self):
        whole = np.zeros((100, 400), dtype=bool)
        whole[10:90, 0:320] = True  # 8 cells of 40x80
        part = np.zeros_like(whole)
        part[10:90, 0:200] = True   # 5 cells
        got = area_ratio(BinaryMask.from_array(part),
                         BinaryMask.from_array(whole))
        assert got == pytest.approx(0.625, abs=0.01)


class TestShapeMetrics:
    def _poly_for(self, draw):
        c = Canvas(640, 640)
        draw(c)
        return find_contours(fg_mask(c), 100)[0]

    def test_rectangle_aspect(self):
        poly = self._poly_for(lambda c: c.fill_rect(120, 220, 320, 320, INK))
        aspect, _, _ = shape_metrics(poly)
        assert aspect == pytest.approx(2.0, abs=0.05)

    def test_square_circularity(self):
        poly = self._poly_for(lambda c: c.fill_rect(200, 200, 400, 400, INK))
        aspect, _, circ = shape_metrics(poly)
        assert aspect == pytest.approx(1.0, abs=0.05)
        assert circ == pytest.approx(math.pi / 4, abs=0.03)

    def test_circle_circularity(self):
        poly = self._poly_for(lambda c: c.fill_disk((320, 320), 150, INK))
        _, _, circ = shape_metrics(poly)
        assert circ >= 0.9

    def test_degenerate_rejected(self):
        from diagramcheck.primitives import ContourPoly
        with pytest.raises(DegeneratePolygon):
            shape_metrics(ContourPoly(((0, 0), (5, 0), (5, 0.0)), 0.0))
