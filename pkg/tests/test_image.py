import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from diagramcheck.errors import InvalidKernel, UnreadableFile, UnsupportedFormat
from diagramcheck.image import (BinaryMask, RasterImage, check_white_background,
                                load_image, morph, threshold_foreground,
                                to_grayscale, to_hsv)

from conftest import empty_mask, gray_image


class TestLoadImage:
    def test_png_dimensions_preserved(self, tmp_path):
        arr = np.full((1024, 1024, 3), 255, dtype=np.uint8)
        path = tmp_path / "img.png"
        Image.fromarray(arr).save(path)
        img = load_image(path)
        assert (img.width, img.height) == (1024, 1024)

    def test_one_pixel_white_png(self, tmp_path):
        path = tmp_path / "one.png"
        Image.fromarray(np.full((1, 1, 3), 255, np.uint8)).save(path)
        img = load_image(path)
        assert (img.width, img.height, img.channels) == (1, 1, "rgb")
        assert img.data.flatten().tolist() == [255, 255, 255]

    def test_jpeg_accepted(self, tmp_path):
        path = tmp_path / "img.jpg"
        Image.fromarray(np.full((16, 16, 3), 128, np.uint8)).save(path, "JPEG")
        assert load_image(path).channels == "rgb"

    def test_truncated_file_unreadable(self, tmp_path):
        path = tmp_path / "broken.png"
        full = tmp_path / "full.png"
        Image.fromarray(np.zeros((64, 64), np.uint8)).save(full)
        path.write_bytes(full.read_bytes()[:40])
        with pytest.raises(UnreadableFile):
            load_image(path)

    def test_missing_file_unreadable(self, tmp_path):
        with pytest.raises(UnreadableFile):
            load_image(tmp_path / "nope.png")

    def test_non_png_jpeg_rejected(self, tmp_path):
        path = tmp_path / "img.bmp"
        Image.fromarray(np.zeros((8, 8), np.uint8)).save(path, "BMP")
        with pytest.raises(UnsupportedFormat):
            load_image(path)


class TestGrayscale:
    def test_pure_red_luma(self):
        # 0.299 * 255 = 76.245 -> 76
        img = RasterImage.from_array(np.tile([255, 0, 0], (2, 2, 1)))
        assert to_grayscale(img).data[0, 0] == 76

    def test_white_maps_to_255(self):
        img = RasterImage.from_array(np.full((2, 2, 3), 255, np.uint8))
        assert int(to_grayscale(img).data.min()) == 255

    def test_idempotent_on_gray(self):
        img = gray_image(np.arange(16, dtype=np.uint8).reshape(4, 4))
        assert to_grayscale(img) is img

    def test_matches_float_formula(self):
        rng = np.random.default_rng(3)
        rgb = rng.integers(0, 256, size=(20, 20, 3), dtype=np.uint8)
        got = to_grayscale(RasterImage.from_array(rgb)).data
        want = np.floor(0.299 * rgb[..., 0] + 0.587 * rgb[..., 1]
                        + 0.114 * rgb[..., 2] + 0.5)
        assert np.abs(got.astype(float) - want).max() <= 1e-9


class TestHsv:
    def test_primary_red(self):
        hue, sat, val = to_hsv(RasterImage.from_array(np.tile([255, 0, 0], (1, 1, 1))))
        assert (hue[0, 0], sat[0, 0], val[0, 0]) == (0.0, 1.0, 1.0)

    def test_achromatic_gray(self):
        hue, sat, val = to_hsv(RasterImage.from_array(np.tile([128, 128, 128], (1, 1, 1))))
        assert hue[0, 0] == 0.0 and sat[0, 0] == 0.0
        assert val[0, 0] == pytest.approx(128 / 255, abs=1e-9)

    def test_primary_blue(self):
        hue, sat, val = to_hsv(RasterImage.from_array(np.tile([0, 0, 255], (1, 1, 1))))
        assert (hue[0, 0], sat[0, 0], val[0, 0]) == (240.0, 1.0, 1.0)


class TestThreshold:
    def test_all_white_gives_empty_mask(self):
        mask = threshold_foreground(gray_image(np.full((8, 8), 255)), 200, True)
        assert mask.count() == 0

    def test_single_dark_pixel(self):
        data = np.full((8, 8), 255, np.uint8)
        data[3, 5] = 0
        mask = threshold_foreground(gray_image(data), 200, True)
        assert mask.count() == 1 and bool(mask.bits[3, 5])

    def test_mid_gray_field_fully_foreground(self):
        mask = threshold_foreground(gray_image(np.full((8, 8), 128)), 200, True)
        assert mask.count() == 64

    @given(t1=st.integers(0, 255), t2=st.integers(0, 255), seed=st.integers(0, 999))
    @settings(max_examples=40, deadline=None)
    def test_monotone_in_threshold(self, t1, t2, seed):
        if t1 > t2:
            t1, t2 = t2, t1
        data = np.random.default_rng(seed).integers(0, 256, (16, 16)).astype(np.uint8)
        low = threshold_foreground(gray_image(data), t1, True)
        high = threshold_foreground(gray_image(data), t2, True)
        assert not (low.bits & ~high.bits).any()


class TestWhiteBackground:
    def test_uniform_white(self):
        assert check_white_background(gray_image(np.full((64, 64), 255)))

    def test_239_pixel_inside_band_fails(self):
        # band width floor(0.08 * 1024) = 81, so (5, 5) is inside it
        data = np.full((1024, 1024), 255, np.uint8)
        data[5, 5] = 239
        assert not check_white_background(gray_image(data))

    def test_dark_center_outside_band_passes(self):
        data = np.full((1024, 1024), 255, np.uint8)
        data[512, 512] = 0
        assert check_white_background(gray_image(data))

    def test_band_width_matches_brute_force(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            h, w = int(rng.integers(10, 80)), int(rng.integers(10, 80))
            data = np.full((h, w), 255, np.uint8)
            y, x = int(rng.integers(0, h)), int(rng.integers(0, w))
            data[y, x] = 100
            band = max(1, int(0.08 * min(h, w)))
            in_band = (y < band or y >= h - band or x < band or x >= w - band)
            assert check_white_background(gray_image(data)) == (not in_band)


class TestMorph:
    def test_open_removes_isolated_pixel(self):
        bits = np.zeros((32, 32), dtype=bool)
        bits[10, 10] = True
        out = morph(BinaryMask.from_array(bits), "open", (3, 3))
        assert out.count() == 0

    def test_open_preserves_solid_square(self):
        bits = np.zeros((80, 80), dtype=bool)
        bits[10:60, 10:60] = True
        out = morph(BinaryMask.from_array(bits), "open", (3, 3))
        assert out.count() == 50 * 50

    def test_empty_mask_stays_empty(self):
        for op in ("open", "close"):
            assert morph(empty_mask(), op, (5, 5)).count() == 0

    def test_even_kernel_rejected(self):
        with pytest.raises(InvalidKernel):
            morph(empty_mask(), "open", (4, 3))

    @given(seed=st.integers(0, 500),
           kernel=st.sampled_from([(3, 3), (5, 5), (15, 15)]))
    @settings(max_examples=30, deadline=None)
    def test_open_close_inclusion_chain(self, seed, kernel):
        bits = np.random.default_rng(seed).random((40, 40)) < 0.3
        mask = BinaryMask.from_array(bits)
        opened = morph(mask, "open", kernel)
        closed = morph(mask, "close", kernel)
        assert not (opened.bits & ~mask.bits).any()   # open(m) subset of m
        assert not (mask.bits & ~closed.bits).any()   # m subset of close(m)
