"""Image loading, color-space handling, thresholding, and morphology."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import InvalidKernel, UnreadableFile, UnsupportedFormat

_ACCEPTED_FORMATS = {"PNG", "JPEG"}


@dataclass(frozen=True)
class RasterImage:
    """Owned pixel grid; ``data`` is a read-only uint8 array.

    Grayscale images store shape (H, W), RGB images (H, W, 3). Pixels are
    taken at face value as sRGB bytes; no color management is applied.
    """

    width: int
    height: int
    channels: str  # "gray" | "rgb"
    data: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be positive")
        if self.channels not in ("gray", "rgb"):
            raise ValueError(f"unknown channel layout {self.channels!r}")
        expected = (self.height, self.width) if self.channels == "gray" \
            else (self.height, self.width, 3)
        if self.data.shape != expected or self.data.dtype != np.uint8:
            raise ValueError(f"data shape {self.data.shape} does not match "
                             f"{self.width}x{self.height} {self.channels}")
        self.data.setflags(write=False)

    @classmethod
    def from_array(cls, data: np.ndarray) -> "RasterImage":
        data = np.ascontiguousarray(data, dtype=np.uint8)
        if data.ndim == 2:
            return cls(data.shape[1], data.shape[0], "gray", data)
        if data.ndim == 3 and data.shape[2] == 3:
            return cls(data.shape[1], data.shape[0], "rgb", data)
        raise ValueError("expected (H, W) or (H, W, 3) array")


@dataclass(frozen=True)
class BinaryMask:
    """Boolean foreground map with the dimensions of its source image."""

    width: int
    height: int
    bits: np.ndarray

    def __post_init__(self):
        if self.bits.shape != (self.height, self.width) or self.bits.dtype != np.bool_:
            raise ValueError("bits must be a bool array of shape (height, width)")
        self.bits.setflags(write=False)

    @classmethod
    def from_array(cls, bits: np.ndarray) -> "BinaryMask":
        bits = np.ascontiguousarray(bits, dtype=np.bool_)
        return cls(bits.shape[1], bits.shape[0], bits)

    def count(self) -> int:
        return int(np.count_nonzero(self.bits))

    def as_u8(self) -> np.ndarray:
        return self.bits.astype(np.uint8) * 255


def load_image(path: str | Path) -> RasterImage:
    """Decode a PNG or JPEG file without any implicit resize."""
    path = Path(path)
    if not path.is_file():
        raise UnreadableFile(f"no such file: {path}")
    try:
        with Image.open(path) as img:
            fmt = img.format
            if fmt not in _ACCEPTED_FORMATS:
                raise UnsupportedFormat(f"{path}: format {fmt} not accepted (PNG/JPEG only)")
            if img.mode == "L":
                arr = np.asarray(img, dtype=np.uint8)
            else:
                arr = np.asarray(img.convert("RGB"), dtype=np.uint8)
    except UnsupportedFormat:
        raise
    except UnidentifiedImageError as exc:
        raise UnreadableFile(f"{path}: cannot identify image") from exc
    except OSError as exc:
        raise UnreadableFile(f"{path}: {exc}") from exc
    return RasterImage.from_array(arr)


def to_grayscale(img: RasterImage) -> RasterImage:
    """Rec.601 luma, computed in exact integer arithmetic; idempotent on gray."""
    if img.channels == "gray":
        return img
    rgb = img.data.astype(np.uint32)
    luma = (299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2] + 500) // 1000
    return RasterImage.from_array(luma.astype(np.uint8))


def to_hsv(img: RasterImage) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Hexcone HSV: hue in [0, 360) degrees, saturation and value in [0, 1].

    Achromatic pixels take hue 0.
    """
    if img.channels != "rgb":
        raise ValueError("to_hsv needs an rgb image")
    rgb = img.data.astype(np.float64) / 255.0
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    cmax = np.max(rgb, axis=-1)
    cmin = np.min(rgb, axis=-1)
    delta = cmax - cmin

    hue = np.zeros_like(cmax)
    chromatic = delta > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        rr = np.where(chromatic & (cmax == r), ((g - b) / delta) % 6.0, 0.0)
        gg = np.where(chromatic & (cmax == g) & (cmax != r), (b - r) / delta + 2.0, 0.0)
        bb = np.where(chromatic & (cmax == b) & (cmax != r) & (cmax != g),
                      (r - g) / delta + 4.0, 0.0)
    hue = (rr + gg + bb) * 60.0
    hue = np.where(chromatic, hue % 360.0, 0.0)

    sat = np.where(cmax > 0, delta / np.where(cmax > 0, cmax, 1.0), 0.0)
    return hue, sat, cmax


def threshold_foreground(gray: RasterImage, thresh: int, darker_is_fg: bool) -> BinaryMask:
    """Foreground by strict comparison: ``< thresh`` when dark is foreground.

    Anti-aliased fringe at the threshold boundary therefore counts as
    background.
    """
    if gray.channels != "gray":
        raise ValueError("threshold_foreground needs a grayscale image")
    if darker_is_fg:
        bits = gray.data < thresh
    else:
        bits = gray.data >= thresh
    return BinaryMask.from_array(bits)


def check_white_background(gray: RasterImage) -> bool:
    """True iff every pixel in the border band reads as white.

    Band width is max(1, floor(0.08 * min(H, W))); the white cutoff is 240.
    """
    if gray.channels != "gray":
        raise ValueError("check_white_background needs a grayscale image")
    h, w = gray.height, gray.width
    band = max(1, int(0.08 * min(h, w)))
    d = gray.data
    edges = [d[:band, :], d[-band:, :], d[:, :band], d[:, -band:]]
    return all(int(e.min()) >= 240 for e in edges if e.size)


def morph(mask: BinaryMask, op: str, kernel: tuple[int, int]) -> BinaryMask:
    """Rectangular opening or closing.

    cv2's border handling keeps opening anti-extensive and closing extensive
    at the image edges, which the mask-inclusion invariants rely on.
    """
    kx, ky = kernel
    if kx < 1 or ky < 1 or kx % 2 == 0 or ky % 2 == 0:
        raise InvalidKernel(f"kernel {kernel} must be odd and positive")
    if op not in ("open", "close"):
        raise ValueError(f"unknown morphology op {op!r}")
    element = cv2.getStructuringElement(cv2.MORPH_RECT, (kx, ky))
    code = cv2.MORPH_OPEN if op == "open" else cv2.MORPH_CLOSE
    out = cv2.morphologyEx(mask.as_u8(), code, element)
    return BinaryMask.from_array(out > 0)
