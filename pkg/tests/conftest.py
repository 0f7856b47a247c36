import numpy as np
import pytest

from diagramcheck.config import ThresholdConfig
from diagramcheck.image import BinaryMask, RasterImage, threshold_foreground, to_grayscale
from diagramcheck.render import Canvas


@pytest.fixture(scope="session")
def cfg():
    return ThresholdConfig()


@pytest.fixture
def white_canvas():
    def make(width=1024, height=1024):
        return Canvas(width, height)
    return make


def fg_mask(canvas: Canvas, thresh: int = 200) -> BinaryMask:
    return threshold_foreground(to_grayscale(canvas.to_image()), thresh, True)


def gray_image(values) -> RasterImage:
    return RasterImage.from_array(np.asarray(values, dtype=np.uint8))


def empty_mask(width=64, height=64) -> BinaryMask:
    return BinaryMask.from_array(np.zeros((height, width), dtype=bool))
