import json
from pathlib import Path

import pytest

from detector_sidecar import (AnnotationBackend, ModelLoadError, SidecarConfig,
                              detect_dir)

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def emitted(tmp_path_factory):
    out = tmp_path_factory.mktemp("detections")
    cfg = SidecarConfig()
    backend = AnnotationBackend(FIXTURES / "annotations")
    written = detect_dir(FIXTURES / "images", cfg, out, backend=backend)
    return out, written


class TestEmission:
    def test_one_file_per_image(self, emitted):
        out, written = emitted
        images = list((FIXTURES / "images").glob("*.png"))
        assert len(written) == len(images) == 5

    def test_raw_scores_kept_below_floor(self, emitted):
        out, _ = emitted
        data = json.loads((out / "apples_3.json").read_text())
        scores = [d["confidence"] for d in data["detections"]]
        assert 0.30 in scores  # filtering is the verifier's job

    def test_blank_image_has_no_detections(self, emitted):
        out, _ = emitted
        data = json.loads((out / "blank.json").read_text())
        assert data["detections"] == []

    def test_meta_records_preprocessing(self, emitted):
        out, _ = emitted
        data = json.loads((out / "apples_3.json").read_text())
        assert "preprocessing" in data["_meta"]

    def test_determinism(self, emitted, tmp_path):
        out, _ = emitted
        cfg = SidecarConfig()
        backend = AnnotationBackend(FIXTURES / "annotations")
        detect_dir(FIXTURES / "images", cfg, tmp_path, backend=backend)
        for path in sorted(out.glob("*.json")):
            assert path.read_bytes() == (tmp_path / path.name).read_bytes()

    def test_unreadable_image_yields_empty_set(self, tmp_path):
        images = tmp_path / "imgs"
        images.mkdir()
        (images / "broken.png").write_bytes(b"\x89PNG\r\n\x1a\n_not_an_image")
        out = tmp_path / "out"
        written = detect_dir(images, SidecarConfig(), out,
                             backend=AnnotationBackend(tmp_path))
        assert len(written) == 1
        data = json.loads(written[0].read_text())
        assert data["detections"] == []

    def test_category_map_renames_labels(self, tmp_path):
        cfg = SidecarConfig(category_map={"apfel": "apple"})
        out = tmp_path / "out"
        detect_dir(FIXTURES / "images", cfg, out,
                   backend=AnnotationBackend(FIXTURES / "annotations"))
        data = json.loads((out / "apples_3.json").read_text())
        cats = {d["category"] for d in data["detections"]}
        assert "apfel" in cats and "apple" not in cats


class TestModelBackend:
    def test_bad_model_id_raises_model_load_error(self):
        with pytest.raises(ModelLoadError):
            from detector_sidecar.sidecar import RtDetrBackend
            RtDetrBackend(SidecarConfig(model_id="nonexistent/not-a-model"))

    def test_real_checkpoint_if_obtainable(self):
        from detector_sidecar.sidecar import RtDetrBackend
        try:
            backend = RtDetrBackend(SidecarConfig())
        except ModelLoadError:
            pytest.skip("RT-DETR weights not obtainable in this environment")
        from PIL import Image
        dets = backend.infer(Image.new("RGB", (320, 320), (255, 255, 255)))
        assert isinstance(dets, list)


class TestCli:
    def test_detect_with_annotations(self, tmp_path, capsys):
        from detector_sidecar.cli import main
        code = main(["detect", "--images", str(FIXTURES / "images"),
                     "--out", str(tmp_path), "--annotations",
                     str(FIXTURES / "annotations")])
        assert code == 0
        assert len(list(tmp_path.glob("*.json"))) == 5

    def test_model_load_error_exit_code(self, tmp_path):
        from detector_sidecar.cli import main
        images = tmp_path / "imgs"
        images.mkdir()
        code = main(["detect", "--images", str(images), "--out",
                     str(tmp_path / "out"), "--model", "nonexistent/nope"])
        assert code == 1
