"""Render the fixture images from the hand-written annotation files.

The annotations are the ground truth; each labelled box becomes a colored
blob so a human eyeballing the image counts the same objects. blank.png has
no annotation file and no objects.
"""

import json
from pathlib import Path

from PIL import Image, ImageDraw

COLORS = {"apple": (200, 40, 40), "pear": (110, 170, 60),
          "banana": (230, 200, 50)}

HERE = Path(__file__).parent


def main():
    out = HERE / "images"
    out.mkdir(exist_ok=True)
    for ann_path in sorted((HERE / "annotations").glob("*.json")):
        data = json.loads(ann_path.read_text(encoding="utf-8"))
        img = Image.new("RGB", (320, 320), (255, 255, 255))
        draw = ImageDraw.Draw(img)
        for obj in data["objects"]:
            if obj["score"] < 0.45:
                continue  # the faint decoy stays invisible on purpose
            x, y, w, h = obj["bbox"]
            draw.ellipse((x, y, x + w, y + h),
                         fill=COLORS.get(obj["label"], (90, 90, 90)))
        img.save(out / f"{ann_path.stem}.png")
    Image.new("RGB", (320, 320), (255, 255, 255)).save(out / "blank.png")
    print(f"fixture images written to {out}")


if __name__ == "__main__":
    main()
