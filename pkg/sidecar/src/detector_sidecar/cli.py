"""CLI: detect --images <dir> --out <dir> [--model <id>] [--device cpu|gpu]."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .sidecar import (AnnotationBackend, ModelLoadError, SidecarConfig,
                      detect_dir)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="detector-sidecar")
    sub = parser.add_subparsers(dest="command", required=True)
    det = sub.add_parser("detect", help="emit detection files for a directory")
    det.add_argument("--images", required=True)
    det.add_argument("--out", required=True)
    det.add_argument("--model", default="PekingU/rtdetr_r50vd")
    det.add_argument("--device", choices=("cpu", "gpu"), default="cpu")
    det.add_argument("--category-map", default=None,
                     help="JSON file mapping prompt nouns to detector labels")
    det.add_argument("--annotations", default=None,
                     help="replay hand-labelled boxes instead of running the "
                          "model")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    category_map = {}
    if args.category_map:
        with open(args.category_map, encoding="utf-8") as fh:
            category_map = json.load(fh)
    cfg = SidecarConfig(model_id=args.model, category_map=category_map,
                        device="cuda" if args.device == "gpu" else "cpu")

    backend = AnnotationBackend(args.annotations) if args.annotations else None
    try:
        written = detect_dir(args.images, cfg, args.out, backend=backend)
    except ModelLoadError as exc:
        print(f"model load failed: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(written)} detection files to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
