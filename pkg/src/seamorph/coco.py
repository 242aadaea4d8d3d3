"""COCO-style annotation ingest.

Accepted schema: a JSON object with ``images`` (id, file_name, width,
height), ``annotations`` (image_id, bbox as [x, y, w, h], category_id) and
``categories`` (id, name). Fractional bbox coordinates are floored to
integers on ingest; this is lossy and deliberate. Non-boat annotations are
retained on the SourceImage but excluded from preservation checking
downstream.
"""
from __future__ import annotations

import json
import logging
import math
from pathlib import Path

from .errors import MalformedAnnotation, MissingImage
from .types import BoundingBox, SourceImage

logger = logging.getLogger(__name__)


def load_source_dataset(annotation_file: Path, image_root: Path) -> list[SourceImage]:
    """Parse annotations and return SourceImages with validated in-image boxes.

    Raises MissingImage if a referenced file is absent and MalformedAnnotation
    on schema violations. Images with any out-of-bounds box are skipped with a
    warning naming the offending record.
    """
    annotation_file = Path(annotation_file)
    image_root = Path(image_root)
    try:
        with open(annotation_file, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise MalformedAnnotation(f"cannot read {annotation_file}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedAnnotation(f"{annotation_file} is not valid JSON: {exc}") from exc

    if not isinstance(data, dict):
        raise MalformedAnnotation("top-level annotation value must be an object")
    for key in ("images", "annotations", "categories"):
        if key not in data or not isinstance(data[key], list):
            raise MalformedAnnotation(f"missing or non-list {key!r} section")

    categories: dict[int, str] = {}
    for cat in data["categories"]:
        try:
            categories[int(cat["id"])] = str(cat["name"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedAnnotation(f"malformed category entry {cat!r}") from exc

    boxes_by_image: dict[int, list[tuple[BoundingBox, object]]] = {}
    for ann in data["annotations"]:
        try:
            image_id = int(ann["image_id"])
            bx, by, bw, bh = ann["bbox"]
            label = categories.get(int(ann["category_id"]), "unknown")
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedAnnotation(f"malformed annotation entry {ann!r}") from exc
        if bw <= 0 or bh <= 0:
            raise MalformedAnnotation(f"non-positive bbox dims in annotation {ann.get('id')!r}")
        box = BoundingBox(
            x=math.floor(bx),
            y=math.floor(by),
            w=max(1, math.floor(bw)),
            h=max(1, math.floor(bh)),
            class_label=label,
        )
        boxes_by_image.setdefault(image_id, []).append((box, ann.get("id")))

    sources: list[SourceImage] = []
    for img in data["images"]:
        try:
            img_id = int(img["id"])
            file_name = str(img["file_name"])
            width = int(img["width"])
            height = int(img["height"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedAnnotation(f"malformed image entry {img!r}") from exc

        path = image_root / file_name
        if not path.exists():
            raise MissingImage(f"image file {path} referenced by {annotation_file} is absent")

        entries = boxes_by_image.get(img_id, [])
        oob = [ann_id for box, ann_id in entries if not box.in_image(width, height)]
        if oob:
            logger.warning(
                "skipping image %s: out-of-bounds box in annotation(s) %s", img_id, oob
            )
            continue
        sources.append(
            SourceImage(
                id=str(img_id),
                path=path,
                width=width,
                height=height,
                boxes=tuple(box for box, _ in entries),
            )
        )
    return sources
