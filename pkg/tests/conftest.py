from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from seamorph.types import BoundingBox, SourceImage

# Per-sea-state counts used by the passing-rate fixtures: generated / kept.
TABLE_COUNTS = {1: (2336, 2087), 2: (25114, 19390), 3: (65275, 45066), 4: (4275, 3151)}


def make_source_image(
    directory: Path,
    source_id: str,
    width: int = 64,
    height: int = 48,
    boxes: tuple[BoundingBox, ...] = (BoundingBox(12, 10, 16, 10, "boat"),),
    base: int = 80,
    boat_value: tuple[int, int, int] = (230, 225, 210),
) -> SourceImage:
    """Write a small PNG with bright rectangles at the boat boxes."""
    arr = np.full((height, width, 3), base, dtype=np.uint8)
    for box in boxes:
        if box.is_boat:
            arr[box.y : box.y + box.h, box.x : box.x + box.w] = boat_value
    path = directory / f"{source_id}.png"
    Image.fromarray(arr).save(path)
    return SourceImage(id=source_id, path=path, width=width, height=height, boxes=boxes)


def make_fleet(directory: Path, n: int, width: int = 64, height: int = 48) -> list[SourceImage]:
    return [make_source_image(directory, f"src{i:02d}", width, height) for i in range(n)]


def write_count_manifest(path: Path, counts: dict[int, tuple[int, int]]) -> Path:
    """Fast manifest fixture with exact per-state generated/kept counts."""
    kept_verdict = json.dumps([{"box_index": 0, "verdict": "boat"}], separators=(",", ":"))
    drop_verdict = json.dumps([{"box_index": 0, "verdict": "not_boat"}], separators=(",", ":"))
    lines = []
    i = 0
    for state, (generated, kept) in counts.items():
        for k in range(generated):
            is_kept = k < kept
            lines.append(
                f'{{"edited_id":"e{i}","source_id":"s{i % 300}","backend_name":"mock",'
                f'"prompt":"p","seed":{i},"sea_state":{state},'
                f'"crop_verdicts":{kept_verdict if is_kept else drop_verdict},'
                f'"kept":{"true" if is_kept else "false"},'
                f'"created_at":"2026-01-01T00:00:00+00:00"}}'
            )
            i += 1
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def fleet_dir(tmp_path: Path) -> Path:
    d = tmp_path / "sources"
    d.mkdir()
    return d


def write_coco_fixture(root: Path, n: int = 3, width: int = 64, height: int = 48):
    """Images dir + COCO-style annotation file for n boat sources."""
    images_dir = root / "images"
    images_dir.mkdir(parents=True, exist_ok=True)
    box = BoundingBox(12, 10, 16, 10, "boat")
    images, annotations = [], []
    for i in range(n):
        make_source_image(images_dir, f"{i}", width, height, boxes=(box,))
        images.append({"id": i, "file_name": f"{i}.png", "width": width, "height": height})
        annotations.append(
            {"id": i, "image_id": i, "bbox": [box.x, box.y, box.w, box.h], "category_id": 1}
        )
    annotation_file = root / "annotations.json"
    annotation_file.write_text(
        json.dumps(
            {
                "images": images,
                "annotations": annotations,
                "categories": [{"id": 1, "name": "boat"}],
            }
        ),
        encoding="utf-8",
    )
    return annotation_file, images_dir
