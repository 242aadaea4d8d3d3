"""Build a tiny reviewed dataset for the UI end-to-end test.

Usage: python3 fixture.py <target_dir>
Creates <target_dir>/{images,annotations.json,out/...} with a mock pipeline
run of 2 sources x 3 generations (6 kept records).
"""
import json
import sys
from pathlib import Path

import numpy as np
from PIL import Image

from seamorph import BoundingBox, PipelineConfig, SourceImage, run_pipeline

target = Path(sys.argv[1])
images_dir = target / "images"
images_dir.mkdir(parents=True, exist_ok=True)

box = BoundingBox(12, 10, 16, 10, "boat")
sources = []
images, annotations = [], []
for i in range(2):
    arr = np.full((48, 64, 3), 80, dtype=np.uint8)
    arr[box.y : box.y + box.h, box.x : box.x + box.w] = [230, 225, 210]
    path = images_dir / f"{i}.png"
    Image.fromarray(arr).save(path)
    sources.append(SourceImage(id=str(i), path=path, width=64, height=48, boxes=(box,)))
    images.append({"id": i, "file_name": f"{i}.png", "width": 64, "height": 48})
    annotations.append(
        {"id": i, "image_id": i, "bbox": [box.x, box.y, box.w, box.h], "category_id": 1}
    )

(target / "annotations.json").write_text(
    json.dumps(
        {
            "images": images,
            "annotations": annotations,
            "categories": [{"id": 1, "name": "boat"}],
        }
    ),
    encoding="utf-8",
)

run_pipeline(sources, PipelineConfig(output_root=target / "out", images_per_source=3, seed=5))
print("fixture ready")
