"""Edit-mask derivation from ground-truth boxes.

The mask partitions a source image into OBJECT pixels (to be preserved) and
EDITABLE pixels (free for the generation backend to repaint). On disk the
mask is 8-bit grayscale with OBJECT = 0 (black) and EDITABLE = 255; backend
adapters translate to whatever polarity their service expects.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .types import SourceImage

OBJECT = 0
EDITABLE = 255


@dataclass(frozen=True)
class EditMask:
    """Single-channel object/editable partition matching the source dims."""

    width: int
    height: int
    pixels: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.pixels.shape != (self.height, self.width):
            raise ValueError(
                f"mask buffer shape {self.pixels.shape} != ({self.height}, {self.width})"
            )
        values = np.unique(self.pixels)
        if not np.isin(values, (OBJECT, EDITABLE)).all():
            raise ValueError(f"mask contains values other than OBJECT/EDITABLE: {values}")

    @property
    def object_pixel_count(self) -> int:
        return int((self.pixels == OBJECT).sum())


def build_mask(src: SourceImage, dilation: int = 0) -> EditMask:
    """Rasterize the union of (optionally dilated) boxes as OBJECT pixels.

    Dilation expands each box by ``dilation`` pixels on every side before
    clamping to image bounds; with zero boxes the whole mask is EDITABLE.
    Pure function of (boxes, dims, dilation): identical inputs produce
    bit-identical masks.
    """
    if dilation < 0:
        raise ValueError(f"dilation must be >= 0, got {dilation}")
    buf = np.full((src.height, src.width), EDITABLE, dtype=np.uint8)
    for box in src.boxes:
        x0 = max(box.x - dilation, 0)
        y0 = max(box.y - dilation, 0)
        x1 = min(box.x + box.w + dilation, src.width)
        y1 = min(box.y + box.h + dilation, src.height)
        buf[y0:y1, x0:x1] = OBJECT
    return EditMask(width=src.width, height=src.height, pixels=buf)


def mask_path_for(source_id: str, directory: Path) -> Path:
    return Path(directory) / f"{source_id}.mask.png"


def save_mask(mask: EditMask, path: Path) -> None:
    """Persist as lossless single-channel PNG."""
    Image.fromarray(mask.pixels, mode="L").save(path, format="PNG")


def load_mask(path: Path) -> EditMask:
    with Image.open(path) as img:
        buf = np.asarray(img.convert("L"))
    return EditMask(width=buf.shape[1], height=buf.shape[0], pixels=buf)
