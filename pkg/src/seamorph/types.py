"""Shared domain types and box geometry.

Boxes are half-open integer rectangles ``[x, x+w) x [y, y+h)`` so that
pixel-enumeration oracles are exact: ``area == w * h`` equals the number of
integer pixel coordinates covered. All types are immutable after construction
and safe to share across concurrent workers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from pathlib import Path

import numpy as np


class SeaState(IntEnum):
    """Sea surface roughness levels 1-4, per the ABS definitions table."""

    SS1 = 1
    SS2 = 2
    SS3 = 3
    SS4 = 4

    @property
    def description(self) -> str:
        return _SEA_STATE_DESCRIPTIONS[self]


_SEA_STATE_DESCRIPTIONS = {
    SeaState.SS1: (
        "The water exhibits a gentle ripple, devoid of breaking waves, "
        "featuring a low swell of short to average length occasionally."
    ),
    SeaState.SS2: "Slight waves breaking, with smooth waves on the water surface",
    SeaState.SS3: (
        "Mildly increased waves, leading to some rock buoys and causing "
        "minor disturbances for small craft"
    ),
    SeaState.SS4: "The sea takes on a furrowed appearance, characterized by moderate waves",
}

BOAT_LABEL = "boat"


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned half-open box with a class label.

    Coordinates are integer pixels; fractional annotations are floored on
    ingest (a documented lossy step in the COCO loader).
    """

    x: int
    y: int
    w: int
    h: int
    class_label: str = BOAT_LABEL

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError(f"box dims must be >= 1, got w={self.w} h={self.h}")

    @property
    def area(self) -> int:
        return self.w * self.h

    @property
    def is_boat(self) -> bool:
        return self.class_label == BOAT_LABEL

    def in_image(self, width: int, height: int) -> bool:
        return self.x >= 0 and self.y >= 0 and self.x + self.w <= width and self.y + self.h <= height

    def clamped(self, width: int, height: int) -> "BoundingBox":
        """Return the box clipped to image bounds (raises if fully outside)."""
        x0 = max(self.x, 0)
        y0 = max(self.y, 0)
        x1 = min(self.x + self.w, width)
        y1 = min(self.y + self.h, height)
        if x1 <= x0 or y1 <= y0:
            raise ValueError(f"box {self} lies outside a {width}x{height} image")
        return BoundingBox(x0, y0, x1 - x0, y1 - y0, self.class_label)


def intersect_area(a: BoundingBox, b: BoundingBox) -> int:
    """Intersection area of two boxes in pixels^2 (0 when disjoint)."""
    dx = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    dy = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    if dx <= 0 or dy <= 0:
        return 0
    return dx * dy


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union in [0, 1]; 1.0 iff identical, 0.0 iff disjoint."""
    inter = intersect_area(a, b)
    if inter == 0:
        return 0.0
    return inter / (a.area + b.area - inter)


@dataclass(frozen=True)
class SourceImage:
    """A real annotated image with its ground-truth object boxes."""

    id: str
    path: Path | None
    width: int
    height: int
    boxes: tuple[BoundingBox, ...] = ()

    def __post_init__(self):
        for box in self.boxes:
            if not box.in_image(self.width, self.height):
                raise ValueError(
                    f"box {box} out of bounds for {self.width}x{self.height} image {self.id!r}"
                )

    @property
    def boat_boxes(self) -> tuple[BoundingBox, ...]:
        return tuple(b for b in self.boxes if b.is_boat)


@dataclass(frozen=True)
class EditedImage:
    """A generated image with its provenance and (eventual) sea-state label.

    ``sea_state`` is None until the classifier assigns it; assignment happens
    exactly once, via :func:`dataclasses.replace`.
    """

    id: str
    source_id: str
    pixels: np.ndarray = field(repr=False)
    backend_name: str
    prompt: str
    seed: int
    sea_state: SeaState | None = None
    path: Path | None = None

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])


class CropKind(str, Enum):
    POSITIVE = "positive"
    QUARTER_NEGATIVE = "quarter_negative"
    BACKGROUND_NEGATIVE = "background_negative"


@dataclass(frozen=True)
class Crop:
    """A sub-image cut from an edited image for preservation checking.

    ``reference`` optionally carries the pristine source pixels for the same
    region; the template-difference checker mode requires it.
    """

    source_box: BoundingBox
    region: BoundingBox
    pixels: np.ndarray = field(repr=False)
    kind: CropKind
    box_index: int = -1
    reference: np.ndarray | None = field(default=None, repr=False)
