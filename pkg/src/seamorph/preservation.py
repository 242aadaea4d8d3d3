"""Object-preservation checking for edited images.

Crops are cut at the ground-truth boxes of the source image and classified
boat / not_boat. Negative training material comes from two constructions:

* quarter negatives — the crop keeps the box dims but is corner-shifted so
  exactly one quarter of the box area stays inside (floor rounding for odd
  dims), the rest lying outside;
* background negatives — seeded random regions that intersect no
  ground-truth box at all.

Like the sea-state module, checking runs either against a trained artifact
(``learned``) or with a zero-artifact ``synthetic_feature`` mode that scores
the crop's difference against the pristine source template.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyClass,
    EmptyCrop,
    ModelMissing,
    NoValidPlacement,
    ValidationError,
)
from .imaging import load_image, save_image
from .manifest import VERDICT_BOAT, VERDICT_NOT_BOAT
from .types import BoundingBox, Crop, CropKind, EditedImage, SourceImage, intersect_area

logger = logging.getLogger(__name__)

MODE_SYNTHETIC = "synthetic_feature"
MODE_LEARNED = "learned"

CLASS_ORDER = ["not_boat", "boat"]

POSITIVE_DIR = "boat"
NEGATIVE_DIR = "not_boat"

# template-difference scale: mean absolute RGB difference (in [0,1] units)
# at which confidence reaches zero
_MAD_SCALE = 0.25


@dataclass(frozen=True)
class CheckerVerdict:
    """Per-crop decision; confidence is the boat-class score."""

    box_index: int
    verdict: str
    confidence: float


@dataclass(frozen=True)
class CheckerConfig:
    mode: str = MODE_SYNTHETIC
    model_path: Path | None = None
    threshold: float = 0.5
    input_resolution: int = 64

    def __post_init__(self):
        if self.mode not in (MODE_SYNTHETIC, MODE_LEARNED):
            raise ValueError(f"unknown checker mode {self.mode!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0,1], got {self.threshold}")


def _cut(pixels: np.ndarray, region: BoundingBox) -> np.ndarray:
    return pixels[region.y : region.y + region.h, region.x : region.x + region.w]


def extract_positive_crops(
    image: EditedImage,
    source: SourceImage,
    source_pixels: np.ndarray | None = None,
) -> list[Crop]:
    """One positive crop per boat-labeled box, clamped to image bounds.

    The image must already be resized to the source dims so boxes align;
    otherwise DimensionMismatch. When ``source_pixels`` is given, each crop
    carries the pristine source region as its template reference.
    """
    if (image.height, image.width) != (source.height, source.width):
        raise DimensionMismatch(
            f"edited image is {image.width}x{image.height} but source {source.id!r} is "
            f"{source.width}x{source.height}; resize step was skipped"
        )
    crops: list[Crop] = []
    for index, box in enumerate(source.boxes):
        if not box.is_boat:
            continue
        region = box.clamped(source.width, source.height)
        crops.append(
            Crop(
                source_box=box,
                region=region,
                pixels=_cut(image.pixels, region),
                kind=CropKind.POSITIVE,
                box_index=index,
                reference=None if source_pixels is None else _cut(source_pixels, region),
            )
        )
    return crops


def quarter_shift_candidates(box: BoundingBox) -> list[tuple[int, int]]:
    """The four corner shifts leaving floor(w/2)*floor(h/2) of the box inside."""
    sx, sy = (box.w + 1) // 2, (box.h + 1) // 2
    return [(sx, sy), (sx, -sy), (-sx, sy), (-sx, -sy)]


def synthesize_quarter_negative(
    image: EditedImage, box: BoundingBox, rng_seed: int
) -> Crop:
    """Corner-shifted crop overlapping exactly one quarter of the box area.

    The crop keeps the box dims and shifts by (+-ceil(w/2), +-ceil(h/2));
    one shift is chosen seeded-uniformly among those fully in-image. For odd
    dims the overlap is floor(w/2)*floor(h/2), the nearest achievable to a
    quarter. Raises NoValidPlacement when no shift fits.
    """
    width, height = image.width, image.height
    valid: list[BoundingBox] = []
    for dx, dy in quarter_shift_candidates(box):
        region = BoundingBox(box.x + dx, box.y + dy, box.w, box.h, box.class_label)
        if region.x >= 0 and region.y >= 0 and region.in_image(width, height):
            valid.append(region)
    if not valid:
        raise NoValidPlacement(
            f"no quarter-shift of box ({box.x},{box.y},{box.w},{box.h}) fits a "
            f"{width}x{height} image"
        )
    rng = np.random.default_rng(rng_seed)
    region = valid[int(rng.integers(len(valid)))]
    return Crop(
        source_box=box,
        region=region,
        pixels=_cut(image.pixels, region),
        kind=CropKind.QUARTER_NEGATIVE,
    )


def sample_background_negative(
    image: EditedImage,
    boxes: tuple[BoundingBox, ...],
    rng: np.random.Generator,
    crop_w: int,
    crop_h: int,
    max_attempts: int = 200,
) -> Crop:
    """Seeded random region with zero intersection against every box."""
    width, height = image.width, image.height
    crop_w = min(crop_w, width)
    crop_h = min(crop_h, height)
    for _ in range(max_attempts):
        x = int(rng.integers(0, width - crop_w + 1))
        y = int(rng.integers(0, height - crop_h + 1))
        region = BoundingBox(x, y, crop_w, crop_h, "background")
        if all(intersect_area(region, box) == 0 for box in boxes):
            return Crop(
                source_box=region,
                region=region,
                pixels=_cut(image.pixels, region),
                kind=CropKind.BACKGROUND_NEGATIVE,
            )
    raise NoValidPlacement(
        f"no box-free {crop_w}x{crop_h} region found in {max_attempts} attempts"
    )


_MODEL_CACHE: dict[Path, tuple] = {}


def _load_learned(model_path: Path | None):
    if model_path is None:
        raise ModelMissing("checker mode is 'learned' but no model_path is set")
    key = Path(model_path).resolve()
    if key not in _MODEL_CACHE:
        from .training import load_artifact

        _MODEL_CACHE[key] = load_artifact(key)
    return _MODEL_CACHE[key]


def check_crop(crop: Crop, cfg: CheckerConfig) -> CheckerVerdict:
    """Classify one crop; deterministic for fixed weights/config.

    synthetic_feature mode scores 1 - MAD(crop, reference)/scale, so a
    bit-identical crop scores 1.0; learned mode uses the trained binary
    classifier's boat probability. verdict == boat iff confidence >= the
    decision threshold.
    """
    if crop.pixels.size == 0:
        raise EmptyCrop(f"crop over box {crop.source_box} has no pixels")
    if cfg.mode == MODE_SYNTHETIC:
        if crop.reference is None:
            raise ValidationError(
                "synthetic_feature checking requires the crop's source template"
            )
        diff = np.abs(
            crop.pixels.astype(np.float32) - crop.reference.astype(np.float32)
        ).mean() / 255.0
        confidence = float(np.clip(1.0 - diff / _MAD_SCALE, 0.0, 1.0))
    else:
        import torch

        from .training import prepare_images

        model, sidecar = _load_learned(cfg.model_path)
        resolution = sidecar.get("input_resolution", cfg.input_resolution)
        batch = torch.from_numpy(prepare_images([crop.pixels], resolution))
        with torch.no_grad():
            confidence = float(torch.softmax(model(batch), dim=1)[0, 1])
    verdict = VERDICT_BOAT if confidence >= cfg.threshold else VERDICT_NOT_BOAT
    return CheckerVerdict(box_index=crop.box_index, verdict=verdict, confidence=confidence)


class PreservationChecker:
    """Sklearn-style binary estimator over crop arrays (classes: not_boat, boat).

    fit trains with the pinned defaults: Adam, batch size 32, fixed lr 1e-5
    with no decay, and horizontal-flip augmentation applied to the boat class
    only (blur augmentation for corpus building sits behind a separate flag).
    """

    def __init__(
        self,
        threshold: float = 0.5,
        input_resolution: int = 64,
        epochs: int = 10,
        lr: float = 1e-5,
        batch_size: int = 32,
        holdout_fraction: float = 0.25,
        seed: int = 0,
    ):
        self.threshold = threshold
        self.input_resolution = input_resolution
        self.epochs = epochs
        self.lr = lr
        self.batch_size = batch_size
        self.holdout_fraction = holdout_fraction
        self.seed = seed

    def get_params(self, deep: bool = True) -> dict:
        return {
            "threshold": self.threshold,
            "input_resolution": self.input_resolution,
            "epochs": self.epochs,
            "lr": self.lr,
            "batch_size": self.batch_size,
            "holdout_fraction": self.holdout_fraction,
            "seed": self.seed,
        }

    def set_params(self, **params) -> "PreservationChecker":
        for key, value in params.items():
            if key not in self.get_params():
                raise ValueError(f"invalid parameter {key!r}")
            setattr(self, key, value)
        return self

    def fit(self, X, y) -> "PreservationChecker":
        from .training import prepare_images, train_classifier

        images = [np.asarray(x) for x in X]
        labels = np.asarray(y, dtype=np.int64)
        if not set(labels.tolist()) <= {0, 1}:
            raise ValueError("labels must be 0 (not_boat) or 1 (boat)")
        tensors = prepare_images(images, self.input_resolution)
        self.model_, self.train_report_ = train_classifier(
            tensors,
            labels,
            CLASS_ORDER,
            epochs=self.epochs,
            lr=self.lr,
            batch_size=self.batch_size,
            seed=self.seed,
            holdout_fraction=self.holdout_fraction,
            flip_class=1,
        )
        return self

    def predict_proba(self, X) -> np.ndarray:
        import torch

        from .training import prepare_images

        if not hasattr(self, "model_"):
            raise ModelMissing("estimator is not fitted")
        batch = torch.from_numpy(prepare_images([np.asarray(x) for x in X], self.input_resolution))
        with torch.no_grad():
            probs = torch.softmax(self.model_(batch), dim=1).double().numpy()
        return probs / probs.sum(axis=1, keepdims=True)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X)[:, 1] >= self.threshold).astype(int)


def _load_crop_dir(directory: Path) -> list[np.ndarray]:
    directory = Path(directory)
    files = sorted(directory.glob("*.png")) + sorted(directory.glob("*.jpg"))
    return [load_image(f) for f in files]


def _blurred(pixels: np.ndarray, radius: float = 1.5) -> np.ndarray:
    from PIL import Image, ImageFilter

    img = Image.fromarray(pixels).filter(ImageFilter.GaussianBlur(radius))
    return np.asarray(img)


def train_checker(
    positives: Path,
    negatives: Path,
    out_dir: Path,
    *,
    epochs: int = 10,
    lr: float = 1e-5,
    batch_size: int = 32,
    holdout_fraction: float = 0.25,
    input_resolution: int = 64,
    seed: int = 0,
    blur_positives: bool = False,
):
    """Train the boat / not_boat checker from two crop directories.

    Defaults follow the pinned training recipe (Adam, batch 32, lr 1e-5, no
    decay, horizontal flip on the boat class only); the emitted training log
    echoes the effective configuration. ``blur_positives`` additionally
    extends the corpus with Gaussian-blurred copies of every boat crop (off
    by default: flip is the only training-time augmentation). Returns the
    TrainingReport.
    """
    from .training import save_artifact

    pos = _load_crop_dir(positives)
    neg = _load_crop_dir(negatives)
    if not pos or not neg:
        missing = [n for n, items in (("boat", pos), ("not_boat", neg)) if not items]
        raise EmptyClass(f"no training examples for class(es): {', '.join(missing)}")
    if blur_positives:
        pos = pos + [_blurred(p) for p in pos]

    X = neg + pos
    y = np.array([0] * len(neg) + [1] * len(pos))
    checker = PreservationChecker(
        input_resolution=input_resolution,
        epochs=epochs,
        lr=lr,
        batch_size=batch_size,
        holdout_fraction=holdout_fraction,
        seed=seed,
    )
    checker.fit(X, y)
    report = checker.train_report_
    report.artifact = save_artifact(
        checker.model_,
        Path(out_dir),
        kind="checker",
        input_resolution=input_resolution,
        class_order=CLASS_ORDER,
    )
    return report


def build_negative_set(
    sources: list[SourceImage],
    edited_images: list[EditedImage],
    out_dir: Path,
    rng_seed: int,
    *,
    backgrounds_per_image: int = 2,
    quarters_per_image: int = 1,
    background_crop_size: int = 64,
) -> dict[str, int]:
    """Emit quarter- and background-negative crops into ``out_dir/not_boat/``.

    Regions are seeded-deterministic; items with no valid placement are
    skipped and counted. Files are named ``<edited_id>.obj<k>.<kind>.png``
    and a ``negatives.jsonl`` ledger records each crop's provenance (edited
    id, kind, region).
    """
    if not sources or not edited_images:
        raise ValidationError("build_negative_set needs non-empty sources and edited images")
    by_id = {s.id: s for s in sources}
    neg_dir = Path(out_dir) / NEGATIVE_DIR
    neg_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(rng_seed)
    counts = {"background_negative": 0, "quarter_negative": 0, "skipped": 0}

    def emit(ledger, crop: Crop, file_name: str, image: EditedImage) -> None:
        save_image(crop.pixels, neg_dir / file_name)
        ledger.write(
            json.dumps(
                {
                    "file": file_name,
                    "edited_id": image.id,
                    "source_id": image.source_id,
                    "kind": crop.kind.value,
                    "region": [crop.region.x, crop.region.y, crop.region.w, crop.region.h],
                }
            )
            + "\n"
        )

    with open(Path(out_dir) / "negatives.jsonl", "a", encoding="utf-8") as ledger:
        for image in edited_images:
            source = by_id.get(image.source_id)
            if source is None:
                logger.warning(
                    "edited image %s has unknown source %s", image.id, image.source_id
                )
                counts["skipped"] += 1
                continue
            boat_boxes = source.boat_boxes
            for k in range(backgrounds_per_image):
                if boat_boxes:
                    ref = boat_boxes[int(rng.integers(len(boat_boxes)))]
                    crop_w, crop_h = ref.w, ref.h
                else:
                    crop_w = crop_h = background_crop_size
                try:
                    crop = sample_background_negative(image, source.boxes, rng, crop_w, crop_h)
                except NoValidPlacement:
                    counts["skipped"] += 1
                    continue
                emit(ledger, crop, f"{image.id}.obj{k}.background_negative.png", image)
                counts["background_negative"] += 1
            for k, box in enumerate(boat_boxes[: quarters_per_image or 0]):
                try:
                    crop = synthesize_quarter_negative(image, box, int(rng.integers(2**32)))
                except NoValidPlacement:
                    counts["skipped"] += 1
                    continue
                emit(ledger, crop, f"{image.id}.obj{k}.quarter_negative.png", image)
                counts["quarter_negative"] += 1
    return counts
