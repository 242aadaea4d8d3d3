"""Per-sea-state detection quality over the generated dataset.

Detections come from a file written by an external detector (one line per
detection: ``image_id,x,y,w,h,score``); this module matches them greedily
against ground truth, computes 101-point interpolated average precision with
dataset-pooled PR curves, and reports mAP@0.5 and mAP@0.5:0.95 per sea
state. States with zero ground-truth objects are reported as n/a and
excluded from any cross-state averaging.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .errors import MalformedAnnotation, UnknownImageId
from .manifest import load_manifest
from .types import BoundingBox, SeaState, SourceImage, iou

IOU_THRESHOLDS = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))
_RECALL_POINTS = 101


@dataclass(frozen=True)
class Detection:
    image_id: str
    box: BoundingBox
    score: float
    class_label: str = "boat"

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"detection score must be in [0,1], got {self.score}")


@dataclass(frozen=True)
class StateMetrics:
    map50: float | None
    map50_95: float | None
    n_images: int
    n_gt: int


@dataclass(frozen=True)
class EvalReport:
    per_state: dict[SeaState, StateMetrics]

    def as_dict(self) -> dict:
        return {
            f"SS{s.value}": {
                "map50": m.map50,
                "map50_95": m.map50_95,
                "n_images": m.n_images,
                "n_gt": m.n_gt,
            }
            for s, m in sorted(self.per_state.items())
        }


def load_detections(path: Path) -> list[Detection]:
    """Parse the detections file; boxes are floored to the integer grid."""
    detections: list[Detection] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 6:
                raise MalformedAnnotation(
                    f"{path}:{lineno}: expected image_id,x,y,w,h,score"
                )
            image_id, x, y, w, h, score = parts
            detections.append(
                Detection(
                    image_id=image_id,
                    box=BoundingBox(
                        math.floor(float(x)),
                        math.floor(float(y)),
                        max(1, math.floor(float(w))),
                        max(1, math.floor(float(h))),
                    ),
                    score=float(score),
                )
            )
    return detections


def match_detections(
    dets: list[Detection], gts: list[BoundingBox], iou_thresh: float
) -> list[tuple[Detection, BoundingBox | None]]:
    """Greedy one-to-one matching within a single image.

    Detections are taken in descending score order (ties keep input order);
    each one claims the unmatched ground-truth box with the highest IoU >=
    the threshold, otherwise it is a false positive.
    """
    order = sorted(range(len(dets)), key=lambda i: -dets[i].score)
    taken = [False] * len(gts)
    matched: list[tuple[Detection, BoundingBox | None]] = []
    for i in order:
        best_iou, best_j = 0.0, -1
        for j, gt in enumerate(gts):
            if taken[j]:
                continue
            value = iou(dets[i].box, gt)
            if value >= iou_thresh and value > best_iou:
                best_iou, best_j = value, j
        if best_j >= 0:
            taken[best_j] = True
            matched.append((dets[i], gts[best_j]))
        else:
            matched.append((dets[i], None))
    return matched


def average_precision(
    matches: list[tuple[Detection, BoundingBox | None]], n_gt: int
) -> float | None:
    """101-point interpolated AP over the pooled match list.

    Returns None (n/a) when there is no ground truth: the PR curve is
    undefined and such groups are excluded from averaging.
    """
    if n_gt == 0:
        return None
    ranked = sorted(matches, key=lambda m: -m[0].score)
    tp = 0
    precisions: list[float] = []
    recalls: list[float] = []
    for rank, (_, gt) in enumerate(ranked, start=1):
        if gt is not None:
            tp += 1
        precisions.append(tp / rank)
        recalls.append(tp / n_gt)

    ap = 0.0
    for k in range(_RECALL_POINTS):
        r = k / (_RECALL_POINTS - 1)
        best = 0.0
        for p, rec in zip(precisions, recalls):
            if rec >= r and p > best:
                best = p
        ap += best
    return ap / _RECALL_POINTS


def evaluate(
    manifest_path: Path, detections_path: Path, sources: list[SourceImage]
) -> EvalReport:
    """Group kept manifest images by sea state and compute per-state mAP.

    Ground truth for each edited image is the boat boxes of its source.
    Detections referencing ids absent from the manifest raise UnknownImageId;
    detections on discarded (non-kept) records are ignored.
    """
    records = load_manifest(manifest_path)
    by_id = {r.edited_id: r for r in records}
    sources_by_id = {s.id: s for s in sources}
    detections = load_detections(detections_path)

    dets_by_image: dict[str, list[Detection]] = {}
    for det in detections:
        if det.image_id not in by_id:
            raise UnknownImageId(
                f"detection references image {det.image_id!r} absent from the manifest"
            )
        dets_by_image.setdefault(det.image_id, []).append(det)

    per_state: dict[SeaState, StateMetrics] = {}
    for state in SeaState:
        image_ids = [
            r.edited_id for r in records if r.kept and r.sea_state == state.value
        ]
        n_gt = 0
        aps: list[float | None] = []
        gt_by_image: dict[str, list[BoundingBox]] = {}
        for edited_id in image_ids:
            source = sources_by_id.get(by_id[edited_id].source_id)
            boxes = list(source.boat_boxes) if source else []
            gt_by_image[edited_id] = boxes
            n_gt += len(boxes)
        for thresh in IOU_THRESHOLDS:
            pooled: list[tuple[Detection, BoundingBox | None]] = []
            for edited_id in image_ids:
                pooled.extend(
                    match_detections(
                        dets_by_image.get(edited_id, []), gt_by_image[edited_id], thresh
                    )
                )
            aps.append(average_precision(pooled, n_gt))
        map50 = aps[0]
        defined = [a for a in aps if a is not None]
        map50_95 = sum(defined) / len(defined) if defined else None
        per_state[state] = StateMetrics(
            map50=map50, map50_95=map50_95, n_images=len(image_ids), n_gt=n_gt
        )
    return EvalReport(per_state=per_state)
