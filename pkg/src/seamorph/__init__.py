"""Sea-state background editing and curation pipeline for maritime imagery.

Transforms real annotated maritime images into synthetic variants with
altered sea-state backgrounds, filters out images whose objects did not
survive the edit, labels survivors by Sea State level 1-4, and evaluates
detector robustness per state.
"""

from .errors import SeamorphError
from .manifest import DatasetStats, ManifestRecord, append_record, compute_stats, load_manifest
from .masks import EditMask, build_mask
from .pipeline import (
    BackendSettings,
    PipelineConfig,
    filter_decision,
    passing_rate,
    resize_to_source,
    run_pipeline,
)
from .preservation import (
    CheckerConfig,
    CheckerVerdict,
    PreservationChecker,
    build_negative_set,
    check_crop,
    extract_positive_crops,
    synthesize_quarter_negative,
    train_checker,
)
from .seastate import (
    ClassifierConfig,
    SeaStateClassifier,
    SeaStateScores,
    classify_sea_state,
    train_sea_state_classifier,
)
from .types import (
    BoundingBox,
    Crop,
    CropKind,
    EditedImage,
    SeaState,
    SourceImage,
    intersect_area,
    iou,
)

__version__ = "0.1.0"

__all__ = [
    "BackendSettings",
    "BoundingBox",
    "CheckerConfig",
    "CheckerVerdict",
    "ClassifierConfig",
    "Crop",
    "CropKind",
    "DatasetStats",
    "EditMask",
    "EditedImage",
    "ManifestRecord",
    "PipelineConfig",
    "PreservationChecker",
    "SeaState",
    "SeaStateClassifier",
    "SeaStateScores",
    "SeamorphError",
    "SourceImage",
    "append_record",
    "build_mask",
    "build_negative_set",
    "check_crop",
    "classify_sea_state",
    "compute_stats",
    "extract_positive_crops",
    "filter_decision",
    "intersect_area",
    "iou",
    "load_manifest",
    "passing_rate",
    "resize_to_source",
    "run_pipeline",
    "synthesize_quarter_negative",
    "train_checker",
    "train_sea_state_classifier",
]
