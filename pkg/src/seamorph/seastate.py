"""Sea-state level assignment for edited images.

Two inference modes share one contract:

* ``synthetic_feature`` — a hand-coded surface-roughness statistic cut by
  three fixed thresholds. Needs no trained artifact, so the full pipeline is
  testable end to end without any model.
* ``learned`` — a small convolutional classifier restored from a saved
  artifact (weights + sidecar config; class order SS1..SS4 is part of the
  contract).

Ties always break toward the lower (calmer) level.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyClass, ModelMissing
from .imaging import load_image, to_grayscale_unit
from .types import EditedImage, SeaState

logger = logging.getLogger(__name__)

MODE_SYNTHETIC = "synthetic_feature"
MODE_LEARNED = "learned"

CLASS_ORDER = ["SS1", "SS2", "SS3", "SS4"]

# Roughness-statistic cut points between SS1|SS2, SS2|SS3, SS3|SS4. These were
# calibrated on mock-backend texture fixtures: the statistic is linear in the
# texture roughness parameter (~0.414*r + 0.001, jitter under +-0.006 across
# seeds and resolutions), so the cuts sit at the r = 0.25 / 0.50 / 0.75
# quartile boundaries.
DEFAULT_THRESHOLDS = (0.1035, 0.2070, 0.3100)

_SCORE_TEMPERATURE = 0.05


@dataclass(frozen=True)
class SeaStateScores:
    """Normalized per-state scores (SS1..SS4), summing to 1."""

    scores: tuple[float, float, float, float]

    def __post_init__(self):
        if len(self.scores) != 4:
            raise ValueError(f"need 4 scores, got {len(self.scores)}")
        if any(s < 0.0 or s > 1.0 for s in self.scores):
            raise ValueError(f"scores outside [0,1]: {self.scores}")
        if abs(sum(self.scores) - 1.0) > 1e-6:
            raise ValueError(f"scores must sum to 1, got {sum(self.scores)}")


@dataclass(frozen=True)
class ClassifierConfig:
    mode: str = MODE_SYNTHETIC
    model_path: Path | None = None
    input_resolution: int = 64
    seed: int = 0
    thresholds: tuple[float, float, float] = DEFAULT_THRESHOLDS

    def __post_init__(self):
        if self.mode not in (MODE_SYNTHETIC, MODE_LEARNED):
            raise ValueError(f"unknown classifier mode {self.mode!r}")


def roughness_statistic(pixels: np.ndarray) -> float:
    """Mean absolute neighbor difference of the luminance channel.

    Monotone in the mock texture's roughness parameter; the synthetic-feature
    classifier thresholds this value.
    """
    g = to_grayscale_unit(pixels)
    return float(np.abs(np.diff(g, axis=1)).mean() + np.abs(np.diff(g, axis=0)).mean())


def _scores_from_statistic(
    stat: float, thresholds: tuple[float, float, float]
) -> tuple[float, ...]:
    # distance from the statistic to each state's (closed) threshold interval;
    # 0 inside, so the occupied interval wins and exact cut points tie low.
    t1, t2, t3 = thresholds
    intervals = [(0.0, t1), (t1, t2), (t2, t3), (t3, float("inf"))]
    dist = np.array([max(lo - stat, 0.0, stat - hi) for lo, hi in intervals])
    raw = np.exp(-dist / _SCORE_TEMPERATURE)
    return tuple(float(v) for v in raw / raw.sum())


def level_from_scores(scores) -> SeaState:
    """Argmax over the 4 scores; ties resolve to the lower (calmer) level."""
    return SeaState(int(np.argmax(scores)) + 1)  # argmax returns first max: tie breaks low


_MODEL_CACHE: dict[Path, tuple] = {}


def _load_learned(model_path: Path | None):
    if model_path is None:
        raise ModelMissing("classifier mode is 'learned' but no model_path is set")
    key = Path(model_path).resolve()
    if key not in _MODEL_CACHE:
        from .training import load_artifact

        _MODEL_CACHE[key] = load_artifact(key)
    return _MODEL_CACHE[key]


def _learned_scores(pixels_list: list[np.ndarray], cfg: ClassifierConfig) -> np.ndarray:
    import torch

    from .training import prepare_images

    model, sidecar = _load_learned(cfg.model_path)
    resolution = sidecar.get("input_resolution", cfg.input_resolution)
    batch = torch.from_numpy(prepare_images(pixels_list, resolution))
    with torch.no_grad():
        probs = torch.softmax(model(batch), dim=1).double().numpy()
    return probs / probs.sum(axis=1, keepdims=True)


def classify_sea_state(
    image: EditedImage | np.ndarray, cfg: ClassifierConfig
) -> tuple[SeaState, SeaStateScores]:
    """Assign a SeaState level plus normalized scores to one image.

    Deterministic for fixed weights/config; raises ModelMissing in learned
    mode without an artifact and UnreadableImage for undecodable inputs.
    """
    pixels = image.pixels if isinstance(image, EditedImage) else image
    if cfg.mode == MODE_SYNTHETIC:
        scores = _scores_from_statistic(roughness_statistic(pixels), cfg.thresholds)
    else:
        scores = tuple(float(v) for v in _learned_scores([pixels], cfg)[0])
    return level_from_scores(scores), SeaStateScores(scores=scores)


class SeaStateClassifier:
    """Sklearn-style estimator over image arrays.

    X is a list (or 4-D array) of HxWx3 uint8 images; y holds integer levels
    1..4. ``synthetic_feature`` mode is stateless (fit is a no-op); ``learned``
    mode trains the small CNN. predict breaks score ties toward the lower
    level.
    """

    def __init__(
        self,
        mode: str = MODE_SYNTHETIC,
        thresholds: tuple[float, float, float] = DEFAULT_THRESHOLDS,
        input_resolution: int = 64,
        epochs: int = 10,
        lr: float = 1e-3,
        batch_size: int = 8,
        holdout_fraction: float = 0.25,
        seed: int = 0,
    ):
        self.mode = mode
        self.thresholds = thresholds
        self.input_resolution = input_resolution
        self.epochs = epochs
        self.lr = lr
        self.batch_size = batch_size
        self.holdout_fraction = holdout_fraction
        self.seed = seed

    # get_params/set_params via sklearn so the estimator clones and composes
    def get_params(self, deep: bool = True) -> dict:
        return {
            "mode": self.mode,
            "thresholds": self.thresholds,
            "input_resolution": self.input_resolution,
            "epochs": self.epochs,
            "lr": self.lr,
            "batch_size": self.batch_size,
            "holdout_fraction": self.holdout_fraction,
            "seed": self.seed,
        }

    def set_params(self, **params) -> "SeaStateClassifier":
        for key, value in params.items():
            if key not in self.get_params():
                raise ValueError(f"invalid parameter {key!r}")
            setattr(self, key, value)
        return self

    @staticmethod
    def _validate_images(X) -> list[np.ndarray]:
        images = [np.asarray(x) for x in X]
        if not images:
            raise ValueError("X must contain at least one image")
        for img in images:
            if img.ndim not in (2, 3):
                raise ValueError(f"images must be HxW or HxWxC arrays, got ndim={img.ndim}")
        return images

    def fit(self, X, y=None) -> "SeaStateClassifier":
        if self.mode == MODE_SYNTHETIC:
            return self
        if y is None:
            raise ValueError("learned mode requires labels")
        from .training import prepare_images, train_classifier

        images = self._validate_images(X)
        labels = np.asarray(y, dtype=np.int64) - 1
        if labels.min() < 0 or labels.max() > 3:
            raise ValueError("labels must be sea-state levels 1..4")
        if len({int(v) for v in labels}) < 4:
            missing = [CLASS_ORDER[i] for i in range(4) if i not in set(labels.tolist())]
            raise EmptyClass(f"no training examples for class(es): {', '.join(missing)}")
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
        )
        return self

    def predict_proba(self, X) -> np.ndarray:
        images = self._validate_images(X)
        if self.mode == MODE_SYNTHETIC:
            return np.array(
                [_scores_from_statistic(roughness_statistic(img), self.thresholds) for img in images]
            )
        import torch

        from .training import prepare_images

        if not hasattr(self, "model_"):
            raise ModelMissing("estimator is not fitted")
        batch = torch.from_numpy(prepare_images(images, self.input_resolution))
        with torch.no_grad():
            probs = torch.softmax(self.model_(batch), dim=1).double().numpy()
        return probs / probs.sum(axis=1, keepdims=True)

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1) + 1


def load_labeled_corpus(corpus_dir: Path) -> tuple[list[np.ndarray], np.ndarray]:
    """Read a ``ss1/ .. ss4/`` directory tree into images and level labels."""
    corpus_dir = Path(corpus_dir)
    images: list[np.ndarray] = []
    labels: list[int] = []
    for level, name in enumerate(CLASS_ORDER, start=1):
        sub = corpus_dir / name.lower()
        if not sub.is_dir():
            sub = corpus_dir / name
        files = sorted(sub.glob("*.png")) + sorted(sub.glob("*.jpg")) if sub.is_dir() else []
        if not files:
            raise EmptyClass(f"no training examples for class(es): {name}")
        for f in files:
            images.append(load_image(f))
            labels.append(level)
    return images, np.asarray(labels)


def train_sea_state_classifier(
    corpus_dir: Path,
    out_dir: Path,
    *,
    epochs: int = 10,
    lr: float = 1e-3,
    batch_size: int = 8,
    holdout_fraction: float = 0.25,
    input_resolution: int = 64,
    seed: int = 0,
):
    """Fit the learned classifier on a labeled corpus and persist the artifact.

    Returns the TrainingReport (with held-out accuracy and the artifact path).
    """
    from .training import save_artifact

    images, labels = load_labeled_corpus(corpus_dir)
    clf = SeaStateClassifier(
        mode=MODE_LEARNED,
        input_resolution=input_resolution,
        epochs=epochs,
        lr=lr,
        batch_size=batch_size,
        holdout_fraction=holdout_fraction,
        seed=seed,
    )
    clf.fit(images, labels)
    report = clf.train_report_
    report.artifact = save_artifact(
        clf.model_,
        Path(out_dir),
        kind="seastate",
        input_resolution=input_resolution,
        class_order=CLASS_ORDER,
    )
    return report
