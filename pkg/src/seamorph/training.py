"""Shared training harness for the two small image classifiers.

Both the sea-state model and the crop preservation checker are compact
DenseNet-flavored CNNs: every stage's input is concatenated onto its output,
the pooled features go through a zero-initialized linear head. Training is
seed-reproducible on CPU: same corpus + seed gives the same reported
accuracy.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn

from .errors import DivergedTraining, EmptyClass, ModelMissing

logger = logging.getLogger(__name__)

WEIGHTS_FILE = "weights.pt"
SIDECAR_FILE = "model.json"


class DenseBlockNet(nn.Module):
    """Two densely-connected conv stages, pooled features, linear head.

    Pooled features are standardized by per-feature mean/std buffers frozen
    at fit time (see :meth:`calibrate`), so train and eval see the identical
    transform; the head is zero-initialized so decisions hinge on
    data-driven sign patterns rather than the random init. Both choices keep
    few-step, tiny-learning-rate training honest instead of stuck at an
    all-one-class boundary.
    """

    def __init__(self, num_classes: int, width: int = 16):
        super().__init__()
        self.num_classes = num_classes
        self.width = width
        feat_dim = 3 + 2 * width
        self.conv1 = nn.Conv2d(3, width, 3, padding=1)
        self.conv2 = nn.Conv2d(3 + width, width, 3, padding=1)
        self.register_buffer("feat_mean", torch.zeros(feat_dim))
        self.register_buffer("feat_std", torch.ones(feat_dim))
        self.head = nn.Linear(feat_dim, num_classes)
        nn.init.zeros_(self.head.weight)
        nn.init.zeros_(self.head.bias)

    def pooled_features(self, x: torch.Tensor) -> torch.Tensor:
        f1 = F.relu(self.conv1(x))
        x = torch.cat([x, f1], dim=1)
        f2 = F.relu(self.conv2(x))
        x = torch.cat([x, f2], dim=1)
        return x.mean(dim=(2, 3))

    def calibrate(self, x: torch.Tensor) -> None:
        """Freeze feature standardization statistics from a reference batch."""
        with torch.no_grad():
            feats = self.pooled_features(x)
            self.feat_mean.copy_(feats.mean(dim=0))
            self.feat_std.copy_(feats.std(dim=0, unbiased=False).clamp_min(1e-5))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        feats = (self.pooled_features(x) - self.feat_mean) / self.feat_std
        return self.head(feats)


@dataclass
class TrainingReport:
    """What a training run did and how it went."""

    optimizer: str
    batch_size: int
    lr: float
    weight_decay: float
    epochs: int
    seed: int
    epoch_losses: list[float]
    holdout_accuracy: float
    n_train: int
    n_holdout: int
    class_counts: dict[str, int]
    artifact: Path | None = None

    @property
    def initial_loss(self) -> float:
        return self.epoch_losses[0]

    @property
    def final_loss(self) -> float:
        return self.epoch_losses[-1]

    def as_dict(self) -> dict:
        d = {k: v for k, v in self.__dict__.items()}
        d["artifact"] = str(self.artifact) if self.artifact else None
        return d


def _stratified_split(
    y: np.ndarray, holdout_fraction: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    train_idx: list[int] = []
    test_idx: list[int] = []
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        rng.shuffle(idx)
        n_test = min(len(idx) - 1, max(1, round(holdout_fraction * len(idx))))
        n_test = max(n_test, 0)
        test_idx.extend(idx[:n_test])
        train_idx.extend(idx[n_test:])
    return np.sort(np.asarray(train_idx)), np.sort(np.asarray(test_idx))


def train_classifier(
    X: np.ndarray,
    y: np.ndarray,
    class_names: list[str],
    *,
    epochs: int,
    lr: float,
    batch_size: int,
    seed: int,
    holdout_fraction: float = 0.25,
    flip_class: int | None = None,
    width: int = 16,
) -> tuple[DenseBlockNet, TrainingReport]:
    """Fit a DenseBlockNet on preprocessed tensors.

    X: float32 array (n, 3, res, res) in [0, 1]; y: int labels 0..C-1.
    flip_class: class index whose samples get random horizontal-flip
    augmentation during training (the only augmentation applied).
    Raises EmptyClass when any class has zero examples and DivergedTraining
    on a non-finite loss.
    """
    counts = {name: int((y == i).sum()) for i, name in enumerate(class_names)}
    empty = [name for name, n in counts.items() if n == 0]
    if empty:
        raise EmptyClass(f"no training examples for class(es): {', '.join(empty)}")

    torch.manual_seed(seed)
    rng = np.random.default_rng(seed)
    train_idx, test_idx = _stratified_split(y, holdout_fraction, rng)

    model = DenseBlockNet(num_classes=len(class_names), width=width)
    model.calibrate(torch.from_numpy(X[train_idx]))
    optimizer = torch.optim.Adam(model.parameters(), lr=lr, weight_decay=0.0)
    logger.info(
        "training config: optimizer=Adam batch_size=%d lr=%g weight_decay=0 epochs=%d seed=%d",
        batch_size, lr, epochs, seed,
    )

    X_t = torch.from_numpy(X)
    y_t = torch.from_numpy(y.astype(np.int64))
    flip_gen = torch.Generator().manual_seed(seed)

    epoch_losses: list[float] = []
    model.train()
    for epoch in range(epochs):
        order = rng.permutation(train_idx)
        total, n_seen = 0.0, 0
        for start in range(0, len(order), batch_size):
            batch = order[start : start + batch_size]
            xb = X_t[batch].clone()
            yb = y_t[batch]
            if flip_class is not None:
                flip = (yb == flip_class) & (
                    torch.rand(len(batch), generator=flip_gen) < 0.5
                )
                if flip.any():
                    xb[flip] = xb[flip].flip(-1)
            optimizer.zero_grad()
            loss = F.cross_entropy(model(xb), yb)
            if not torch.isfinite(loss):
                raise DivergedTraining(f"non-finite loss at epoch {epoch + 1}")
            loss.backward()
            optimizer.step()
            total += float(loss.detach()) * len(batch)
            n_seen += len(batch)
        epoch_losses.append(total / max(n_seen, 1))
        logger.info("epoch %d/%d loss=%.6f", epoch + 1, epochs, epoch_losses[-1])

    model.eval()
    if len(test_idx):
        with torch.no_grad():
            pred = model(X_t[test_idx]).argmax(dim=1)
        accuracy = float((pred == y_t[test_idx]).float().mean())
    else:
        accuracy = float("nan")
    logger.info("holdout accuracy: %.4f (%d examples)", accuracy, len(test_idx))

    report = TrainingReport(
        optimizer="Adam",
        batch_size=batch_size,
        lr=lr,
        weight_decay=0.0,
        epochs=epochs,
        seed=seed,
        epoch_losses=epoch_losses,
        holdout_accuracy=accuracy,
        n_train=len(train_idx),
        n_holdout=len(test_idx),
        class_counts=counts,
    )
    return model, report


def save_artifact(
    model: DenseBlockNet, out_dir: Path, *, kind: str, input_resolution: int, class_order: list[str]
) -> Path:
    """Persist weights plus the sidecar config that is part of the contract."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.save(model.state_dict(), out_dir / WEIGHTS_FILE)
    sidecar = {
        "kind": kind,
        "mode": "learned",
        "input_resolution": input_resolution,
        "class_order": class_order,
        "num_classes": model.num_classes,
        "width": model.width,
    }
    (out_dir / SIDECAR_FILE).write_text(json.dumps(sidecar, indent=2), encoding="utf-8")
    return out_dir


def load_artifact(model_dir: Path) -> tuple[DenseBlockNet, dict]:
    model_dir = Path(model_dir)
    weights = model_dir / WEIGHTS_FILE
    sidecar = model_dir / SIDECAR_FILE
    if not weights.exists() or not sidecar.exists():
        raise ModelMissing(f"no model artifact at {model_dir}")
    config = json.loads(sidecar.read_text(encoding="utf-8"))
    model = DenseBlockNet(num_classes=config["num_classes"], width=config["width"])
    model.load_state_dict(torch.load(weights, map_location="cpu", weights_only=True))
    model.eval()
    return model, config


def prepare_images(images: list[np.ndarray], resolution: int) -> np.ndarray:
    """Center-pad each image to square, resize, scale to [0,1], NCHW float32."""
    from .imaging import resize_bilinear

    out = np.empty((len(images), 3, resolution, resolution), dtype=np.float32)
    for i, img in enumerate(images):
        if img.ndim == 2:
            img = np.stack([img] * 3, axis=-1)
        h, w = img.shape[:2]
        side = max(h, w)
        if h != w:
            padded = np.zeros((side, side, 3), dtype=img.dtype)
            oy, ox = (side - h) // 2, (side - w) // 2
            padded[oy : oy + h, ox : ox + w] = img
            img = padded
        img = resize_bilinear(img, resolution, resolution)
        out[i] = img.astype(np.float32).transpose(2, 0, 1) / 255.0
    return out
