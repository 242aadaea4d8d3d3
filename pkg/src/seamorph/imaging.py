"""Small image IO/resize helpers shared across modules."""
from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import UnreadableImage


def load_image(path: Path) -> np.ndarray:
    """Load an image file as an RGB uint8 array of shape (H, W, 3)."""
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"))
    except (OSError, ValueError) as exc:
        raise UnreadableImage(f"cannot decode image {path}: {exc}") from exc


def save_image(pixels: np.ndarray, path: Path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(pixels).save(path, format="PNG")


def encode_png(pixels: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(pixels).save(buf, format="PNG")
    return buf.getvalue()


def decode_image_bytes(data: bytes) -> np.ndarray:
    try:
        with Image.open(io.BytesIO(data)) as img:
            return np.asarray(img.convert("RGB"))
    except (OSError, ValueError) as exc:
        raise UnreadableImage(f"cannot decode image bytes: {exc}") from exc


def resize_bilinear(pixels: np.ndarray, width: int, height: int) -> np.ndarray:
    """Bilinear resize to exactly (height, width); pass-through when already sized."""
    if pixels.shape[0] == height and pixels.shape[1] == width:
        return pixels
    img = Image.fromarray(pixels)
    return np.asarray(img.resize((width, height), Image.BILINEAR))


def to_grayscale_unit(pixels: np.ndarray) -> np.ndarray:
    """RGB uint8 -> float32 luminance in [0, 1]."""
    arr = pixels.astype(np.float32) / 255.0
    if arr.ndim == 2:
        return arr
    return 0.299 * arr[..., 0] + 0.587 * arr[..., 1] + 0.114 * arr[..., 2]
