"""Deterministic in-process test double for the generation contract.

EDITABLE pixels are replaced with a seeded procedural water texture whose
high-frequency amplitude ("roughness") is derived from the seed, so different
seeds land in different sea-state buckets under the synthetic-feature
classifier. OBJECT pixels are copied from the source bit-exactly, unless
``corrupt_objects`` (or the per-seed ``corrupt_every`` schedule) is active,
which overwrites them too and guarantees at least one differing pixel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image

from ..masks import OBJECT
from ..types import EditedImage
from .base import GenerationRequest, edited_image_id

MOCK_BACKEND_NAME = "mock"


@dataclass(frozen=True)
class MockBackendConfig:
    """Knobs for exercising pipeline paths without a real backend.

    corrupt_objects: overwrite OBJECT pixels on every output.
    corrupt_every: overwrite OBJECT pixels on outputs whose per-image seed is
        divisible by this value (0 disables the schedule).
    roughness: override the seed-derived roughness; the noise stream is then
        independent of roughness, which makes monotonicity fixtures exact.
    """

    corrupt_objects: bool = False
    corrupt_every: int = 0
    roughness: float | None = None


def roughness_from_seed(seed: int) -> float:
    """Seed-derived roughness in (0, 1); first draw of the texture stream."""
    return float(np.random.default_rng(seed).uniform())


def sea_texture(height: int, width: int, seed: int, roughness: float | None = None) -> np.ndarray:
    """Procedural water texture: smooth swell plus roughness-scaled chop.

    Bit-identical for identical (dims, seed, roughness).
    """
    rng = np.random.default_rng(seed)
    r = rng.uniform() if roughness is None else float(roughness)
    coarse = rng.uniform(-1.0, 1.0, (max(2, height // 8), max(2, width // 8)))
    swell = np.asarray(
        Image.fromarray(coarse.astype(np.float32), mode="F").resize(
            (width, height), Image.BILINEAR
        )
    )
    chop = rng.uniform(-1.0, 1.0, (height, width)).astype(np.float32)
    lum = 95.0 + 22.0 * swell + 110.0 * r * chop
    lum = np.clip(lum, 0.0, 255.0)
    # slightly blue-tinted channels so outputs look like water, not static
    rgb = np.stack([0.55 * lum, 0.75 * lum, lum], axis=-1)
    return np.clip(rgb, 0, 255).astype(np.uint8)


class MockBackend:
    """Procedural stand-in satisfying the GenerationBackend contract."""

    name = MOCK_BACKEND_NAME

    def __init__(self, config: MockBackendConfig | None = None):
        self.config = config or MockBackendConfig()

    def _corrupt(self, seed: int) -> bool:
        if self.config.corrupt_objects:
            return True
        if self.config.corrupt_every:
            return seed % self.config.corrupt_every == 0
        return False

    def generate(self, request: GenerationRequest) -> list[EditedImage]:
        src = request.source_pixels
        object_mask = request.mask.pixels == OBJECT
        outputs: list[EditedImage] = []
        for i in range(request.batch_size):
            seed = request.seed + i
            texture = sea_texture(src.shape[0], src.shape[1], seed, self.config.roughness)
            out = texture.copy()
            if self._corrupt(seed):
                # keep the texture over objects but force a per-pixel difference
                region = out[object_mask]
                src_region = src[object_mask]
                out[object_mask] = np.where(region == src_region, region ^ 1, region)
            else:
                out[object_mask] = src[object_mask]
            outputs.append(
                EditedImage(
                    id=edited_image_id(request.source.id, seed),
                    source_id=request.source.id,
                    pixels=out,
                    backend_name=self.name,
                    prompt=request.prompt,
                    seed=seed,
                )
            )
        return outputs
