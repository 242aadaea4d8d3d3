"""Uniform contract for image-editing backends.

A backend receives a source image, an edit mask and a text prompt, and
returns a batch of edited images. Heavyweight diffusion services live out of
process behind the HTTP adapter; the in-process mock exists so the whole
pipeline runs and tests deterministically with no model at all.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np

from ..masks import EditMask
from ..types import EditedImage, SeaState, SourceImage

# Prompt texts used by the two shipped adapter profiles. The "bld" profile
# sends the single generic prompt and relies on seed variation for sea-state
# diversity; the "inpaint" profile cycles the four per-state prompts.
GENERIC_PROMPT = (
    "Aerial image of sea's surface. Canon EOS R3, Nikon d850 400mm, "
    "Canon DSLR, lens 300mm, 4K, HD"
)

_STATE_PROMPTS = {
    SeaState.SS1: (
        "Aerial image of the sea's surface. The water is gently rippled with no waves "
        "breaking. Canon EOS R3, Nikon d850 400mm, Canon DSLR, lens 300mm, 4K, HD."
    ),
    SeaState.SS2: (
        "Aerial image of the sea's surface. There are slight waves breaking with smooth "
        "wave on surface. Canon EOS R3, Nikon d850 400mm, Canon DSLR, lens 300mm, 4K, HD."
    ),
    SeaState.SS3: (
        "Aerial image of the sea's surface. Mild Waves are slight causing rock buoys and "
        "small craft. Canon EOS R3, Nikon d850 400mm, Canon DSLR, lens 300mm, 4K, HD."
    ),
    SeaState.SS4: (
        "Aerial image of the sea's surface. The water has furrowed appearance with "
        "moderate waves. Canon EOS R3, Nikon d850 400mm, Canon DSLR, lens 300mm, 4K, HD."
    ),
}


@dataclass(frozen=True)
class PromptBank:
    """Generic plus per-state prompt strings."""

    generic: str
    per_state: dict[SeaState, str]

    def __post_init__(self):
        if not self.generic:
            raise ValueError("prompt bank requires a generic prompt")
        missing = [s for s in SeaState if s not in self.per_state]
        if missing:
            raise ValueError(f"prompt bank missing per-state prompts for {missing}")


def default_prompt_bank() -> PromptBank:
    return PromptBank(generic=GENERIC_PROMPT, per_state=dict(_STATE_PROMPTS))


def select_prompt(bank: PromptBank, profile: str, generation_index: int) -> str:
    """Pick the prompt for one generation under the given adapter profile.

    "bld": generic prompt for every request. "inpaint": per-state prompts
    cycled by generation index (SS1, SS2, SS3, SS4, SS1, ...).
    """
    if profile == "bld":
        return bank.generic
    if profile == "inpaint":
        return bank.per_state[SeaState(generation_index % 4 + 1)]
    raise ValueError(f"unknown adapter profile {profile!r}")


@dataclass(frozen=True)
class GenerationRequest:
    """One backend call: edit ``source_pixels`` under ``mask`` per ``prompt``.

    Batch element i is generated with seed ``seed + i``, so a batch is
    reproducible from its base seed alone.
    """

    source: SourceImage
    source_pixels: np.ndarray = field(repr=False)
    mask: EditMask
    prompt: str
    seed: int
    batch_size: int = 1

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if (self.mask.height, self.mask.width) != self.source_pixels.shape[:2]:
            raise ValueError(
                f"mask dims {self.mask.width}x{self.mask.height} != source pixel dims "
                f"{self.source_pixels.shape[1]}x{self.source_pixels.shape[0]}"
            )


def edited_image_id(source_id: str, seed: int) -> str:
    """Canonical id for a generated image; unique per (source, seed)."""
    return f"{source_id}-e{seed:06d}"


@runtime_checkable
class GenerationBackend(Protocol):
    """Adapters must not share mutable state across in-flight requests."""

    name: str

    def generate(self, request: GenerationRequest) -> list[EditedImage]:
        ...
