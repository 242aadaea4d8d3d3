from .base import (
    GENERIC_PROMPT,
    GenerationBackend,
    GenerationRequest,
    PromptBank,
    default_prompt_bank,
    edited_image_id,
    select_prompt,
)
from .http import HttpBackend
from .mock import MockBackend, MockBackendConfig, roughness_from_seed, sea_texture

__all__ = [
    "GENERIC_PROMPT",
    "GenerationBackend",
    "GenerationRequest",
    "PromptBank",
    "default_prompt_bank",
    "edited_image_id",
    "select_prompt",
    "HttpBackend",
    "MockBackend",
    "MockBackendConfig",
    "roughness_from_seed",
    "sea_texture",
]
