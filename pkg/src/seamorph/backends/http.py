"""Out-of-process generation service adapter.

Wire contract (JSON over HTTP, POST ``{endpoint}/generate``):

    request:  {"image": <b64 PNG>, "mask": <b64 PNG, object=black>,
               "prompt": str, "seed": int, "batch_size": int}
    response: {"images": [<b64 PNG>, ...]}
              or {"error": {"message": str, "request_id": str}}

Extra adapter-level options (inference steps, guidance, resolution) are
passed through opaquely via ``extra``; this module never interprets them.
"""
from __future__ import annotations

import base64
from typing import Any

import httpx

from ..errors import BackendTimeout, BackendUnavailable, GenerationFailed
from ..imaging import decode_image_bytes, encode_png
from ..types import EditedImage
from .base import GenerationRequest, edited_image_id


class HttpBackend:
    """Adapter for a generation service speaking the wire contract above."""

    def __init__(
        self,
        endpoint: str,
        name: str = "http",
        timeout_s: float = 30.0,
        extra: dict[str, Any] | None = None,
        transport: httpx.BaseTransport | None = None,
    ):
        self.name = name
        self.endpoint = endpoint.rstrip("/")
        self.timeout_s = timeout_s
        self.extra = extra or {}
        self._client = httpx.Client(transport=transport, timeout=timeout_s)

    def close(self) -> None:
        self._client.close()

    def generate(self, request: GenerationRequest) -> list[EditedImage]:
        payload = {
            "image": base64.b64encode(encode_png(request.source_pixels)).decode("ascii"),
            "mask": base64.b64encode(encode_png(request.mask.pixels)).decode("ascii"),
            "prompt": request.prompt,
            "seed": request.seed,
            "batch_size": request.batch_size,
            **self.extra,
        }
        try:
            resp = self._client.post(f"{self.endpoint}/generate", json=payload)
        except httpx.TimeoutException as exc:
            raise BackendTimeout(
                f"generation request exceeded {self.timeout_s}s deadline: {exc}"
            ) from exc
        except httpx.TransportError as exc:
            raise BackendUnavailable(f"generation service unreachable: {exc}") from exc

        if resp.status_code >= 400:
            raise GenerationFailed(f"generation service returned HTTP {resp.status_code}")
        body = resp.json()
        if "error" in body:
            err = body["error"] or {}
            raise GenerationFailed(
                str(err.get("message", "backend error")), request_id=err.get("request_id")
            )
        images = body.get("images")
        if not isinstance(images, list) or len(images) != request.batch_size:
            raise GenerationFailed(
                f"expected {request.batch_size} images, got "
                f"{len(images) if isinstance(images, list) else type(images).__name__}"
            )

        outputs: list[EditedImage] = []
        for i, b64 in enumerate(images):
            pixels = decode_image_bytes(base64.b64decode(b64))
            seed = request.seed + i
            outputs.append(
                EditedImage(
                    id=edited_image_id(request.source.id, seed),
                    source_id=request.source.id,
                    pixels=pixels,
                    backend_name=self.name,
                    prompt=request.prompt,
                    seed=seed,
                )
            )
        return outputs
