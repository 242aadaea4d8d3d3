"""End-to-end orchestration: generate, classify, resize, crop, check, record.

Each source image is expanded into ``images_per_source`` generations; every
generation gets exactly one manifest record (minus per-item failures, which
are logged and counted, never aborting the run). Kept images land under
``output_root/SS<k>/``; the run is resumable because records key on
deterministic edited ids derived from the master seed.
"""
from __future__ import annotations

import dataclasses
import json
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .backends import (
    GenerationRequest,
    HttpBackend,
    MockBackend,
    MockBackendConfig,
    default_prompt_bank,
    edited_image_id,
    select_prompt,
)
from .errors import EmptyManifest, IoFailure, SeamorphError
from .imaging import load_image, resize_bilinear, save_image
from .manifest import (
    DatasetStats,
    ManifestRecord,
    append_record,
    compute_stats,
    load_manifest,
)
from .masks import build_mask
from .preservation import CheckerConfig, CheckerVerdict, check_crop, extract_positive_crops
from .seastate import ClassifierConfig, classify_sea_state
from .types import EditedImage, SeaState, SourceImage

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.jsonl"
SUMMARY_NAME = "run_summary.json"


@dataclass(frozen=True)
class BackendSettings:
    """Which backend to drive and how (config file section [backend])."""

    name: str = "mock"
    endpoint: str = ""
    timeout_s: float = 30.0
    batch_size: int = 10
    profile: str = "bld"
    # mock-only knobs
    corrupt_objects: bool = False
    corrupt_every: int = 0
    roughness: float | None = None


@dataclass(frozen=True)
class PipelineConfig:
    output_root: Path
    backend: BackendSettings = BackendSettings()
    classifier: ClassifierConfig = ClassifierConfig()
    checker: CheckerConfig = CheckerConfig()
    images_per_source: int = 1
    seed: int = 0
    keep_discarded: bool = False
    workers: int = 1
    audit_all_crops: bool = False
    mask_dilation: int = 0

    def __post_init__(self):
        if self.images_per_source < 1:
            raise ValueError(f"images_per_source must be >= 1, got {self.images_per_source}")


def make_backend(settings: BackendSettings):
    if settings.name == "mock":
        return MockBackend(
            MockBackendConfig(
                corrupt_objects=settings.corrupt_objects,
                corrupt_every=settings.corrupt_every,
                roughness=settings.roughness,
            )
        )
    if settings.name == "http":
        return HttpBackend(
            endpoint=settings.endpoint, name=settings.name, timeout_s=settings.timeout_s
        )
    raise ValueError(f"unknown backend {settings.name!r}")


def resize_to_source(edited: EditedImage, src: SourceImage) -> EditedImage:
    """Bilinear-resize the edited image to the source dims.

    Already-source-sized images pass through bit-identical.
    """
    if (edited.height, edited.width) == (src.height, src.width):
        return edited
    resized = resize_bilinear(edited.pixels, src.width, src.height)
    return dataclasses.replace(edited, pixels=resized)


def filter_decision(verdicts: list[CheckerVerdict]) -> bool:
    """Keep iff at least one crop verdict is boat; no verdicts means discard."""
    return any(v.verdict == "boat" for v in verdicts)


def passing_rate(stats: DatasetStats) -> float:
    """Percentage of generated images retained by the filters."""
    if stats.total_generated == 0:
        raise EmptyManifest("passing rate undefined: manifest has zero generated images")
    return 100.0 * stats.total_filtered / stats.total_generated


@dataclass
class _RunState:
    manifest: Path
    lock: threading.Lock = field(default_factory=threading.Lock)
    records: int = 0
    failed_items: int = 0
    skipped_sources: int = 0


def _seed_for(cfg: PipelineConfig, source_index: int, generation: int) -> int:
    return cfg.seed + source_index * cfg.images_per_source + generation


def _process_edited(
    edited: EditedImage,
    source: SourceImage,
    source_pixels: np.ndarray,
    cfg: PipelineConfig,
    state: _RunState,
) -> None:
    level, _scores = classify_sea_state(edited, cfg.classifier)
    edited = dataclasses.replace(edited, sea_state=level)
    edited = resize_to_source(edited, source)
    crops = extract_positive_crops(edited, source, source_pixels=source_pixels)

    verdicts: list[CheckerVerdict] = []
    for crop in crops:
        verdict = check_crop(crop, cfg.checker)
        verdicts.append(verdict)
        if verdict.verdict == "boat" and not cfg.audit_all_crops:
            break
    kept = filter_decision(verdicts)

    if kept:
        out_path = Path(cfg.output_root) / f"SS{level.value}" / f"{edited.id}.png"
        save_image(edited.pixels, out_path)
    elif cfg.keep_discarded:
        out_path = Path(cfg.output_root) / "discarded" / f"{edited.id}.png"
        save_image(edited.pixels, out_path)

    record = ManifestRecord(
        edited_id=edited.id,
        source_id=source.id,
        backend_name=edited.backend_name,
        prompt=edited.prompt,
        seed=edited.seed,
        sea_state=level.value,
        crop_verdicts=tuple(
            {"box_index": v.box_index, "verdict": v.verdict} for v in verdicts
        ),
        kept=kept,
    )
    with state.lock:
        append_record(state.manifest, record)
        state.records += 1


def _process_source(
    source: SourceImage,
    source_index: int,
    cfg: PipelineConfig,
    backend,
    existing: set[str],
    state: _RunState,
) -> None:
    if not source.boat_boxes:
        logger.warning("skipping source %s: no boat boxes to preserve", source.id)
        with state.lock:
            state.skipped_sources += 1
        return

    pending = [
        j
        for j in range(cfg.images_per_source)
        if edited_image_id(source.id, _seed_for(cfg, source_index, j)) not in existing
    ]
    if not pending:
        return

    source_pixels = load_image(source.path)
    mask = build_mask(source, cfg.mask_dilation)
    bank = default_prompt_bank()

    # bld profile batches contiguous seeds under the generic prompt;
    # inpaint issues per-generation requests with cycling per-state prompts
    batches: list[tuple[int, int, str]] = []  # (first generation, count, prompt)
    if cfg.backend.profile == "bld":
        runs: list[tuple[int, int]] = []
        start = prev = pending[0]
        for j in pending[1:]:
            if j != prev + 1:
                runs.append((start, prev))
                start = j
            prev = j
        runs.append((start, prev))
        for lo, hi in runs:
            for s in range(lo, hi + 1, cfg.backend.batch_size):
                count = min(cfg.backend.batch_size, hi - s + 1)
                batches.append((s, count, select_prompt(bank, "bld", s)))
    else:
        batches = [(j, 1, select_prompt(bank, cfg.backend.profile, j)) for j in pending]

    for first, count, prompt in batches:
        request = GenerationRequest(
            source=source,
            source_pixels=source_pixels,
            mask=mask,
            prompt=prompt,
            seed=_seed_for(cfg, source_index, first),
            batch_size=count,
        )
        try:
            outputs = backend.generate(request)
        except SeamorphError as exc:
            logger.error("generation failed for source %s: %s", source.id, exc)
            with state.lock:
                state.failed_items += count
            continue
        for edited in outputs:
            try:
                _process_edited(edited, source, source_pixels, cfg, state)
            except IoFailure:
                raise  # a broken manifest must abort the run, not be skipped
            except SeamorphError as exc:
                logger.error("processing failed for %s: %s", edited.id, exc)
                with state.lock:
                    state.failed_items += 1


def run_pipeline(sources: list[SourceImage], cfg: PipelineConfig) -> Path:
    """Run the full generate-classify-check loop; returns the manifest path.

    Component failures are isolated per item (logged and counted); only a
    manifest IoFailure aborts. Rerunning against an existing manifest skips
    generations that already have records, so interrupted runs resume to the
    same final record set.
    """
    output_root = Path(cfg.output_root)
    output_root.mkdir(parents=True, exist_ok=True)
    manifest = output_root / MANIFEST_NAME

    existing: set[str] = set()
    if manifest.exists():
        existing = {r.edited_id for r in load_manifest(manifest)}
        if existing:
            logger.info("resuming run: %d records already present", len(existing))

    backend = make_backend(cfg.backend)
    state = _RunState(manifest=manifest)

    if cfg.workers <= 1:
        for i, source in enumerate(sources):
            _process_source(source, i, cfg, backend, existing, state)
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [
                pool.submit(_process_source, source, i, cfg, backend, existing, state)
                for i, source in enumerate(sources)
            ]
            for future in futures:
                future.result()

    stats = compute_stats(manifest)
    summary = {
        "n_sources": len(sources),
        "images_per_source": cfg.images_per_source,
        "records": stats.total_generated,
        "new_records": state.records,
        "failed_items": state.failed_items,
        "skipped_sources": state.skipped_sources,
        **stats.as_dict(),
        "passing_rate": (
            round(passing_rate(stats), 4) if stats.total_generated else None
        ),
    }
    (output_root / SUMMARY_NAME).write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest
