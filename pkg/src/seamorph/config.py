"""TOML run configuration with command-line overrides (flags win)."""
from __future__ import annotations

import sys
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .pipeline import BackendSettings, PipelineConfig
from .preservation import CheckerConfig
from .seastate import ClassifierConfig


def _section(data: dict, name: str) -> dict[str, Any]:
    value = data.get(name, {})
    if not isinstance(value, dict):
        raise ValueError(f"config section [{name}] must be a table")
    return dict(value)


def load_config(path: Path | None, overrides: dict[str, Any] | None = None) -> PipelineConfig:
    """Build a PipelineConfig from a TOML file plus CLI overrides.

    Recognized sections: [backend], [classifier], [checker], [pipeline].
    Override keys: seed, workers, output_root, images_per_source.
    """
    data: dict[str, Any] = {}
    if path is not None:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)

    backend_raw = _section(data, "backend")
    backend = BackendSettings(
        name=backend_raw.get("name", "mock"),
        endpoint=backend_raw.get("endpoint", ""),
        timeout_s=float(backend_raw.get("timeout_s", 30.0)),
        batch_size=int(backend_raw.get("batch_size", 10)),
        profile=backend_raw.get("profile", "bld"),
        corrupt_objects=bool(backend_raw.get("corrupt_objects", False)),
        corrupt_every=int(backend_raw.get("corrupt_every", 0)),
        roughness=backend_raw.get("roughness"),
    )

    classifier_raw = _section(data, "classifier")
    classifier = ClassifierConfig(
        mode=classifier_raw.get("mode", "synthetic_feature"),
        model_path=Path(classifier_raw["model_path"]) if classifier_raw.get("model_path") else None,
        input_resolution=int(classifier_raw.get("input_resolution", 64)),
        seed=int(classifier_raw.get("seed", 0)),
        thresholds=tuple(classifier_raw["thresholds"])
        if "thresholds" in classifier_raw
        else ClassifierConfig().thresholds,
    )

    checker_raw = _section(data, "checker")
    checker = CheckerConfig(
        mode=checker_raw.get("mode", "synthetic_feature"),
        model_path=Path(checker_raw["model_path"]) if checker_raw.get("model_path") else None,
        threshold=float(checker_raw.get("threshold", 0.5)),
        input_resolution=int(checker_raw.get("input_resolution", 64)),
    )

    pipeline_raw = _section(data, "pipeline")
    merged = dict(pipeline_raw)
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value

    output_root = merged.get("output_root")
    if output_root is None:
        raise ValueError("output_root is required (config [pipeline] or --output)")

    return PipelineConfig(
        output_root=Path(output_root),
        backend=backend,
        classifier=classifier,
        checker=checker,
        images_per_source=int(merged.get("images_per_source", 1)),
        seed=int(merged.get("seed", 0)),
        keep_discarded=bool(merged.get("keep_discarded", False)),
        workers=int(merged.get("workers", 1)),
        audit_all_crops=bool(merged.get("audit_all_crops", False)),
        mask_dilation=int(merged.get("mask_dilation", 0)),
    )
