"""Append-only JSONL manifest: one line per generated image.

The manifest is the pipeline's ledger. Records are appended as single
self-describing JSON objects (UTF-8, one per line) so that a crash mid-run
leaves at most one torn final line, which is tolerated and skipped on load.
Appends must be serialized by the caller (single-writer contract); loading
is read-only and concurrent-safe.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, asdict
from datetime import datetime, timezone
from pathlib import Path

from .errors import IoFailure, ValidationError
from .types import SeaState

logger = logging.getLogger(__name__)

VERDICT_BOAT = "boat"
VERDICT_NOT_BOAT = "not_boat"


@dataclass(frozen=True)
class ManifestRecord:
    """Ledger row tying a generated image to its provenance and keep decision."""

    edited_id: str
    source_id: str
    backend_name: str
    prompt: str
    seed: int
    sea_state: int
    crop_verdicts: tuple[dict, ...]
    kept: bool
    created_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def validate(self) -> None:
        if self.sea_state not in (1, 2, 3, 4):
            raise ValidationError(f"sea_state must be 1..4, got {self.sea_state}")
        for v in self.crop_verdicts:
            if set(v) != {"box_index", "verdict"} or v["verdict"] not in (
                VERDICT_BOAT,
                VERDICT_NOT_BOAT,
            ):
                raise ValidationError(f"malformed crop verdict: {v}")
        any_boat = any(v["verdict"] == VERDICT_BOAT for v in self.crop_verdicts)
        if self.kept != any_boat:
            raise ValidationError(
                f"kept={self.kept} inconsistent with verdicts {self.crop_verdicts}"
            )

    def to_json(self) -> str:
        d = asdict(self)
        d["crop_verdicts"] = list(self.crop_verdicts)
        return json.dumps(d, ensure_ascii=False, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "ManifestRecord":
        return cls(
            edited_id=d["edited_id"],
            source_id=d["source_id"],
            backend_name=d["backend_name"],
            prompt=d["prompt"],
            seed=int(d["seed"]),
            sea_state=int(d["sea_state"]),
            crop_verdicts=tuple(d["crop_verdicts"]),
            kept=bool(d["kept"]),
            created_at=d["created_at"],
        )


def append_record(manifest: Path, record: ManifestRecord) -> None:
    """Validate and append one record as a single atomic line write."""
    record.validate()
    line = record.to_json() + "\n"
    try:
        with open(manifest, "a", encoding="utf-8") as fh:
            fh.write(line)
            fh.flush()
    except OSError as exc:
        raise IoFailure(f"cannot append to manifest {manifest}: {exc}") from exc


def load_manifest(manifest: Path) -> list[ManifestRecord]:
    """Load all records in order; a torn final line is skipped with a warning."""
    try:
        with open(manifest, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise IoFailure(f"cannot read manifest {manifest}: {exc}") from exc

    records: list[ManifestRecord] = []
    for i, line in enumerate(lines):
        stripped = line.strip()
        if not stripped:
            continue
        try:
            records.append(ManifestRecord.from_dict(json.loads(stripped)))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            if i == len(lines) - 1:
                logger.warning("skipping torn final manifest line in %s: %s", manifest, exc)
                break
            raise IoFailure(f"corrupt manifest line {i + 1} in {manifest}: {exc}") from exc
    return records


@dataclass
class DatasetStats:
    """Per-sea-state counts before (generated) and after (filtered) the checks."""

    generated_per_state: dict[SeaState, int] = field(
        default_factory=lambda: {s: 0 for s in SeaState}
    )
    filtered_per_state: dict[SeaState, int] = field(
        default_factory=lambda: {s: 0 for s in SeaState}
    )

    @property
    def total_generated(self) -> int:
        return sum(self.generated_per_state.values())

    @property
    def total_filtered(self) -> int:
        return sum(self.filtered_per_state.values())

    def as_dict(self) -> dict:
        return {
            "generated_per_state": {f"SS{s.value}": n for s, n in self.generated_per_state.items()},
            "filtered_per_state": {f"SS{s.value}": n for s, n in self.filtered_per_state.items()},
            "total_generated": self.total_generated,
            "total_filtered": self.total_filtered,
        }


def compute_stats(manifest: Path) -> DatasetStats:
    """Stream the manifest and count every record (and each kept record) per state."""
    stats = DatasetStats()
    try:
        with open(manifest, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise IoFailure(f"cannot read manifest {manifest}: {exc}") from exc

    for i, line in enumerate(lines):
        stripped = line.strip()
        if not stripped:
            continue
        try:
            d = json.loads(stripped)
            state = SeaState(int(d["sea_state"]))
            kept = bool(d["kept"])
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            if i == len(lines) - 1:
                logger.warning("skipping torn final manifest line in %s: %s", manifest, exc)
                break
            raise IoFailure(f"corrupt manifest line {i + 1} in {manifest}: {exc}") from exc
        stats.generated_per_state[state] += 1
        if kept:
            stats.filtered_per_state[state] += 1
    return stats
