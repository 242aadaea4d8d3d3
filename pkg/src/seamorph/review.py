"""Human quality-review workflow: sessions, verdict ledger, good-image rates.

A session is a seeded sample of manifest images reviewed in a fixed order.
Reviewers submit three rule flags per image — background content is valid
(island / ocean / cloud, nothing alien), background looks realistic, and at
least one boat is preserved — and the service derives ``good`` as their
conjunction; clients never compute it. Verdicts are append-only, in the same
line-record idiom as the pipeline manifest, so all statistics are pure
recomputations from the ledger.
"""
from __future__ import annotations

import json
import logging
import math
import threading
import uuid
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateVerdict,
    IoFailure,
    NoSessions,
    UnknownItem,
    UnknownSession,
)
from .manifest import ManifestRecord, load_manifest

logger = logging.getLogger(__name__)

RULE_KEYS = ("background_valid", "background_realistic", "boat_preserved")

SESSIONS_FILE = "sessions.jsonl"
VERDICTS_FILE = "verdicts.jsonl"

DEFAULT_SAMPLE_SIZE = 100


@dataclass(frozen=True)
class ReviewVerdict:
    edited_id: str
    session_id: str
    reviewer: str
    good: bool
    rule_flags: dict[str, bool]
    timestamp: str


@dataclass(frozen=True)
class ReviewSession:
    session_id: str
    items: tuple[str, ...]
    sample_size: int
    seed: int
    subset: str
    created_at: str


@dataclass(frozen=True)
class SessionStats:
    session_id: str
    n_reviewed: int
    n_good: int

    @property
    def good_rate(self) -> float:
        return 100.0 * self.n_good / self.n_reviewed if self.n_reviewed else 0.0


def derive_good(rule_flags: dict[str, bool]) -> bool:
    """An image is good iff all three protocol rules hold."""
    missing = [k for k in RULE_KEYS if k not in rule_flags]
    if missing:
        raise ValueError(f"missing rule flag(s): {', '.join(missing)}")
    return all(bool(rule_flags[k]) for k in RULE_KEYS)


class ReviewStore:
    """Disk-backed session and verdict ledgers with serialized writes."""

    def __init__(self, root: Path, manifest_path: Path | None = None):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.manifest_path = Path(manifest_path) if manifest_path else None
        self._lock = threading.Lock()
        self._sessions: dict[str, ReviewSession] = {}
        self._verdicts: dict[str, dict[str, ReviewVerdict]] = {}
        self._replay()

    # --- persistence ---------------------------------------------------------

    def _replay(self) -> None:
        sessions_path = self.root / SESSIONS_FILE
        if sessions_path.exists():
            for line in sessions_path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                d = json.loads(line)
                session = ReviewSession(
                    session_id=d["session_id"],
                    items=tuple(d["items"]),
                    sample_size=int(d["sample_size"]),
                    seed=int(d["seed"]),
                    subset=d["subset"],
                    created_at=d["created_at"],
                )
                self._sessions[session.session_id] = session
                self._verdicts.setdefault(session.session_id, {})
        verdicts_path = self.root / VERDICTS_FILE
        if verdicts_path.exists():
            for line in verdicts_path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                d = json.loads(line)
                verdict = ReviewVerdict(**d)
                self._verdicts.setdefault(verdict.session_id, {})[verdict.edited_id] = verdict

    def _append(self, file_name: str, payload: dict) -> None:
        try:
            with open(self.root / file_name, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(payload, ensure_ascii=False, separators=(",", ":")) + "\n")
                fh.flush()
        except OSError as exc:
            raise IoFailure(f"cannot append to {file_name}: {exc}") from exc

    # --- sessions ------------------------------------------------------------

    def _manifest_records(self) -> list[ManifestRecord]:
        if self.manifest_path is None:
            raise IoFailure("review store was opened without a manifest")
        return load_manifest(self.manifest_path)

    def create_session(
        self,
        sample_size: int = DEFAULT_SAMPLE_SIZE,
        seed: int = 0,
        subset: str = "kept",
        session_id: str | None = None,
    ) -> ReviewSession:
        """Draw a seeded sample of manifest images as a new review queue.

        subset selects which records are eligible: "kept", "discarded" or
        "all" (the pre-filter population, for method-vs-method comparisons).
        """
        if subset not in ("kept", "discarded", "all"):
            raise ValueError(f"unknown subset {subset!r}")
        if sample_size < 1:
            raise ValueError("sample_size must be >= 1")
        records = self._manifest_records()
        if subset == "kept":
            pool = [r.edited_id for r in records if r.kept]
        elif subset == "discarded":
            pool = [r.edited_id for r in records if not r.kept]
        else:
            pool = [r.edited_id for r in records]
        if not pool:
            raise ValueError(f"manifest has no {subset!r} records to sample")
        if sample_size > len(pool):
            logger.warning(
                "sample_size %d exceeds %d eligible records; using all", sample_size, len(pool)
            )
        rng = np.random.default_rng(seed)
        n = min(sample_size, len(pool))
        items = tuple(pool[i] for i in rng.permutation(len(pool))[:n])

        session = ReviewSession(
            session_id=session_id or uuid.uuid4().hex[:12],
            items=items,
            sample_size=sample_size,
            seed=seed,
            subset=subset,
            created_at=datetime.now(timezone.utc).isoformat(),
        )
        with self._lock:
            if session.session_id in self._sessions:
                raise ValueError(f"session {session.session_id!r} already exists")
            self._append(SESSIONS_FILE, asdict(session) | {"items": list(session.items)})
            self._sessions[session.session_id] = session
            self._verdicts.setdefault(session.session_id, {})
        return session

    def get_session(self, session_id: str) -> ReviewSession:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSession(f"no session {session_id!r}") from None

    def session_ids(self) -> list[str]:
        return list(self._sessions)

    # --- review flow ---------------------------------------------------------

    def next_item(self, session_id: str) -> str | None:
        """First unreviewed item in the session's fixed order; None when done.

        Idempotent: repeated calls return the same item until its verdict
        arrives.
        """
        session = self.get_session(session_id)
        with self._lock:
            reviewed = self._verdicts.get(session_id, {})
            for item in session.items:
                if item not in reviewed:
                    return item
        return None

    def submit_verdict(
        self, session_id: str, edited_id: str, reviewer: str, rule_flags: dict[str, bool]
    ) -> ReviewVerdict:
        """Persist one verdict; ``good`` is derived here, never client-side."""
        session = self.get_session(session_id)
        if edited_id not in session.items:
            raise UnknownItem(f"item {edited_id!r} is not part of session {session_id!r}")
        flags = {k: bool(rule_flags[k]) for k in RULE_KEYS if k in rule_flags}
        verdict = ReviewVerdict(
            edited_id=edited_id,
            session_id=session_id,
            reviewer=reviewer,
            good=derive_good(rule_flags),
            rule_flags=flags,
            timestamp=datetime.now(timezone.utc).isoformat(),
        )
        with self._lock:
            if edited_id in self._verdicts.get(session_id, {}):
                raise DuplicateVerdict(
                    f"item {edited_id!r} already reviewed in session {session_id!r}"
                )
            self._append(VERDICTS_FILE, asdict(verdict))
            self._verdicts.setdefault(session_id, {})[edited_id] = verdict
        return verdict

    # --- statistics ----------------------------------------------------------

    def session_stats(self, session_id: str) -> SessionStats:
        self.get_session(session_id)
        verdicts = self._verdicts.get(session_id, {})
        return SessionStats(
            session_id=session_id,
            n_reviewed=len(verdicts),
            n_good=sum(1 for v in verdicts.values() if v.good),
        )

    def good_image_rate(self, session_ids: list[str]) -> tuple[float, float | None]:
        """Mean and sample standard deviation of per-session good rates.

        The std uses the n-1 denominator and is None with fewer than two
        sessions (reported as n/a).
        """
        stats = [self.session_stats(sid) for sid in session_ids]
        rates = [s.good_rate for s in stats if s.n_reviewed > 0]
        if not rates:
            raise NoSessions("no completed sessions to aggregate")
        mean = sum(rates) / len(rates)
        if len(rates) < 2:
            return mean, None
        variance = sum((r - mean) ** 2 for r in rates) / (len(rates) - 1)
        return mean, math.sqrt(variance)
