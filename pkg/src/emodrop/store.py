"""Append-only store of auto-labeled face images plus distribution reports.

Layout under the store root:

    manifest.tsv                    one record per line, appended atomically
    images/<emotion>/<record>.png   the stored frames

Manifest line fields, tab-separated:

    record_id  label  image_path  session_id  player_id|-  mode  verified(0/1)
    target_score(4dp)  ISO-8601 UTC timestamp

The image file is written before its manifest line, so a crash can leave
an orphan image but never a dangling record.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator

from .emotions import EMOTIONS, Emotion
from .errors import DanglingRecordError, ManifestParseError, StoreError
from .faces import FaceImage

MANIFEST_NAME = "manifest.tsv"
_FIELD_COUNT = 9


@dataclass(frozen=True)
class DatasetRecord:
    record_id: str
    label: Emotion
    image_path: str
    session_id: str
    player_id: str | None
    mode: str
    verified: bool
    target_score: float
    timestamp: str


@dataclass(frozen=True)
class Distribution:
    """Per-emotion record counts."""

    counts: tuple[int, ...]
    total: int

    def __getitem__(self, emotion: Emotion) -> int:
        return self.counts[int(emotion)]

    def as_dict(self) -> dict[str, int]:
        return {e.label: self.counts[int(e)] for e in EMOTIONS}

    def imbalance_ratio(self) -> float:
        """max(count) / min(count); inf when any class is empty."""
        low = min(self.counts)
        return float("inf") if low == 0 else max(self.counts) / low


def format_record(record: DatasetRecord) -> str:
    return "\t".join((
        record.record_id,
        record.label.label,
        record.image_path,
        record.session_id,
        record.player_id if record.player_id is not None else "-",
        record.mode,
        "1" if record.verified else "0",
        f"{record.target_score:.4f}",
        record.timestamp,
    ))


def parse_record(line: str, line_number: int) -> DatasetRecord:
    fields = line.rstrip("\n").split("\t")
    if len(fields) != _FIELD_COUNT:
        raise ManifestParseError(
            f"expected {_FIELD_COUNT} tab-separated fields, got {len(fields)}", line_number)
    record_id, label, image_path, session_id, player_id, mode, verified, score, ts = fields
    try:
        emotion = Emotion.from_label(label)
    except Exception:
        raise ManifestParseError(f"unknown emotion label {label!r}", line_number) from None
    if verified not in ("0", "1"):
        raise ManifestParseError(f"verified flag must be 0 or 1, got {verified!r}", line_number)
    try:
        target_score = float(score)
    except ValueError:
        raise ManifestParseError(f"bad target score {score!r}", line_number) from None
    return DatasetRecord(
        record_id=record_id,
        label=emotion,
        image_path=image_path,
        session_id=session_id,
        player_id=None if player_id == "-" else player_id,
        mode=mode,
        verified=verified == "1",
        target_score=target_score,
        timestamp=ts,
    )


def read_manifest(manifest_path: str | Path) -> list[DatasetRecord]:
    records = []
    with open(manifest_path, "r", encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            records.append(parse_record(line, line_number))
    return records


def read_distribution(manifest_path: str | Path) -> Distribution:
    """Exact per-emotion counts, a pure fold over the manifest."""
    counts = [0] * len(EMOTIONS)
    for record in read_manifest(manifest_path):
        counts[int(record.label)] += 1
    return Distribution(counts=tuple(counts), total=sum(counts))


class CollectionStore:
    """Filesystem-backed sample store; appends funnel through one lock."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.manifest_path = self.root / MANIFEST_NAME
        self._lock = threading.Lock()
        self._counts = [0] * len(EMOTIONS)
        if self.manifest_path.exists():
            for record in read_manifest(self.manifest_path):
                self._counts[int(record.label)] += 1

    def save_sample(self, image: FaceImage, label: Emotion, *, session_id: str,
                    player_id: str | None, mode: str, verified: bool,
                    target_score: float, timestamp: float | None = None) -> str:
        """Persist one labeled frame; returns the new record id."""
        record_id = uuid.uuid4().hex
        rel_path = f"images/{label.label}/{record_id}.png"
        if timestamp is None:
            ts = datetime.now(timezone.utc)
        else:
            ts = datetime.fromtimestamp(timestamp, tz=timezone.utc)
        record = DatasetRecord(
            record_id=record_id,
            label=label,
            image_path=rel_path,
            session_id=session_id,
            player_id=player_id,
            mode=mode,
            verified=verified,
            target_score=target_score,
            timestamp=ts.isoformat(timespec="milliseconds"),
        )
        line = format_record(record) + "\n"
        with self._lock:
            image_file = self.root / rel_path
            try:
                image_file.parent.mkdir(parents=True, exist_ok=True)
                image.save(image_file)
                with open(self.manifest_path, "a", encoding="utf-8") as fh:
                    fh.write(line)
            except OSError as exc:
                raise StoreError(f"failed to persist sample: {exc}") from exc
            self._counts[int(label)] += 1
        return record_id

    def counts(self) -> tuple[int, ...]:
        with self._lock:
            return tuple(self._counts)

    def total(self) -> int:
        return sum(self.counts())

    def distribution(self) -> Distribution:
        counts = self.counts()
        return Distribution(counts=counts, total=sum(counts))

    def records(self) -> list[DatasetRecord]:
        if not self.manifest_path.exists():
            return []
        return read_manifest(self.manifest_path)

    def load_dataset(self) -> Iterator[tuple[FaceImage, Emotion]]:
        """Yield (image, label) pairs in manifest order; nothing is skipped."""
        for record in self.records():
            path = self.root / record.image_path
            if not path.exists():
                raise DanglingRecordError(record.record_id, str(path))
            yield FaceImage.load(path), record.label


def load_dataset(root: str | Path) -> Iterator[tuple[FaceImage, Emotion]]:
    root = Path(root)
    if not (root / MANIFEST_NAME).exists():
        raise StoreError(f"no {MANIFEST_NAME} under {root}")
    return CollectionStore(root).load_dataset()


class InMemoryStore:
    """Count-only stand-in for CollectionStore, for simulations and tests."""

    def __init__(self, counts: tuple[int, ...] | None = None):
        self._counts = list(counts) if counts is not None else [0] * len(EMOTIONS)
        self._labels: list[tuple[Emotion, str]] = []
        self._lock = threading.Lock()
        self._next = 0

    def save_sample(self, image: FaceImage, label: Emotion, *, session_id: str,
                    player_id: str | None, mode: str, verified: bool,
                    target_score: float, timestamp: float | None = None) -> str:
        with self._lock:
            self._counts[int(label)] += 1
            self._next += 1
            record_id = f"mem-{self._next:08d}"
            self._labels.append((label, session_id))
        return record_id

    def counts(self) -> tuple[int, ...]:
        with self._lock:
            return tuple(self._counts)

    def total(self) -> int:
        return sum(self.counts())

    def saved(self) -> list[tuple[Emotion, str]]:
        with self._lock:
            return list(self._labels)
