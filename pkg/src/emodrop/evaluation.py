"""Classifier evaluation on labeled datasets, plus study score aggregation.

``evaluate`` runs pure recognition (argmax over the probability vector,
no thresholds) on every sample and fills a 7x7 confusion matrix with true
labels on rows. Cross evaluation is the same computation; "cross" only
names which (backend, dataset) pair is passed.

Report files are JSON documents:

    {"name": ..., "backend": ..., "dataset": ...,
     "accuracy": {"angry": 0.68, ...},
     "micro_average": ..., "macro_average": ...,
     "confusion": [[...7 ints...] x 7] | null}

The micro average is sample-weighted accuracy (trace / total); the macro
average is the unweighted mean of per-class accuracies over classes with
nonzero support. Study files are tab-separated lines:
player_id, engine_name, round_index, final_score.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .backend import ReferenceBackend
from .emotions import EMOTIONS, Emotion, top_emotion
from .errors import ConfigError, EmptyDatasetError, IncompleteStudyError
from .faces import FaceImage


@dataclass(frozen=True)
class EvaluationReport:
    name: str
    backend_name: str
    dataset_name: str
    per_emotion: tuple[float, ...]
    micro_average: float
    macro_average: float
    confusion: tuple[tuple[int, ...], ...] | None

    def accuracy(self, emotion: Emotion) -> float:
        return self.per_emotion[int(emotion)]

    def to_json(self) -> str:
        return json.dumps({
            "name": self.name,
            "backend": self.backend_name,
            "dataset": self.dataset_name,
            "accuracy": {e.label: self.per_emotion[int(e)] for e in EMOTIONS},
            "micro_average": self.micro_average,
            "macro_average": self.macro_average,
            "confusion": [list(row) for row in self.confusion] if self.confusion else None,
        }, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "EvaluationReport":
        raw = json.loads(text)
        try:
            accuracy = raw["accuracy"]
            per_emotion = tuple(float(accuracy[e.label]) for e in EMOTIONS)
            confusion = raw.get("confusion")
            return cls(
                name=raw["name"],
                backend_name=raw.get("backend", ""),
                dataset_name=raw.get("dataset", ""),
                per_emotion=per_emotion,
                micro_average=float(raw["micro_average"]),
                macro_average=float(raw["macro_average"]),
                confusion=tuple(tuple(int(v) for v in row) for row in confusion)
                if confusion else None,
            )
        except KeyError as exc:
            raise ConfigError(f"report file missing field {exc}") from None

    @classmethod
    def load(cls, path: str | Path) -> "EvaluationReport":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")


def report_from_confusion(confusion: Sequence[Sequence[int]], *, name: str,
                          backend_name: str = "", dataset_name: str = "") -> EvaluationReport:
    rows = tuple(tuple(int(v) for v in row) for row in confusion)
    supports = [sum(row) for row in rows]
    total = sum(supports)
    if total == 0:
        raise EmptyDatasetError("confusion matrix has no samples")
    per_emotion = tuple(
        rows[i][i] / supports[i] if supports[i] else 0.0 for i in range(len(EMOTIONS))
    )
    trace = sum(rows[i][i] for i in range(len(EMOTIONS)))
    supported = [per_emotion[i] for i in range(len(EMOTIONS)) if supports[i]]
    return EvaluationReport(
        name=name,
        backend_name=backend_name,
        dataset_name=dataset_name,
        per_emotion=per_emotion,
        micro_average=trace / total,
        macro_average=sum(supported) / len(supported),
        confusion=rows,
    )


def evaluate(backend: ReferenceBackend, dataset: Iterable[tuple[FaceImage, Emotion]],
             dataset_name: str = "dataset", name: str | None = None) -> EvaluationReport:
    """Classify every sample; fails on an empty dataset."""
    n = len(EMOTIONS)
    confusion = [[0] * n for _ in range(n)]
    total = 0
    for image, label in dataset:
        predicted = top_emotion(backend.classify(image))
        confusion[int(label)][int(predicted)] += 1
        total += 1
    if total == 0:
        raise EmptyDatasetError(f"dataset {dataset_name!r} has no samples")
    return report_from_confusion(
        confusion,
        name=name or f"{backend.name} on {dataset_name}",
        backend_name=backend.name,
        dataset_name=dataset_name,
    )


def cross_evaluate(backend: ReferenceBackend,
                   dataset: Iterable[tuple[FaceImage, Emotion]],
                   dataset_name: str = "dataset",
                   name: str | None = None) -> EvaluationReport:
    """Evaluate a backend on a dataset it was not fitted on; same code path."""
    return evaluate(backend, dataset, dataset_name=dataset_name, name=name)


def format_report(reports: Sequence[EvaluationReport]) -> str:
    """Text table: Average row, then the seven emotions, one column per report.

    Accuracies are rendered to two decimal places.
    """
    if not reports:
        raise ConfigError("format_report needs at least one report")
    headers = [r.name for r in reports]
    rows: list[tuple[str, list[str]]] = [
        ("Average", [f"{r.micro_average:.2f}" for r in reports])
    ]
    for e in EMOTIONS:
        rows.append((e.display, [f"{r.per_emotion[int(e)]:.2f}" for r in reports]))
    label_width = max(len(label) for label, _ in rows)
    widths = [max(len(h), 4) for h in headers]
    lines = [" " * label_width + "  " + "  ".join(
        h.rjust(widths[i]) for i, h in enumerate(headers))]
    for label, cells in rows:
        lines.append(label.ljust(label_width) + "  " + "  ".join(
            cell.rjust(widths[i]) for i, cell in enumerate(cells)))
    return "\n".join(lines)


@dataclass(frozen=True)
class StudyRecord:
    player_id: str
    engine_name: str
    round_index: int
    score: int

    def __post_init__(self):
        if self.round_index < 1:
            raise ConfigError(f"round index must be >= 1, got {self.round_index}")
        if self.score < 0:
            raise ConfigError(f"score must be >= 0, got {self.score}")


def parse_study_file(text: str) -> list[StudyRecord]:
    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise ConfigError(f"study line {lineno}: expected 4 tab-separated fields")
        player, engine, round_index, score = fields
        try:
            records.append(StudyRecord(player, engine, int(round_index), int(score)))
        except ValueError:
            raise ConfigError(f"study line {lineno}: bad integer field") from None
    return records


def load_study_file(path: str | Path) -> list[StudyRecord]:
    return parse_study_file(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class ScoreAggregate:
    player_id: str
    engine_name: str
    mean_score: float
    rounds: int


def aggregate_scores(records: Sequence[StudyRecord]) -> list[ScoreAggregate]:
    """Mean final score per (player, engine) group.

    Every player must have rounds for every engine seen in the study;
    a missing group fails the aggregation.
    """
    if not records:
        raise IncompleteStudyError("study has no records")
    players = sorted({r.player_id for r in records})
    engines = sorted({r.engine_name for r in records})
    groups: dict[tuple[str, str], list[int]] = {}
    for r in records:
        groups.setdefault((r.player_id, r.engine_name), []).append(r.score)
    aggregates = []
    for player in players:
        for engine in engines:
            scores = groups.get((player, engine))
            if not scores:
                raise IncompleteStudyError(
                    f"no rounds for player {player!r} on engine {engine!r}")
            aggregates.append(ScoreAggregate(
                player_id=player,
                engine_name=engine,
                mean_score=sum(scores) / len(scores),
                rounds=len(scores),
            ))
    return aggregates


def aggregates_to_tsv(aggregates: Sequence[ScoreAggregate]) -> str:
    """Plot-ready table: player, engine, mean score, rounds."""
    lines = ["player\tengine\tmean_score\trounds"]
    for a in aggregates:
        lines.append(f"{a.player_id}\t{a.engine_name}\t{a.mean_score:.4f}\t{a.rounds}")
    return "\n".join(lines) + "\n"
