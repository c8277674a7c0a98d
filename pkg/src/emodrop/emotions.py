"""Canonical emotion taxonomy, probability vectors, and the verification rule.

Verification differs from recognition: instead of asking which of the
seven emotions a face shows, it asks whether the probability of one known
target emotion clears that emotion's threshold. The game engine scores on
verification; the evaluation harness uses plain recognition (argmax).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError, InvalidScoresError

N_EMOTIONS = 7
SUM_TOLERANCE = 1e-6
DEFAULT_THRESHOLD = 0.5


class Emotion(enum.IntEnum):
    """The seven basic emotion classes, in canonical index order."""

    ANGRY = 0
    DISGUST = 1
    FEAR = 2
    HAPPY = 3
    NEUTRAL = 4
    SAD = 5
    SURPRISE = 6

    @property
    def label(self) -> str:
        """Lowercase wire/config label, e.g. ``"happy"``."""
        return self.name.lower()

    @property
    def display(self) -> str:
        """Capitalized label for report tables, e.g. ``"Happy"``."""
        return self.name.capitalize()

    @classmethod
    def from_label(cls, label: str) -> "Emotion":
        try:
            return cls[label.strip().upper()]
        except KeyError:
            raise ConfigError(f"unknown emotion label: {label!r}") from None


EMOTIONS: tuple[Emotion, ...] = tuple(Emotion)
EMOTION_LABELS: tuple[str, ...] = tuple(e.label for e in EMOTIONS)


@dataclass(frozen=True)
class EmotionScores:
    """Probability vector over the seven emotions, canonical index order.

    Every component must lie in [0, 1] and the components must sum to 1
    within ``SUM_TOLERANCE``.
    """

    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != N_EMOTIONS:
            raise InvalidScoresError(f"expected {N_EMOTIONS} components, got {len(self.values)}")
        for v in self.values:
            if not (0.0 <= v <= 1.0):
                raise InvalidScoresError(f"component {v!r} outside [0, 1]")
        total = sum(self.values)
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise InvalidScoresError(f"components sum to {total!r}, not 1")

    def __getitem__(self, emotion: Emotion) -> float:
        return self.values[int(emotion)]

    def as_dict(self) -> dict[str, float]:
        return {e.label: self.values[int(e)] for e in EMOTIONS}


@dataclass(frozen=True)
class ThresholdTable:
    """Per-emotion verification thresholds, each in [0, 1]."""

    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != N_EMOTIONS:
            raise ConfigError(f"expected {N_EMOTIONS} thresholds, got {len(self.values)}")
        for v in self.values:
            if not (0.0 <= v <= 1.0):
                raise ConfigError(f"threshold {v!r} outside [0, 1]")

    def __getitem__(self, emotion: Emotion) -> float:
        return self.values[int(emotion)]

    @classmethod
    def uniform(cls, value: float = DEFAULT_THRESHOLD) -> "ThresholdTable":
        return cls((value,) * N_EMOTIONS)

    @classmethod
    def from_mapping(cls, mapping: Mapping[Emotion, float],
                     default: float = DEFAULT_THRESHOLD) -> "ThresholdTable":
        return cls(tuple(mapping.get(e, default) for e in EMOTIONS))


@dataclass(frozen=True)
class VerificationDecision:
    """Outcome of checking one target emotion against a score vector."""

    matched: bool
    target: Emotion
    target_score: float
    threshold_used: float


def normalize_scores(raw: Sequence[float]) -> EmotionScores:
    """Scale a raw non-negative 7-vector so it sums to 1.

    Raises InvalidScoresError for a wrong-length, negative, or all-zero
    input.
    """
    if len(raw) != N_EMOTIONS:
        raise InvalidScoresError(f"expected {N_EMOTIONS} components, got {len(raw)}")
    values = [float(v) for v in raw]
    for v in values:
        if v < 0.0:
            raise InvalidScoresError(f"negative component {v!r}")
    total = sum(values)
    if total <= 0.0:
        raise InvalidScoresError("all components are zero")
    return EmotionScores(tuple(v / total for v in values))


def verify(target: Emotion, scores: EmotionScores,
           thresholds: ThresholdTable) -> VerificationDecision:
    """Decide whether ``scores`` clears the threshold for ``target``."""
    score = scores[target]
    threshold = thresholds[target]
    return VerificationDecision(
        matched=score >= threshold,
        target=target,
        target_score=score,
        threshold_used=threshold,
    )


def top_emotion(scores: EmotionScores) -> Emotion:
    """Argmax over the seven components; ties go to the lowest index."""
    best = Emotion.ANGRY
    best_value = scores.values[0]
    for e in EMOTIONS[1:]:
        v = scores.values[int(e)]
        if v > best_value:
            best, best_value = e, v
    return best


def parse_thresholds(text: str, default: float = DEFAULT_THRESHOLD) -> ThresholdTable:
    """Parse ``<label>=<real>`` lines into a threshold table.

    Labels are the lowercase canonical names; emotions not mentioned take
    ``default``. Blank lines and ``#`` comments are ignored.
    """
    seen: dict[Emotion, float] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"thresholds line {lineno}: expected <label>=<real>, got {line!r}")
        label, _, value_text = line.partition("=")
        emotion = Emotion.from_label(label)
        try:
            value = float(value_text.strip())
        except ValueError:
            raise ConfigError(f"thresholds line {lineno}: bad number {value_text.strip()!r}") from None
        if not (0.0 <= value <= 1.0):
            raise ConfigError(f"thresholds line {lineno}: {value} outside [0, 1]")
        seen[emotion] = value
    return ThresholdTable.from_mapping(seen, default=default)


def load_thresholds(path, default: float = DEFAULT_THRESHOLD) -> ThresholdTable:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_thresholds(fh.read(), default=default)
