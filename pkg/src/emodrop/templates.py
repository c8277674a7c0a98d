"""Per-player emotion templates and nearest-neighbor matching.

A player registers one face embedding per emotion; the customized game
mode then labels each frame with the emotion whose template is nearest in
L2 distance. Squared distances are compared (monotone with L2, no root).

Template file layout, one file per player (``<root>/<player_id>.gmt``):

    magic "GMT1"
    u32 feature_dimension (little-endian)
    u8 presence bitmap, bit i set = emotion index i present
    f32 template[feature_dimension] for each present emotion,
        canonical emotion order, little-endian
"""

from __future__ import annotations

import os
import re
import struct
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .backend import FeatureVector, ReferenceBackend
from .emotions import EMOTIONS, Emotion
from .errors import (
    ConfigError,
    IncompleteRegistrationError,
    NoFaceError,
    StoreError,
    UnregisteredPlayerError,
)
from .faces import FaceImage

TEMPLATE_MAGIC = b"GMT1"
_PLAYER_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]{0,63}$")


def validate_player_id(player_id: str) -> str:
    """Player ids double as file names; keep them path-safe."""
    if not _PLAYER_ID_RE.match(player_id):
        raise ConfigError(f"invalid player id {player_id!r}")
    return player_id


@dataclass(frozen=True)
class TemplateSet:
    """Immutable snapshot of one player's registered templates."""

    player_id: str
    templates: Mapping[Emotion, FeatureVector] = field(default_factory=dict)

    def __post_init__(self):
        dims = {fv.dimension for fv in self.templates.values()}
        if len(dims) > 1:
            raise ConfigError(f"mixed template dimensions {sorted(dims)}")

    @property
    def complete(self) -> bool:
        return len(self.templates) == len(EMOTIONS)

    @property
    def registered(self) -> list[Emotion]:
        return [e for e in EMOTIONS if e in self.templates]

    @property
    def missing(self) -> list[Emotion]:
        return [e for e in EMOTIONS if e not in self.templates]

    def with_template(self, emotion: Emotion, feature: FeatureVector) -> "TemplateSet":
        updated = dict(self.templates)
        updated[emotion] = feature
        return TemplateSet(self.player_id, updated)


def nearest_emotion(feature: FeatureVector, template_set: TemplateSet) -> Emotion:
    """Emotion of the template nearest to ``feature`` (squared L2).

    Ties resolve to the lowest canonical index. Requires a complete set.
    """
    if not template_set.complete:
        raise IncompleteRegistrationError([e.label for e in template_set.missing])
    query = feature.as_array()
    best: Emotion | None = None
    best_d2 = np.inf
    for e in EMOTIONS:
        diff = query - template_set.templates[e].as_array()
        d2 = float(diff @ diff)
        if d2 < best_d2:
            best, best_d2 = e, d2
    assert best is not None
    return best


class TemplateRegistry:
    """Shared store of per-player template sets, persisted one file each.

    Registrations for one player serialize on a per-player lock; matching
    reads an immutable snapshot, so it never sees a half-written set and
    can run concurrently with other players' registrations.
    """

    def __init__(self, backend: ReferenceBackend, root: str | Path):
        self.backend = backend
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._sets: dict[str, TemplateSet] = {}
        self._meta_lock = threading.Lock()
        self._player_locks: dict[str, threading.Lock] = {}
        for path in sorted(self.root.glob("*.gmt")):
            ts = read_template_file(path)
            self._sets[ts.player_id] = ts

    def _lock_for(self, player_id: str) -> threading.Lock:
        with self._meta_lock:
            return self._player_locks.setdefault(player_id, threading.Lock())

    def get(self, player_id: str) -> TemplateSet | None:
        return self._sets.get(player_id)

    def register_template(self, player_id: str, emotion: Emotion,
                          image: FaceImage) -> FeatureVector:
        """Embed the face and store it as the player's template for ``emotion``.

        Re-registering overwrites, so a player can retry until satisfied.
        Raises NoFaceError (naming the emotion) when no face is found; the
        stored set is left unchanged.
        """
        validate_player_id(player_id)
        region = self.backend.detect_face(image)
        if region is None:
            raise NoFaceError(
                f"no face detected while registering {emotion.label!r}; recapture it",
                emotion=emotion.label,
            )
        feature = self.backend.embed(image, region)
        with self._lock_for(player_id):
            current = self._sets.get(player_id) or TemplateSet(player_id)
            updated = current.with_template(emotion, feature)
            write_template_file(self.root / f"{player_id}.gmt", updated)
            self._sets[player_id] = updated
        return feature

    def complete_registration(self, player_id: str) -> TemplateSet:
        """Validate that all seven emotions are present; idempotent."""
        validate_player_id(player_id)
        with self._lock_for(player_id):
            ts = self._sets.get(player_id) or TemplateSet(player_id)
            if not ts.complete:
                raise IncompleteRegistrationError([e.label for e in ts.missing])
            return ts

    def require_complete(self, player_id: str) -> TemplateSet:
        ts = self._sets.get(player_id)
        if ts is None or not ts.complete:
            raise UnregisteredPlayerError(
                f"player {player_id!r} has no complete template set")
        return ts

    def match_template(self, player_id: str, image: FaceImage) -> Emotion:
        """Nearest-template emotion for the face in ``image``."""
        ts = self.require_complete(player_id)
        region = self.backend.detect_face(image)
        if region is None:
            raise NoFaceError()
        feature = self.backend.embed(image, region)
        return nearest_emotion(feature, ts)


def write_template_file(path: str | Path, template_set: TemplateSet) -> None:
    bitmap = 0
    payload = b""
    for e in EMOTIONS:
        fv = template_set.templates.get(e)
        if fv is not None:
            bitmap |= 1 << int(e)
            payload += np.asarray(fv.values, dtype="<f4").tobytes()
    dims = [fv.dimension for fv in template_set.templates.values()]
    dimension = dims[0] if dims else 0
    blob = TEMPLATE_MAGIC + struct.pack("<I", dimension) + struct.pack("B", bitmap) + payload
    tmp = Path(str(path) + ".tmp")
    tmp.write_bytes(blob)
    os.replace(tmp, path)


def read_template_file(path: str | Path) -> TemplateSet:
    path = Path(path)
    data = path.read_bytes()
    if data[:4] != TEMPLATE_MAGIC:
        raise StoreError(f"{path}: bad template magic {data[:4]!r}")
    if len(data) < 9:
        raise StoreError(f"{path}: truncated template header")
    (dimension,) = struct.unpack_from("<I", data, 4)
    bitmap = data[8]
    templates: dict[Emotion, FeatureVector] = {}
    offset = 9
    for e in EMOTIONS:
        if not bitmap & (1 << int(e)):
            continue
        end = offset + dimension * 4
        if len(data) < end:
            raise StoreError(f"{path}: truncated template for {e.label}")
        values = np.frombuffer(data, dtype="<f4", count=dimension, offset=offset)
        templates[e] = FeatureVector(tuple(float(v) for v in values))
        offset = end
    if len(data) != offset:
        raise StoreError(f"{path}: trailing bytes after templates")
    return TemplateSet(player_id=path.stem, templates=templates)
