"""Pluggable emotion classifier/embedder and the affine reference backend.

The production role here is normally filled by a large vision model on a
GPU box; this package isolates that behind two calls, ``classify`` (a
probability vector over the seven emotions) and ``embed`` (a feature
vector used for per-player template matching). The bundled reference
backend is a fully deterministic affine pipeline so every number it
produces can be recomputed by hand:

    pixels = grayscale(nearest_resize(face_crop, side)) / 255
    feature = F @ pixels + c
    logits  = W @ feature + b
    scores  = softmax(logits)

Weight file layout (little-endian, no padding):

    magic "GMF1"
    u32 input_side, u32 feature_dimension, u32 n_classes (=7), u32 flags (=0)
    f32 F[feature_dimension * input_side^2]   row-major
    f32 c[feature_dimension]
    f32 W[7 * feature_dimension]              row-major
    f32 b[7]
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .emotions import EmotionScores, N_EMOTIONS
from .errors import BackendLoadError
from .faces import FaceImage, FaceRegion, center_square, crop, detect_face

WEIGHTS_MAGIC = b"GMF1"
MIN_INPUT_SIDE = 16


@dataclass(frozen=True)
class FeatureVector:
    """Finite real-valued embedding of a face."""

    values: tuple[float, ...]

    def __post_init__(self):
        for v in self.values:
            if not np.isfinite(v):
                raise ValueError(f"non-finite feature component {v!r}")

    @property
    def dimension(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


@dataclass(frozen=True)
class BackendDescriptor:
    """Names a backend and pins its input/feature geometry.

    ``weights_source`` is a file path or raw bytes. Which concrete model
    serves a deployment is a configuration choice; the descriptor is the
    contract the rest of the system sees.
    """

    name: str
    input_side: int
    feature_dimension: int
    weights_source: str | Path | bytes

    def __post_init__(self):
        if self.input_side < MIN_INPUT_SIDE:
            raise ValueError(f"input_side {self.input_side} below {MIN_INPUT_SIDE}")
        if self.feature_dimension < 1:
            raise ValueError(f"feature_dimension {self.feature_dimension} below 1")


def nearest_resize(block: np.ndarray, side: int) -> np.ndarray:
    """Nearest-neighbor resize of an (h, w[, c]) array to (side, side[, c]).

    Source index for output index i is (i * src_extent) // side, pure
    integer math, so any implementation reproduces it bit-exactly.
    """
    src_h, src_w = block.shape[:2]
    rows = (np.arange(side) * src_h) // side
    cols = (np.arange(side) * src_w) // side
    return block[rows][:, cols]


class ReferenceBackend:
    """Deterministic affine classifier + embedder over grayscale pixels.

    A loaded instance is immutable; classify/embed/detect may be called
    concurrently.
    """

    def __init__(self, descriptor: BackendDescriptor, feature_map: np.ndarray,
                 feature_bias: np.ndarray, class_map: np.ndarray, class_bias: np.ndarray):
        side, dim = descriptor.input_side, descriptor.feature_dimension
        self.descriptor = descriptor
        self.feature_map = np.asarray(feature_map, dtype=np.float32).reshape(dim, side * side)
        self.feature_bias = np.asarray(feature_bias, dtype=np.float32).reshape(dim)
        self.class_map = np.asarray(class_map, dtype=np.float32).reshape(N_EMOTIONS, dim)
        self.class_bias = np.asarray(class_bias, dtype=np.float32).reshape(N_EMOTIONS)
        for arr in (self.feature_map, self.feature_bias, self.class_map, self.class_bias):
            arr.setflags(write=False)

    @property
    def name(self) -> str:
        return self.descriptor.name

    @property
    def input_side(self) -> int:
        return self.descriptor.input_side

    @property
    def feature_dimension(self) -> int:
        return self.descriptor.feature_dimension

    def detect_face(self, image: FaceImage) -> FaceRegion | None:
        return detect_face(image)

    def _pixels(self, image: FaceImage, region: FaceRegion | None) -> np.ndarray:
        """Cropped, resized, grayscaled pixels flattened to float32 in [0, 1].

        Without an explicit region the detected face is used, falling
        back to the centered square: classify/embed always produce a
        value, and face gating stays the caller's decision.
        """
        if region is None:
            region = self.detect_face(image) or center_square(image)
        block = crop(image, region).astype(np.uint32)
        square = nearest_resize(block, self.input_side)
        gray = (square.sum(axis=2) // 3).astype(np.uint8)
        return (gray.astype(np.float32) / np.float32(255.0)).reshape(-1)

    def _feature(self, image: FaceImage, region: FaceRegion | None) -> np.ndarray:
        x = self._pixels(image, region)
        return self.feature_map @ x + self.feature_bias

    def embed(self, image: FaceImage, region: FaceRegion | None = None) -> FeatureVector:
        feature = self._feature(image, region)
        return FeatureVector(tuple(float(v) for v in feature))

    def logits(self, image: FaceImage, region: FaceRegion | None = None) -> np.ndarray:
        return self.class_map @ self._feature(image, region) + self.class_bias

    def classify(self, image: FaceImage, region: FaceRegion | None = None) -> EmotionScores:
        z = self.logits(image, region).astype(np.float64)
        z -= z.max()
        e = np.exp(z)
        scores = e / e.sum()
        return EmotionScores(tuple(float(v) for v in scores))

    def feature_logits(self, feature: FeatureVector) -> np.ndarray:
        """Classifier logits for an already-computed embedding."""
        f = feature.as_array().astype(np.float32)
        return self.class_map @ f + self.class_bias

    def to_bytes(self) -> bytes:
        header = WEIGHTS_MAGIC + struct.pack(
            "<4I", self.input_side, self.feature_dimension, N_EMOTIONS, 0
        )
        body = b"".join(
            arr.astype("<f4").tobytes()
            for arr in (self.feature_map, self.feature_bias, self.class_map, self.class_bias)
        )
        return header + body

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_bytes())


def _read_exact(data: bytes, offset: int, count: int, what: str) -> int:
    """Return the end offset, or raise with the offset where bytes ran out."""
    if len(data) < offset + count:
        raise BackendLoadError(f"truncated weight file while reading {what}", offset=len(data))
    return offset + count


def backend_from_bytes(data: bytes, name: str = "reference",
                       expected_side: int | None = None,
                       expected_dimension: int | None = None) -> ReferenceBackend:
    """Parse a weight blob; errors carry the byte offset of the first problem."""
    _read_exact(data, 0, 4, "magic")
    for i in range(4):
        if data[i] != WEIGHTS_MAGIC[i]:
            raise BackendLoadError(
                f"bad magic {data[:4]!r}, expected {WEIGHTS_MAGIC!r}", offset=i)
    _read_exact(data, 4, 16, "header")
    side, dim, classes, flags = struct.unpack_from("<4I", data, 4)
    if side < MIN_INPUT_SIDE:
        raise BackendLoadError(f"input_side {side} below {MIN_INPUT_SIDE}", offset=4)
    if expected_side is not None and side != expected_side:
        raise BackendLoadError(f"input_side {side} does not match descriptor "
                               f"{expected_side}", offset=4)
    if dim < 1:
        raise BackendLoadError(f"feature_dimension {dim} below 1", offset=8)
    if expected_dimension is not None and dim != expected_dimension:
        raise BackendLoadError(f"feature_dimension {dim} does not match descriptor "
                               f"{expected_dimension}", offset=8)
    if classes != N_EMOTIONS:
        raise BackendLoadError(f"class count {classes}, expected {N_EMOTIONS}", offset=12)
    if flags != 0:
        raise BackendLoadError(f"unsupported flags {flags}", offset=16)

    offset = 20
    arrays = []
    for what, count in (
        ("feature map", dim * side * side),
        ("feature bias", dim),
        ("class map", N_EMOTIONS * dim),
        ("class bias", N_EMOTIONS),
    ):
        end = _read_exact(data, offset, count * 4, what)
        arr = np.frombuffer(data, dtype="<f4", count=count, offset=offset)
        bad = np.flatnonzero(~np.isfinite(arr))
        if bad.size:
            raise BackendLoadError(f"non-finite value in {what}",
                                   offset=offset + int(bad[0]) * 4)
        arrays.append(arr)
        offset = end
    if len(data) != offset:
        raise BackendLoadError(f"{len(data) - offset} trailing bytes after weights",
                               offset=offset)

    descriptor = BackendDescriptor(name=name, input_side=side, feature_dimension=dim,
                                   weights_source=data)
    feature_map, feature_bias, class_map, class_bias = arrays
    return ReferenceBackend(descriptor, feature_map, feature_bias, class_map, class_bias)


def load_backend(descriptor: BackendDescriptor) -> ReferenceBackend:
    """Load a backend, enforcing the geometry the descriptor pins."""
    source = descriptor.weights_source
    if isinstance(source, bytes):
        data = source
    else:
        path = Path(source)
        if not path.exists():
            raise BackendLoadError(f"weight file not found: {path}", offset=0)
        data = path.read_bytes()
    backend = backend_from_bytes(data, name=descriptor.name,
                                 expected_side=descriptor.input_side,
                                 expected_dimension=descriptor.feature_dimension)
    return backend


def load_backend_file(path: str | Path, name: str | None = None) -> ReferenceBackend:
    """Load a backend taking the geometry from the file header."""
    p = Path(path)
    if not p.exists():
        raise BackendLoadError(f"weight file not found: {p}", offset=0)
    return backend_from_bytes(p.read_bytes(), name=name or p.stem)


def make_backend(input_side: int = 32, feature_dimension: int = 64, seed: int = 0,
                 scale: float = 0.5, name: str = "reference") -> ReferenceBackend:
    """Generate a random-weight reference backend (offline tooling)."""
    rng = np.random.default_rng(seed)
    n_pixels = input_side * input_side
    descriptor = BackendDescriptor(name=name, input_side=input_side,
                                   feature_dimension=feature_dimension, weights_source=b"")
    return ReferenceBackend(
        descriptor,
        rng.uniform(-scale, scale, size=(feature_dimension, n_pixels)).astype(np.float32),
        rng.uniform(-scale, scale, size=feature_dimension).astype(np.float32),
        rng.uniform(-scale, scale, size=(N_EMOTIONS, feature_dimension)).astype(np.float32),
        rng.uniform(-scale, scale, size=N_EMOTIONS).astype(np.float32),
    )
