"""Face image container, reference face detector, and PNG/JPEG codecs.

The reference detector is deliberately simple and deterministic: it
returns the largest centered square of the frame, or nothing when the
frame has almost no intensity variance (a blank capture). A real detector
can be swapped in behind the same ``detect_face`` signature.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import InvalidImageError

MIN_SIDE = 16
DEFAULT_VARIANCE_FLOOR = 1.0


@dataclass(frozen=True)
class FaceImage:
    """8-bit RGB image, row-major, 3 channels."""

    width: int
    height: int
    data: bytes

    def __post_init__(self):
        if self.width < MIN_SIDE or self.height < MIN_SIDE:
            raise InvalidImageError(
                f"image {self.width}x{self.height} smaller than {MIN_SIDE}x{MIN_SIDE}"
            )
        expected = self.width * self.height * 3
        if len(self.data) != expected:
            raise InvalidImageError(
                f"pixel buffer has {len(self.data)} bytes, expected {expected}"
            )

    @classmethod
    def from_array(cls, array: np.ndarray) -> "FaceImage":
        """Build from an (height, width, 3) uint8 array."""
        arr = np.asarray(array, dtype=np.uint8)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise InvalidImageError(f"expected (h, w, 3) array, got shape {arr.shape}")
        h, w = arr.shape[:2]
        return cls(width=w, height=h, data=arr.tobytes())

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.data, dtype=np.uint8).reshape(self.height, self.width, 3)

    def gray(self) -> np.ndarray:
        """Grayscale via (r+g+b)/3 integer division; (height, width) uint8."""
        rgb = self.to_array().astype(np.uint32)
        return (rgb.sum(axis=2) // 3).astype(np.uint8)

    @classmethod
    def from_image_bytes(cls, payload: bytes, formats: tuple[str, ...] = ("PNG", "JPEG")) -> "FaceImage":
        """Decode PNG or JPEG bytes."""
        try:
            with Image.open(io.BytesIO(payload)) as im:
                if im.format not in formats:
                    raise InvalidImageError(f"unsupported image format {im.format!r}")
                rgb = im.convert("RGB")
                return cls(width=rgb.width, height=rgb.height, data=rgb.tobytes())
        except UnidentifiedImageError:
            raise InvalidImageError("payload is not a decodable image") from None

    def to_png_bytes(self) -> bytes:
        im = Image.frombytes("RGB", (self.width, self.height), self.data)
        buf = io.BytesIO()
        im.save(buf, format="PNG")
        return buf.getvalue()

    @classmethod
    def load(cls, path) -> "FaceImage":
        with open(path, "rb") as fh:
            return cls.from_image_bytes(fh.read())

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_png_bytes())


@dataclass(frozen=True)
class FaceRegion:
    """Axis-aligned box, in pixels, inside some image."""

    x: int
    y: int
    width: int
    height: int

    def __post_init__(self):
        if self.x < 0 or self.y < 0 or self.width <= 0 or self.height <= 0:
            raise InvalidImageError(f"degenerate face region {self!r}")


def center_square(image: FaceImage) -> FaceRegion:
    """Largest centered square of the frame."""
    side = min(image.width, image.height)
    return FaceRegion(
        x=(image.width - side) // 2,
        y=(image.height - side) // 2,
        width=side,
        height=side,
    )


def detect_face(image: FaceImage,
                variance_floor: float = DEFAULT_VARIANCE_FLOOR) -> FaceRegion | None:
    """Reference detector: centered square crop, gated on intensity variance.

    Returns None for near-constant frames (variance below the floor), the
    signal that the capture holds no usable face.
    """
    gray = image.gray().astype(np.float64)
    if gray.var() < variance_floor:
        return None
    return center_square(image)


def crop(image: FaceImage, region: FaceRegion) -> np.ndarray:
    """Return the region's pixels as an (h, w, 3) uint8 array."""
    if region.x + region.width > image.width or region.y + region.height > image.height:
        raise InvalidImageError(f"region {region!r} exceeds image bounds "
                                f"{image.width}x{image.height}")
    arr = image.to_array()
    return arr[region.y:region.y + region.height, region.x:region.x + region.width]
